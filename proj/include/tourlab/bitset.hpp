#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <vector>

namespace tourlab {

// Dynamic bitmask over vertex labels 0..n-1.
class VertexSet {
public:
    VertexSet() : n_(0) {}
    explicit VertexSet(int n) : n_(n), w_((n + 63) / 64, 0) {}

    static VertexSet full(int n) {
        VertexSet s(n);
        for (int v = 0; v < n; ++v) s.add(v);
        return s;
    }
    static VertexSet of(int n, std::initializer_list<int> verts) {
        VertexSet s(n);
        for (int v : verts) s.add(v);
        return s;
    }

    int universe() const { return n_; }
    bool test(int v) const { return (w_[v >> 6] >> (v & 63)) & 1; }
    void add(int v) { w_[v >> 6] |= uint64_t(1) << (v & 63); }
    void remove(int v) { w_[v >> 6] &= ~(uint64_t(1) << (v & 63)); }

    int count() const {
        int c = 0;
        for (uint64_t x : w_) c += std::popcount(x);
        return c;
    }
    bool empty() const {
        for (uint64_t x : w_) if (x) return false;
        return true;
    }

    VertexSet operator&(const VertexSet& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a & b; }); }
    VertexSet operator|(const VertexSet& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a | b; }); }
    VertexSet minus(const VertexSet& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a & ~b; }); }
    VertexSet& operator&=(const VertexSet& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    VertexSet& operator|=(const VertexSet& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }

    bool intersects(const VertexSet& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }
    bool subset_of(const VertexSet& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }
    bool operator==(const VertexSet& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const VertexSet& o) const { return !(*this == o); }

    // -1 when empty.
    int lowest() const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i]) return int(i * 64 + std::countr_zero(w_[i]));
        return -1;
    }
    // Next member strictly above v, or -1.
    int next_above(int v) const {
        int i = (v + 1) >> 6;
        if (i >= (int)w_.size()) return -1;
        uint64_t x = w_[i] & (~uint64_t(0) << ((v + 1) & 63));
        while (true) {
            if (x) return int(i * 64 + std::countr_zero(x));
            if (++i >= (int)w_.size()) return -1;
            x = w_[i];
        }
    }

    template <typename F>
    void for_each(F f) const {
        for (size_t i = 0; i < w_.size(); ++i) {
            uint64_t x = w_[i];
            while (x) {
                f(int(i * 64 + std::countr_zero(x)));
                x &= x - 1;
            }
        }
    }
    std::vector<int> to_vector() const {
        std::vector<int> out;
        out.reserve(count());
        for_each([&](int v) { out.push_back(v); });
        return out;
    }

    // Compares the two member lists in ascending order; a strict prefix sorts first.
    static int compare_lex(const VertexSet& a, const VertexSet& b) {
        int x = a.lowest(), y = b.lowest();
        while (x != -1 && y != -1) {
            if (x != y) return x < y ? -1 : 1;
            x = a.next_above(x);
            y = b.next_above(y);
        }
        if (x == -1 && y == -1) return 0;
        return x == -1 ? -1 : 1;
    }

    const std::vector<uint64_t>& words() const { return w_; }

private:
    template <typename Op>
    VertexSet zip(const VertexSet& o, Op op) const {
        VertexSet r(n_);
        for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = op(w_[i], o.w_[i]);
        return r;
    }

    int n_;
    std::vector<uint64_t> w_;
};

} // namespace tourlab
