#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tourlab/bitset.hpp"
#include "tourlab/rational.hpp"

namespace tourlab {

struct DuplicateOrConflictingArc : std::runtime_error {
    DuplicateOrConflictingArc() : std::runtime_error("duplicate or conflicting arc") {}
};
struct VertexOutOfRange : std::runtime_error {
    VertexOutOfRange() : std::runtime_error("vertex out of range") {}
};
struct InvalidPermutation : std::runtime_error {
    InvalidPermutation() : std::runtime_error("ordering is not a permutation of the vertex set") {}
};
struct EmptySet : std::runtime_error {
    EmptySet() : std::runtime_error("vertex set must be nonempty") {}
};
struct SetsOverlap : std::runtime_error {
    SetsOverlap() : std::runtime_error("vertex sets must be disjoint") {}
};

// Complete oriented graph on n vertices, adjacency kept as packed bit rows.
// Invariants: no loops; exactly one of (u,v),(v,u) for u != v.
class Tournament {
public:
    Tournament() : n_(0), words_(0) {}
    explicit Tournament(int n) : n_(n), words_((n + 63) / 64), rows_(size_t(n) * words_, 0) {}

    int size() const { return n_; }
    bool arc(int u, int v) const { return (row(u)[v >> 6] >> (v & 63)) & 1; }

    // Orients u -> v, clearing any previous v -> u.
    void set_arc(int u, int v) {
        row(u)[v >> 6] |= uint64_t(1) << (v & 63);
        row(v)[u >> 6] &= ~(uint64_t(1) << (u & 63));
    }

    int out_degree(int v) const {
        int c = 0;
        for (int i = 0; i < words_; ++i) c += std::popcount(row(v)[i]);
        return c;
    }

    VertexSet out_neighbors(int v) const {
        VertexSet s(n_);
        for (int u = 0; u < n_; ++u)
            if (u != v && arc(v, u)) s.add(u);
        return s;
    }
    VertexSet in_neighbors(int v) const {
        VertexSet s(n_);
        for (int u = 0; u < n_; ++u)
            if (u != v && arc(u, v)) s.add(u);
        return s;
    }
    VertexSet out_neighbors_in(int v, const VertexSet& mask) const {
        VertexSet s = out_neighbors(v);
        s &= mask;
        return s;
    }
    VertexSet in_neighbors_in(int v, const VertexSet& mask) const {
        VertexSet s = in_neighbors(v);
        s &= mask;
        return s;
    }

    bool operator==(const Tournament& o) const { return n_ == o.n_ && rows_ == o.rows_; }

private:
    uint64_t* row(int v) { return rows_.data() + size_t(v) * words_; }
    const uint64_t* row(int v) const { return rows_.data() + size_t(v) * words_; }

    int n_;
    int words_;
    std::vector<uint64_t> rows_;
};

// Unlisted pairs default to low -> high. Each unordered pair may be listed once.
inline Tournament build_tournament(int n, const std::vector<std::pair<int, int>>& arcs) {
    Tournament t(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) t.set_arc(i, j);
    std::vector<char> listed(size_t(n) * n, 0);
    for (auto [u, v] : arcs) {
        if (u < 0 || u >= n || v < 0 || v >= n) throw VertexOutOfRange();
        if (u == v) throw DuplicateOrConflictingArc();
        int a = std::min(u, v), b = std::max(u, v);
        if (listed[size_t(a) * n + b]) throw DuplicateOrConflictingArc();
        listed[size_t(a) * n + b] = 1;
        t.set_arc(u, v);
    }
    return t;
}

// A tournament is transitive iff its out-degrees are a permutation of 0..n-1.
inline bool is_transitive(const Tournament& t) {
    int n = t.size();
    std::vector<char> seen(n, 0);
    for (int v = 0; v < n; ++v) {
        int d = t.out_degree(v);
        if (seen[d]) return false;
        seen[d] = 1;
    }
    return true;
}

// Position p holds the p-th vertex; vertex labels and positions stay distinct.
struct Ordering {
    std::vector<int> perm;

    Ordering() = default;
    explicit Ordering(std::vector<int> p) : perm(std::move(p)) {}
    static Ordering identity(int n) {
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        return Ordering(p);
    }

    int size() const { return (int)perm.size(); }
    int vertex_at(int pos) const { return perm[pos]; }

    std::vector<int> positions() const {
        std::vector<int> pos(perm.size(), -1);
        for (int p = 0; p < (int)perm.size(); ++p) pos[perm[p]] = p;
        return pos;
    }

    void validate(int n) const {
        if ((int)perm.size() != n) throw InvalidPermutation();
        std::vector<char> seen(n, 0);
        for (int v : perm) {
            if (v < 0 || v >= n || seen[v]) throw InvalidPermutation();
            seen[v] = 1;
        }
    }
};

// A tournament drawn under an ordering, with its backward arc set (u, v):
// arcs u -> v whose source sits at a later position than its target.
struct OrderedTournament {
    Tournament t;
    Ordering theta;
    std::vector<std::pair<int, int>> backward;   // vertex pairs
    std::vector<int> pos;                        // vertex -> position

    int size() const { return t.size(); }
    int position(int v) const { return pos[v]; }
    bool backward_arc(int u, int v) const { return t.arc(u, v) && pos[u] > pos[v]; }

    // Backward arcs as (source position, target position) pairs.
    std::vector<std::pair<int, int>> backward_positions() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(backward.size());
        for (auto [u, v] : backward) out.emplace_back(pos[u], pos[v]);
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline OrderedTournament backward_arcs(const Tournament& t, const Ordering& theta) {
    theta.validate(t.size());
    OrderedTournament ot;
    ot.t = t;
    ot.theta = theta;
    ot.pos = theta.positions();
    for (int p = 0; p < t.size(); ++p)
        for (int q = 0; q < p; ++q) {
            int u = theta.vertex_at(p), v = theta.vertex_at(q);
            if (t.arc(u, v)) ot.backward.emplace_back(u, v);
        }
    return ot;
}

// d(X, Y) = (number of arcs from X to Y) / (|X| * |Y|), exact.
inline Rational directed_density(const Tournament& t, const VertexSet& x, const VertexSet& y) {
    if (x.empty() || y.empty()) throw EmptySet();
    if (x.intersects(y)) throw SetsOverlap();
    long long e = 0;
    x.for_each([&](int u) {
        y.for_each([&](int v) {
            if (t.arc(u, v)) ++e;
        });
    });
    return Rational(e, (long long)x.count() * y.count());
}

struct InducedResult {
    Tournament t;
    std::vector<int> index_map;   // new label -> original label
};

// Relabels to 0..|S|-1 preserving the natural order of members.
inline InducedResult induced(const Tournament& t, const VertexSet& s) {
    if (s.empty()) throw EmptySet();
    InducedResult r;
    r.index_map = s.to_vector();
    int k = (int)r.index_map.size();
    r.t = Tournament(k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            if (t.arc(r.index_map[i], r.index_map[j]))
                r.t.set_arc(i, j);
            else
                r.t.set_arc(j, i);
        }
    return r;
}

// Vertex v of t becomes perm[v] in the result.
inline Tournament relabel(const Tournament& t, const std::vector<int>& perm) {
    int n = t.size();
    Tournament r(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            if (t.arc(u, v))
                r.set_arc(perm[u], perm[v]);
            else
                r.set_arc(perm[v], perm[u]);
        }
    return r;
}

} // namespace tourlab
