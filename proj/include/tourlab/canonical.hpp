#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tourlab/parallel.hpp"
#include "tourlab/tournament.hpp"

namespace tourlab {

struct SizeTooLargeForExhaustive : std::runtime_error {
    SizeTooLargeForExhaustive() : std::runtime_error("size exceeds the exhaustive-mode bound") {}
};
struct SizeTooLargeForExact : std::runtime_error {
    SizeTooLargeForExact() : std::runtime_error("size exceeds the exact-mode bound") {}
};

// Exact-mode bounds. Configuration values, not hard constants.
struct Caps {
    int enumerate_max = 8;
    int max_transitive_exact = 20;
    int max_pure_pair_exact = 16;
    int forest_order_exact = 9;
};

// Upper-triangle row-major bit sequence, packed MSB-first so that word
// comparison is lexicographic bit comparison.
struct CanonicalForm {
    int n = 0;
    std::vector<uint64_t> bits;

    bool operator==(const CanonicalForm& o) const { return n == o.n && bits == o.bits; }
    bool operator<(const CanonicalForm& o) const {
        if (n != o.n) return n < o.n;
        return bits < o.bits;
    }

    std::string hex() const {
        std::string out;
        int total = n * (n - 1) / 2;
        int digits = (total + 3) / 4;
        for (int d = 0; d < digits; ++d) {
            int v = 0;
            for (int b = 4 * d; b < 4 * d + 4; ++b) {
                v <<= 1;
                if (b < total && ((bits[b >> 6] >> (63 - (b & 63))) & 1)) v |= 1;
            }
            out += "0123456789abcdef"[v];
        }
        return out;
    }
};

inline Tournament tournament_from_canonical(const CanonicalForm& cf) {
    Tournament t(cf.n);
    int b = 0;
    for (int i = 0; i < cf.n; ++i)
        for (int j = i + 1; j < cf.n; ++j) {
            bool bit = (cf.bits[b >> 6] >> (63 - (b & 63))) & 1;
            ++b;
            if (bit)
                t.set_arc(i, j);
            else
                t.set_arc(j, i);
        }
    return t;
}

namespace detail {

// Search for the extremal relabeling via ordered-partition refinement.
// Position d must take a vertex from the first cell; the bits a row
// contributes within each later cell can always be arranged 0s-first
// (minimizing) or 1s-first (maximizing), which is exactly what splitting
// the cell enforces. Candidate rows are tried best-first, so the first
// descent usually lands the answer and siblings prune on prefix compare.
class CanonicalSearch {
public:
    CanonicalSearch(const Tournament& t, bool maximize)
        : t_(t), maximize_(maximize), n_(t.size()), total_bits_(n_ * (n_ - 1) / 2) {
        words_ = (total_bits_ + 63) / 64;
        prefix_.assign(std::max(words_, 1), 0);
    }

    CanonicalForm run() {
        std::vector<std::vector<int>> cells;
        std::vector<int> all(n_);
        for (int i = 0; i < n_; ++i) all[i] = i;
        if (n_ > 0) cells.push_back(all);
        dfs(cells, 0);
        CanonicalForm cf;
        cf.n = n_;
        cf.bits = best_;
        if (n_ <= 1) cf.bits.assign(n_ == 0 ? 0 : 1, 0);
        if (n_ == 0) cf.bits.clear();
        return cf;
    }

private:
    struct Candidate {
        int v;
        std::vector<uint8_t> row;
        std::vector<std::vector<int>> cells;
    };

    void dfs(const std::vector<std::vector<int>>& cells, int len) {
        if (cells.empty()) {
            if (!have_best_ || better(prefix_, best_)) {
                best_ = prefix_;
                have_best_ = true;
            }
            return;
        }
        std::vector<Candidate> cand;
        cand.reserve(cells[0].size());
        for (int v : cells[0]) cand.push_back(make_candidate(v, cells));
        std::stable_sort(cand.begin(), cand.end(), [&](const Candidate& a, const Candidate& b) {
            if (a.row != b.row) return maximize_ ? a.row > b.row : a.row < b.row;
            return a.v < b.v;
        });
        for (const auto& c : cand) {
            int new_len = len + (int)c.row.size();
            for (int i = 0; i < (int)c.row.size(); ++i)
                if (c.row[i]) set_bit(len + i);
            if (!have_best_ || !worse_prefix(new_len)) dfs(c.cells, new_len);
            for (int i = 0; i < (int)c.row.size(); ++i)
                if (c.row[i]) clear_bit(len + i);
        }
    }

    Candidate make_candidate(int v, const std::vector<std::vector<int>>& cells) const {
        Candidate c;
        c.v = v;
        for (size_t ci = 0; ci < cells.size(); ++ci) {
            std::vector<int> zeros, ones;
            for (int u : cells[ci]) {
                if (u == v) continue;
                (t_.arc(v, u) ? ones : zeros).push_back(u);
            }
            auto& first = maximize_ ? ones : zeros;
            auto& second = maximize_ ? zeros : ones;
            for (size_t k = 0; k < first.size(); ++k) c.row.push_back(maximize_ ? 1 : 0);
            for (size_t k = 0; k < second.size(); ++k) c.row.push_back(maximize_ ? 0 : 1);
            if (!first.empty()) c.cells.push_back(std::move(first));
            if (!second.empty()) c.cells.push_back(std::move(second));
        }
        return c;
    }

    void set_bit(int b) { prefix_[b >> 6] |= uint64_t(1) << (63 - (b & 63)); }
    void clear_bit(int b) { prefix_[b >> 6] &= ~(uint64_t(1) << (63 - (b & 63))); }

    // True when the current prefix already loses against best on its first
    // `len` bits; ties keep searching.
    bool worse_prefix(int len) const {
        int full = len >> 6, rem = len & 63;
        for (int i = 0; i < full; ++i) {
            if (prefix_[i] != best_[i]) return maximize_ ? prefix_[i] < best_[i] : prefix_[i] > best_[i];
        }
        if (rem) {
            uint64_t mask = ~uint64_t(0) << (64 - rem);
            uint64_t a = prefix_[full] & mask, b = best_[full] & mask;
            if (a != b) return maximize_ ? a < b : a > b;
        }
        return false;
    }

    bool better(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) const {
        return maximize_ ? a > b : a < b;
    }

    const Tournament& t_;
    bool maximize_;
    int n_, total_bits_, words_;
    std::vector<uint64_t> prefix_;
    std::vector<uint64_t> best_;
    bool have_best_ = false;
};

} // namespace detail

// Lexicographically minimal upper-triangle bit sequence over all relabelings.
// Equal forms iff isomorphic; deterministic.
inline CanonicalForm canonical_form(const Tournament& t) {
    return detail::CanonicalSearch(t, false).run();
}

// Independent cross-check map: lexicographically maximal form instead.
inline CanonicalForm canonical_form_max(const Tournament& t) {
    return detail::CanonicalSearch(t, true).run();
}

// One representative per isomorphism class, built by extending the class
// list one vertex at a time. Output order is sorted canonical form.
inline void enumerate_tournaments(int n, const std::function<void(const Tournament&)>& yield,
                                  const Caps& caps = Caps(), int jobs = 1, bool use_max_form = false) {
    if (n < 1) throw std::invalid_argument("enumerate_tournaments: n must be >= 1");
    if (n > caps.enumerate_max) throw SizeTooLargeForExhaustive();
    auto canon = use_max_form ? canonical_form_max : canonical_form;

    std::vector<CanonicalForm> reps;
    reps.push_back(canon(Tournament(1)));
    for (int m = 2; m <= n; ++m) {
        auto per_rep = parallel_map<std::vector<CanonicalForm>>(
            (int)reps.size(), jobs, [&](int idx) {
                Tournament base = tournament_from_canonical(reps[idx]);
                std::vector<CanonicalForm> out;
                out.reserve(size_t(1) << (m - 1));
                for (uint64_t mask = 0; mask < (uint64_t(1) << (m - 1)); ++mask) {
                    Tournament ext(m);
                    for (int i = 0; i < m - 1; ++i)
                        for (int j = i + 1; j < m - 1; ++j) {
                            if (base.arc(i, j))
                                ext.set_arc(i, j);
                            else
                                ext.set_arc(j, i);
                        }
                    for (int j = 0; j < m - 1; ++j) {
                        if ((mask >> j) & 1)
                            ext.set_arc(m - 1, j);
                        else
                            ext.set_arc(j, m - 1);
                    }
                    out.push_back(canon(ext));
                }
                return out;
            });
        std::vector<CanonicalForm> merged;
        for (auto& chunk : per_rep)
            for (auto& cf : chunk) merged.push_back(std::move(cf));
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        reps = std::move(merged);
    }
    for (const auto& cf : reps) yield(tournament_from_canonical(cf));
}

inline long long count_tournament_classes(int n, const Caps& caps = Caps(), int jobs = 1,
                                          bool use_max_form = false) {
    long long count = 0;
    enumerate_tournaments(n, [&](const Tournament&) { ++count; }, caps, jobs, use_max_form);
    return count;
}

} // namespace tourlab
