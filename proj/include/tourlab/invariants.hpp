#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tourlab/canonical.hpp"
#include "tourlab/io.hpp"
#include "tourlab/parallel.hpp"
#include "tourlab/rational.hpp"
#include "tourlab/tournament.hpp"

namespace tourlab {

struct Infeasible : std::runtime_error {
    Infeasible() : std::runtime_error("no transitive witness of the requested size") {}
};

// A transitive induced subtournament together with its backward-arc-free order.
struct TransitiveWitness {
    VertexSet vertices;
    std::vector<int> order;   // transitive order: earlier beats later

    bool verify(const Tournament& t) const {
        if ((int)order.size() != vertices.count()) return false;
        for (size_t i = 0; i < order.size(); ++i) {
            if (!vertices.test(order[i])) return false;
            for (size_t j = i + 1; j < order.size(); ++j)
                if (!t.arc(order[i], order[j])) return false;
        }
        return true;
    }
};

namespace detail {

// Maximum chain v1 -> v2 -> ... with every earlier vertex beating every
// later one; equivalently the largest induced acyclic set. longest(S) is the
// lexicographically first maximum chain inside S, memoized on S.
class MaxTransitiveSearch {
public:
    explicit MaxTransitiveSearch(const Tournament& t) : t_(t) {
        outs_.reserve(t.size());
        for (int v = 0; v < t.size(); ++v) outs_.push_back(t.out_neighbors(v));
    }

    std::vector<int> run() { return longest(VertexSet::full(t_.size())); }

private:
    const std::vector<int>& longest(const VertexSet& inside) {
        auto it = memo_.find(inside.words());
        if (it != memo_.end()) return it->second;
        std::vector<int> best;
        inside.for_each([&](int v) {
            VertexSet next = inside & outs_[v];
            if (1 + next.count() <= (int)best.size()) return;
            const std::vector<int>& tail = longest(next);
            if (1 + tail.size() > best.size()) {
                best.clear();
                best.push_back(v);
                best.insert(best.end(), tail.begin(), tail.end());
            }
        });
        return memo_.emplace(inside.words(), std::move(best)).first->second;
    }

    const Tournament& t_;
    std::vector<VertexSet> outs_;
    std::map<std::vector<uint64_t>, std::vector<int>> memo_;
};

} // namespace detail

struct MaxTransitiveResult {
    int size = 0;
    TransitiveWitness witness;
};

// Exact maximum transitive induced subtournament; witness ties resolved by
// the search's ascending-label order.
inline MaxTransitiveResult max_transitive(const Tournament& t, const Caps& caps = Caps()) {
    if (t.size() < 1) throw std::invalid_argument("max_transitive: empty tournament");
    if (t.size() > caps.max_transitive_exact) throw SizeTooLargeForExact();
    detail::MaxTransitiveSearch search(t);
    std::vector<int> chain = search.run();
    MaxTransitiveResult r;
    r.size = (int)chain.size();
    r.witness.order = chain;
    r.witness.vertices = VertexSet(t.size());
    for (int v : chain) r.witness.vertices.add(v);
    return r;
}

// Greedy halving: take the lowest remaining vertex, recurse into the larger
// of its out/in sides. Succeeds whenever |t| >= 2^(k-1); exact fallback
// below the cap, Infeasible otherwise.
inline TransitiveWitness find_transitive_at_least(const Tournament& t, int k,
                                                  const Caps& caps = Caps()) {
    std::vector<int> chain_front, chain_back;
    VertexSet s = VertexSet::full(t.size());
    while (!s.empty()) {
        int v = s.lowest();
        VertexSet rest = s;
        rest.remove(v);
        VertexSet outs = t.out_neighbors_in(v, rest);
        VertexSet ins = rest.minus(outs);
        if (outs.count() >= ins.count()) {
            chain_front.push_back(v);
            s = outs;
        } else {
            chain_back.push_back(v);
            s = ins;
        }
    }
    std::reverse(chain_back.begin(), chain_back.end());
    chain_front.insert(chain_front.end(), chain_back.begin(), chain_back.end());
    TransitiveWitness w;
    w.order = chain_front;
    w.vertices = VertexSet(t.size());
    for (int v : w.order) w.vertices.add(v);
    if ((int)w.order.size() >= k) {
        if (!w.verify(t)) throw std::logic_error("greedy transitive witness failed verification");
        return w;
    }
    if (t.size() <= caps.max_transitive_exact) {
        auto exact = max_transitive(t, caps);
        if (exact.size >= k) return exact.witness;
    }
    throw Infeasible();
}

// Exact induced-subtournament embedding by backtracking; returns the
// lexicographically first map (pattern vertex i -> map[i]) or absent.
inline std::optional<std::vector<int>> contains(const Tournament& host, const Tournament& pattern) {
    int k = pattern.size(), n = host.size();
    if (k > n) return std::nullopt;
    std::vector<int> map(k, -1);
    std::vector<char> used(n, 0);
    auto dfs = [&](auto&& self, int depth) -> bool {
        if (depth == k) return true;
        for (int v = 0; v < n; ++v) {
            if (used[v]) continue;
            bool ok = true;
            for (int i = 0; i < depth; ++i) {
                if (host.arc(map[i], v) != pattern.arc(i, depth)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            map[depth] = v;
            used[v] = 1;
            if (self(self, depth + 1)) return true;
            used[v] = 0;
            map[depth] = -1;
        }
        return false;
    };
    if (dfs(dfs, 0)) return map;
    return std::nullopt;
}

// Checks a given injective map realizes pattern as an induced subtournament.
inline bool verify_embedding(const Tournament& host, const Tournament& pattern,
                             const std::vector<int>& map) {
    if ((int)map.size() != pattern.size()) return false;
    std::vector<char> used(host.size(), 0);
    for (int v : map) {
        if (v < 0 || v >= host.size() || used[v]) return false;
        used[v] = 1;
    }
    for (int i = 0; i < pattern.size(); ++i)
        for (int j = 0; j < pattern.size(); ++j)
            if (i != j && host.arc(map[i], map[j]) != pattern.arc(i, j)) return false;
    return true;
}

// Ordered pair of disjoint sets with A complete to B; order = min size.
struct PurePair {
    VertexSet a, b;
    int order = 0;

    bool verify(const Tournament& t) const {
        if (a.empty() || b.empty() || a.intersects(b)) return false;
        if (order != std::min(a.count(), b.count())) return false;
        bool pure = true;
        a.for_each([&](int u) {
            b.for_each([&](int v) {
                if (!t.arc(u, v)) pure = false;
            });
        });
        return pure;
    }
};

namespace detail {

// (order, A, B) comparison: larger order wins; ties prefer the
// lexicographically smaller A, then B (member lists ascending).
inline bool pure_pair_better(const PurePair& cand, const PurePair& best) {
    if (best.order == 0) return true;
    if (cand.order != best.order) return cand.order > best.order;
    int ca = VertexSet::compare_lex(cand.a, best.a);
    if (ca != 0) return ca < 0;
    return VertexSet::compare_lex(cand.b, best.b) < 0;
}

class MaxPurePairSearch {
public:
    explicit MaxPurePairSearch(const Tournament& t) : t_(t), n_(t.size()) {
        outs_.reserve(n_);
        ins_.reserve(n_);
        for (int v = 0; v < n_; ++v) {
            outs_.push_back(t.out_neighbors(v));
            ins_.push_back(t.in_neighbors(v));
        }
    }

    PurePair run() {
        dfs(0, VertexSet(n_), VertexSet(n_), VertexSet::full(n_), VertexSet::full(n_));
        return best_;
    }

private:
    void dfs(int v, VertexSet a, VertexSet b, VertexSet cand_a, VertexSet cand_b) {
        // cand_a/cand_b hold the still-undecided vertices eligible for each side.
        int ub = std::min(a.count() + cand_a.count(), b.count() + cand_b.count());
        if (ub < best_.order) return;
        if (v == n_) {
            if (a.empty() || b.empty()) return;
            PurePair p{a, b, std::min(a.count(), b.count())};
            if (pure_pair_better(p, best_)) best_ = p;
            return;
        }
        bool in_a = cand_a.test(v), in_b = cand_b.test(v);
        if (in_a) {
            VertexSet a2 = a;
            a2.add(v);
            VertexSet ca2 = cand_a, cb2 = cand_b;
            ca2.remove(v);
            cb2.remove(v);
            dfs(v + 1, a2, b, ca2, cb2 & outs_[v]);
        }
        if (in_b) {
            VertexSet b2 = b;
            b2.add(v);
            VertexSet ca2 = cand_a, cb2 = cand_b;
            ca2.remove(v);
            cb2.remove(v);
            dfs(v + 1, a, b2, ca2 & ins_[v], cb2);
        }
        VertexSet ca3 = cand_a, cb3 = cand_b;
        ca3.remove(v);
        cb3.remove(v);
        dfs(v + 1, a, b, ca3, cb3);
    }

    const Tournament& t_;
    int n_;
    std::vector<VertexSet> outs_, ins_;
    PurePair best_;
};

} // namespace detail

// Exact maximum-order pure pair, ties lexicographically smallest A then B.
inline PurePair max_pure_pair(const Tournament& t, const Caps& caps = Caps()) {
    if (t.size() < 2) throw std::invalid_argument("max_pure_pair: need at least 2 vertices");
    if (t.size() > caps.max_pure_pair_exact) throw SizeTooLargeForExact();
    return detail::MaxPurePairSearch(t).run();
}

inline bool is_alpha_coherent(const Tournament& t, const Rational& alpha, const Caps& caps = Caps()) {
    if (alpha <= Rational(0)) throw std::invalid_argument("alpha must be positive");
    PurePair p = max_pure_pair(t, caps);
    return Rational(p.order) < alpha * Rational(t.size());
}

struct ScanRow {
    int n = 0;
    std::string canonical_hex;
    int pure = 0;
    int transitive = 0;
    Rational ratio;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    bool empty_universe = true;
    Rational min_ratio;
    Tournament argmin;   // witness attaining the minimum ratio

    std::string csv() const {
        std::string out = "n,canonical_form,P,tr,ratio\n";
        for (const auto& r : rows)
            out += std::to_string(r.n) + "," + r.canonical_hex + "," + std::to_string(r.pure) +
                   "," + std::to_string(r.transitive) + "," + r.ratio.str() + "\n";
        return out;
    }
};

// P(T)/|T| over all pattern-free tournaments with 2 <= |T| <= n_max, one per
// isomorphism class. Descriptive: reports the empirical minimum and witness.
inline ScanReport strong_eh_scan(const Tournament& pattern, int n_max, const Caps& caps = Caps(),
                                 int jobs = 1) {
    if (n_max > caps.enumerate_max) throw SizeTooLargeForExhaustive();
    ScanReport report;
    for (int n = 2; n <= n_max; ++n) {
        std::vector<Tournament> classes;
        enumerate_tournaments(n, [&](const Tournament& t) { classes.push_back(t); }, caps, jobs);
        auto rows = parallel_map<std::optional<ScanRow>>(
            (int)classes.size(), jobs, [&](int i) -> std::optional<ScanRow> {
                const Tournament& t = classes[i];
                if (contains(t, pattern)) return std::nullopt;
                ScanRow row;
                row.n = n;
                row.canonical_hex = canonical_form(t).hex();
                row.pure = max_pure_pair(t, caps).order;
                row.transitive = max_transitive(t, caps).size;
                row.ratio = Rational(row.pure, n);
                return row;
            });
        for (int i = 0; i < (int)rows.size(); ++i) {
            if (!rows[i]) continue;
            report.rows.push_back(*rows[i]);
            if (report.empty_universe || rows[i]->ratio < report.min_ratio) {
                report.min_ratio = rows[i]->ratio;
                report.argmin = classes[i];
            }
            report.empty_universe = false;
        }
    }
    return report;
}

// ---- naive test oracles -------------------------------------------------

// All-subsets maximum transitive scan; chain ties match the optimized search
// (ascending-label transitive order of the lexicographically first best set).
inline int naive_max_transitive(const Tournament& t) {
    int n = t.size(), best = 0;
    for (uint64_t mask = 1; mask < (uint64_t(1) << n); ++mask) {
        VertexSet s(n);
        for (int v = 0; v < n; ++v)
            if ((mask >> v) & 1) s.add(v);
        if (is_transitive(induced(t, s).t)) best = std::max(best, s.count());
    }
    return best;
}

// Full 3^n assignment sweep with the production tie-break.
inline PurePair naive_max_pure_pair(const Tournament& t) {
    int n = t.size();
    PurePair best;
    std::vector<int> state(n, 0);
    auto rec = [&](auto&& self, int v) -> void {
        if (v == n) {
            VertexSet a(n), b(n);
            for (int i = 0; i < n; ++i) {
                if (state[i] == 1) a.add(i);
                if (state[i] == 2) b.add(i);
            }
            if (a.empty() || b.empty()) return;
            bool pure = true;
            a.for_each([&](int u) {
                b.for_each([&](int w) {
                    if (!t.arc(u, w)) pure = false;
                });
            });
            if (!pure) return;
            PurePair p{a, b, std::min(a.count(), b.count())};
            if (detail::pure_pair_better(p, best)) best = p;
            return;
        }
        for (int s = 0; s <= 2; ++s) {
            state[v] = s;
            self(self, v + 1);
        }
        state[v] = 0;
    };
    rec(rec, 0);
    return best;
}

} // namespace tourlab
