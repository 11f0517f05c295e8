#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <vector>

#include "tourlab/canonical.hpp"
#include "tourlab/parallel.hpp"
#include "tourlab/tournament.hpp"

namespace tourlab {

enum class StarKind { Left, Right, Middle };

inline const char* star_kind_name(StarKind k) {
    switch (k) {
        case StarKind::Left: return "left";
        case StarKind::Right: return "right";
        default: return "middle";
    }
}

// A star under an ordering: all backward arcs touch one center.
//   right:  {(u_p, u_i) : i < p}        center last
//   left:   {(u_i, u_1) : i > 1}        center first
//   middle: {(u_i, u_m) : i > m} + {(u_m, u_i) : i < m}, m interior
struct StarSpec {
    StarKind kind;
    int center = -1;
    std::vector<int> leaves;   // vertices in theta order
    int split = -1;            // middle only: center index within the star ordering
};

namespace detail {

// Matches the backward arcs of a component (given as index pairs into its
// position-ordered vertex list) against the star templates. p >= 2.
inline std::vector<StarKind> match_star_templates(const std::vector<std::pair<int, int>>& rel,
                                                  int p, int* middle_split) {
    std::vector<StarKind> kinds;
    if ((int)rel.size() != p - 1) return kinds;
    bool left = true, right = true;
    for (auto [s, d] : rel) {
        if (d != 0) left = false;
        if (s != p - 1) right = false;
    }
    if (left) kinds.push_back(StarKind::Left);
    if (right) kinds.push_back(StarKind::Right);
    for (int m = 1; m <= p - 2; ++m) {
        bool ok = true;
        std::set<std::pair<int, int>> want;
        for (int i = m + 1; i < p; ++i) want.insert({i, m});
        for (int i = 0; i < m; ++i) want.insert({m, i});
        for (auto [s, d] : rel)
            if (!want.count({s, d})) {
                ok = false;
                break;
            }
        if (ok && want.size() == rel.size()) {
            kinds.push_back(StarKind::Middle);
            if (middle_split) *middle_split = m;
            break;
        }
    }
    return kinds;
}

} // namespace detail

// Classifies the whole ordered tournament as a single star. A 2-vertex star
// matches both frontier kinds; one vertex conventionally matches everything;
// no backward arcs on p >= 2 matches nothing.
inline std::vector<StarSpec> classify_star_ordering(const OrderedTournament& ot) {
    int p = ot.size();
    std::vector<StarSpec> out;
    if (p == 1) {
        for (StarKind k : {StarKind::Left, StarKind::Right, StarKind::Middle})
            out.push_back({k, ot.theta.vertex_at(0), {}, -1});
        return out;
    }
    auto rel = ot.backward_positions();
    int split = -1;
    for (StarKind k : detail::match_star_templates(rel, p, &split)) {
        StarSpec s;
        s.kind = k;
        if (k == StarKind::Left) {
            s.center = ot.theta.vertex_at(0);
            for (int i = 1; i < p; ++i) s.leaves.push_back(ot.theta.vertex_at(i));
        } else if (k == StarKind::Right) {
            s.center = ot.theta.vertex_at(p - 1);
            for (int i = 0; i < p - 1; ++i) s.leaves.push_back(ot.theta.vertex_at(i));
        } else {
            s.center = ot.theta.vertex_at(split);
            s.split = split;
            for (int i = 0; i < p; ++i)
                if (i != split) s.leaves.push_back(ot.theta.vertex_at(i));
        }
        out.push_back(std::move(s));
    }
    return out;
}

// One connected component of the backward arc digraph, with every star
// template it matches. Ambiguity (both frontier kinds) happens only at p = 2.
struct StarComponent {
    std::vector<int> verts;   // theta order
    std::vector<StarKind> kinds;
    int middle_split = -1;

    bool has_kind(StarKind k) const {
        return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
    }
    bool frontier() const { return has_kind(StarKind::Left) || has_kind(StarKind::Right); }
    int center_for(StarKind k) const {
        if (k == StarKind::Left) return verts.front();
        if (k == StarKind::Right) return verts.back();
        return verts[middle_split];
    }
    std::vector<int> leaves_for(StarKind k) const {
        std::vector<int> out;
        for (int i = 0; i < (int)verts.size(); ++i) {
            if (k == StarKind::Left && i == 0) continue;
            if (k == StarKind::Right && i == (int)verts.size() - 1) continue;
            if (k == StarKind::Middle && i == middle_split) continue;
            out.push_back(verts[i]);
        }
        return out;
    }
};

struct NebulaDecomposition {
    std::vector<StarComponent> stars;   // ordered by first position
    VertexSet singletons;
};

namespace detail {

inline std::vector<std::vector<int>> backward_components(const OrderedTournament& ot) {
    int n = ot.size();
    std::vector<int> parent(n);
    for (int v = 0; v < n; ++v) parent[v] = v;
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (auto [u, v] : ot.backward) {
        int a = find(u), b = find(v);
        if (a != b) parent[a] = b;
    }
    std::vector<std::vector<int>> by_root(n);
    for (int p = 0; p < n; ++p) {
        int v = ot.theta.vertex_at(p);
        by_root[find(v)].push_back(v);   // collected in theta order
    }
    std::vector<std::vector<int>> comps;
    for (int p = 0; p < n; ++p) {
        int v = ot.theta.vertex_at(p);
        int r = find(v);
        if (!by_root[r].empty() && by_root[r].front() == v) comps.push_back(std::move(by_root[r]));
    }
    return comps;
}

} // namespace detail

// Partitions the backward digraph components into stars and singletons; the
// ordering is a nebula ordering iff every component of size >= 2 is a star.
inline std::optional<NebulaDecomposition> decompose_nebula(const OrderedTournament& ot) {
    NebulaDecomposition dec;
    dec.singletons = VertexSet(ot.size());
    for (auto& comp : detail::backward_components(ot)) {
        if (comp.size() == 1) {
            dec.singletons.add(comp[0]);
            continue;
        }
        std::vector<int> idx(ot.size(), -1);
        for (int i = 0; i < (int)comp.size(); ++i) idx[comp[i]] = i;
        std::vector<std::pair<int, int>> rel;
        for (auto [u, v] : ot.backward)
            if (idx[u] >= 0 && idx[v] >= 0) rel.emplace_back(idx[u], idx[v]);
        std::sort(rel.begin(), rel.end());
        StarComponent sc;
        sc.verts = comp;
        sc.kinds = detail::match_star_templates(rel, (int)comp.size(), &sc.middle_split);
        if (sc.kinds.empty()) return std::nullopt;
        dec.stars.push_back(std::move(sc));
    }
    return dec;
}

struct GalaxyInfo {
    NebulaDecomposition nebula;
    std::vector<StarSpec> stars;   // resolved frontier kind per component
};

// Galaxy: a nebula whose stars are all frontier stars, with no star center
// strictly between two leaves of another star.
inline std::optional<GalaxyInfo> galaxy_info(const OrderedTournament& ot) {
    auto neb = decompose_nebula(ot);
    if (!neb) return std::nullopt;
    for (const auto& sc : neb->stars)
        if (!sc.frontier()) return std::nullopt;

    // Foreign-leaf intervals; only determined (p >= 3) stars with >= 2 leaves
    // constrain anything, and for those the frontier kind is unique.
    struct Interval {
        int lo, hi;
        const StarComponent* owner;
    };
    std::vector<Interval> intervals;
    for (const auto& sc : neb->stars) {
        if (sc.verts.size() < 3) continue;
        StarKind k = sc.has_kind(StarKind::Left) ? StarKind::Left : StarKind::Right;
        auto leaves = sc.leaves_for(k);
        int lo = ot.position(leaves.front()), hi = ot.position(leaves.back());
        intervals.push_back({lo, hi, &sc});
    }

    GalaxyInfo info;
    for (const auto& sc : neb->stars) {
        StarSpec chosen;
        bool ok = false;
        for (StarKind k : {StarKind::Left, StarKind::Right}) {
            if (!sc.has_kind(k)) continue;
            int c = sc.center_for(k);
            int cp = ot.position(c);
            bool clash = false;
            for (const auto& iv : intervals)
                if (iv.owner != &sc && iv.lo < cp && cp < iv.hi) {
                    clash = true;
                    break;
                }
            if (!clash) {
                chosen.kind = k;
                chosen.center = c;
                chosen.leaves = sc.leaves_for(k);
                ok = true;
                break;
            }
        }
        if (!ok) return std::nullopt;
        info.stars.push_back(std::move(chosen));
    }
    info.nebula = std::move(*neb);
    return info;
}

inline bool is_galaxy_ordering(const OrderedTournament& ot) { return galaxy_info(ot).has_value(); }

// Path-galaxy: galaxy whose star leaves occupy consecutive positions.
inline std::optional<GalaxyInfo> path_galaxy_info(const OrderedTournament& ot) {
    auto info = galaxy_info(ot);
    if (!info) return std::nullopt;
    for (const auto& star : info->stars) {
        if (star.leaves.size() < 2) continue;
        int lo = ot.position(star.leaves.front());
        int hi = ot.position(star.leaves.back());
        if (hi - lo + 1 != (int)star.leaves.size()) return std::nullopt;
    }
    return info;
}

inline bool is_path_galaxy_ordering(const OrderedTournament& ot) {
    return path_galaxy_info(ot).has_value();
}

inline bool is_regular_path_galaxy(const OrderedTournament& ot) {
    auto info = path_galaxy_info(ot);
    if (!info) return false;
    if (!info->nebula.singletons.empty()) return false;
    if (info->nebula.stars.empty()) return true;
    size_t sz = info->nebula.stars.front().verts.size();
    for (const auto& sc : info->nebula.stars)
        if (sc.verts.size() != sz) return false;
    return true;
}

// Pair-star: five consecutive golden positions carrying exactly the two
// cross arcs (g+3 -> g, g+4 -> g+1), with the outer golden vertices as the
// two centers, each owning one nonempty consecutive run of leaves. Runs on
// the left of the golden run are beaten by their center; runs on the right
// beat it. Both runs left = right-pair-star, both right = left-pair-star,
// one each side = middle-pair-star.
struct PairStarSpec {
    StarKind kind;
    std::array<int, 5> golden{};   // positions
    int center_lo = -1, center_hi = -1;   // vertices at golden[0] and golden[4]
    std::vector<int> run1, run2;   // leaf positions, run1 positionally first
    int run1_center = 0;           // 0 or 4: which golden end owns run1

    int span_lo() const { return std::min(golden[0], run1.empty() ? golden[0] : run1.front()); }
    int span_hi() const {
        int hi = golden[4];
        if (!run1.empty()) hi = std::max(hi, run1.back());
        if (!run2.empty()) hi = std::max(hi, run2.back());
        return hi;
    }
    // The kind's 1-based position parameter: r for middle, j for left, j' for right.
    int split() const {
        if (kind == StarKind::Middle) return (int)run1.size() + 1;
        if (kind == StarKind::Left) return 5 + (int)run1.size();
        return (int)run1.size();
    }
    std::vector<int> positions() const {
        std::vector<int> ps(run1);
        ps.insert(ps.end(), golden.begin(), golden.end());
        ps.insert(ps.end(), run2.begin(), run2.end());
        std::sort(ps.begin(), ps.end());
        return ps;
    }
};

struct PairStarResult {
    std::optional<PairStarSpec> spec;
    bool golden_core_only = false;
};

namespace detail {

inline bool consecutive(const std::vector<int>& sorted) {
    for (size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] != sorted[i - 1] + 1) return false;
    return true;
}

// Attempts to read a pair-star whose golden run starts at position g.
// When require_cover is set the pair-star must use every vertex.
inline PairStarResult find_pair_star_at(const OrderedTournament& ot, int g, bool require_cover) {
    PairStarResult res;
    int n = ot.size();
    if (g < 0 || g + 4 >= n) return res;
    auto bpos = ot.backward_positions();
    std::vector<std::vector<std::pair<int, int>>> touch(n);
    for (auto& a : bpos) {
        touch[a.first].push_back(a);
        touch[a.second].push_back(a);
    }
    auto has_arc = [&](int s, int d) {
        return std::find(bpos.begin(), bpos.end(), std::make_pair(s, d)) != bpos.end();
    };
    if (!has_arc(g + 3, g) || !has_arc(g + 4, g + 1)) return res;
    if (touch[g + 1].size() != 1 || touch[g + 2].size() != 0 || touch[g + 3].size() != 1) return res;

    // Leaf arcs per center: everything incident besides the cross arc.
    auto gather = [&](int c, int cross_s, int cross_d, std::vector<int>& left,
                      std::vector<int>& right) {
        for (auto [s, d] : touch[c]) {
            if (s == cross_s && d == cross_d) continue;
            if (s == c && d < g)
                left.push_back(d);            // center beats a leaf before the golden run
            else if (d == c && s > g + 4)
                right.push_back(s);           // a leaf after the golden run beats the center
            else
                return false;
        }
        return true;
    };
    std::vector<int> l0, r0, l4, r4;
    if (!gather(g, g + 3, g, l0, r0)) return res;
    if (!gather(g + 4, g + 4, g + 1, l4, r4)) return res;
    if ((l0.empty() && r0.empty()) || (l4.empty() && r4.empty())) {
        if (l0.empty() && r0.empty() && l4.empty() && r4.empty() && (!require_cover || n == 5))
            res.golden_core_only = true;
        return res;
    }
    if ((!l0.empty() && !r0.empty()) || (!l4.empty() && !r4.empty())) return res;

    auto run_of = [&](std::vector<int> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    std::vector<int> run_c0 = run_of(l0.empty() ? r0 : l0);
    std::vector<int> run_c4 = run_of(l4.empty() ? r4 : l4);
    if (!consecutive(run_c0) || !consecutive(run_c4)) return res;

    // Every leaf hangs on its center by exactly one backward arc.
    for (int p : run_c0)
        if (touch[p].size() != 1) return res;
    for (int p : run_c4)
        if (touch[p].size() != 1) return res;

    bool c0_left = !l0.empty(), c4_left = !l4.empty();
    PairStarSpec spec;
    for (int i = 0; i < 5; ++i) spec.golden[i] = g + i;
    spec.center_lo = ot.theta.vertex_at(g);
    spec.center_hi = ot.theta.vertex_at(g + 4);
    if (c0_left != c4_left) {
        spec.kind = StarKind::Middle;
        spec.run1 = c0_left ? run_c0 : run_c4;
        spec.run2 = c0_left ? run_c4 : run_c0;
        spec.run1_center = c0_left ? 0 : 4;
    } else {
        spec.kind = c0_left ? StarKind::Right : StarKind::Left;
        if (run_c0.front() < run_c4.front()) {
            spec.run1 = run_c0;
            spec.run2 = run_c4;
            spec.run1_center = 0;
        } else {
            spec.run1 = run_c4;
            spec.run2 = run_c0;
            spec.run1_center = 4;
        }
        if (spec.run1.back() > spec.run2.front()) return res;   // runs must not interleave
    }
    if (require_cover && (int)(spec.run1.size() + spec.run2.size() + 5) != n) return res;
    res.spec = std::move(spec);
    return res;
}

} // namespace detail

// Matches the whole ordered tournament against the pair-star templates.
// A bare golden core (no leaves at all) is flagged, not accepted.
inline PairStarResult classify_pair_star_ordering(const OrderedTournament& ot) {
    PairStarResult out;
    for (int g = 0; g + 4 < ot.size(); ++g) {
        auto r = detail::find_pair_star_at(ot, g, true);
        if (r.spec) return r;
        if (r.golden_core_only) out.golden_core_only = true;
    }
    return out;
}

struct SpiralGalaxySpec {
    std::vector<PairStarSpec> pair_stars;             // positionally ordered blocks
    std::vector<StarSpec> q_stars;                    // path-galaxy stars, original labels
    std::vector<std::vector<StarKind>> q_kinds;       // per-star ambiguity sets
    VertexSet free_vertices;
};

struct UniformParams {
    int l = 0, t = 0, b = 0;
};

// Uniform: equal pair-star sizes with both centers carrying b leaves each,
// and exactly l path stars with 2|Q_i| = |S_i| - 3.
inline std::optional<UniformParams> uniform_params(const SpiralGalaxySpec& spec) {
    UniformParams up;
    up.l = (int)spec.pair_stars.size();
    up.t = (int)spec.q_stars.size();
    if (up.l != up.t) return std::nullopt;
    if (up.l == 0) return up;
    up.b = (int)spec.pair_stars[0].run1.size();
    for (const auto& ps : spec.pair_stars)
        if ((int)ps.run1.size() != up.b || (int)ps.run2.size() != up.b) return std::nullopt;
    for (const auto& q : spec.q_stars) {
        int q_size = (int)q.leaves.size() + 1;
        if (2 * q_size != (2 * up.b + 5) - 3) return std::nullopt;
    }
    return up;
}

inline bool is_uniform(const SpiralGalaxySpec& spec) { return uniform_params(spec).has_value(); }

namespace detail {

struct SubOrdered {
    OrderedTournament ot;
    std::vector<int> index_map;   // sub label -> original label
};

inline SubOrdered restrict_by_positions(const OrderedTournament& ot, const std::vector<int>& poss) {
    VertexSet vs(ot.size());
    for (int p : poss) vs.add(ot.theta.vertex_at(p));
    auto ind = induced(ot.t, vs);
    std::vector<int> sub_of(ot.size(), -1);
    for (int i = 0; i < (int)ind.index_map.size(); ++i) sub_of[ind.index_map[i]] = i;
    std::vector<int> perm;
    perm.reserve(poss.size());
    for (int p : poss) perm.push_back(sub_of[ot.theta.vertex_at(p)]);
    SubOrdered out;
    out.ot = backward_arcs(ind.t, Ordering(perm));
    out.index_map = ind.index_map;
    return out;
}

} // namespace detail

// Searches for a partition into consecutive pair-star blocks plus a
// path-galaxy remainder. Candidate pair-stars are anchored at golden cores
// and tried left to right, use-first; the first valid partition wins.
inline std::optional<SpiralGalaxySpec> is_spiral_galaxy_ordering(const OrderedTournament& ot) {
    int n = ot.size();
    std::vector<PairStarSpec> candidates;
    for (int g = 0; g + 4 < n; ++g) {
        auto r = detail::find_pair_star_at(ot, g, false);
        if (r.spec) candidates.push_back(std::move(*r.spec));
    }
    std::vector<VertexSet> cand_pos;
    for (const auto& c : candidates) {
        VertexSet s(n);
        for (int p : c.positions()) s.add(p);
        cand_pos.push_back(s);
    }

    std::vector<int> chosen;
    std::optional<SpiralGalaxySpec> found;

    auto finish = [&]() -> bool {
        std::vector<const PairStarSpec*> blocks;
        for (int i : chosen) blocks.push_back(&candidates[i]);
        std::sort(blocks.begin(), blocks.end(),
                  [](const PairStarSpec* a, const PairStarSpec* b) { return a->span_lo() < b->span_lo(); });
        for (size_t i = 1; i < blocks.size(); ++i)
            if (blocks[i - 1]->span_hi() >= blocks[i]->span_lo()) return false;

        VertexSet used(n);
        for (int i : chosen) used |= cand_pos[i];
        std::vector<int> rest;
        for (int p = 0; p < n; ++p)
            if (!used.test(p)) rest.push_back(p);

        SpiralGalaxySpec spec;
        for (auto* b : blocks) spec.pair_stars.push_back(*b);
        spec.free_vertices = VertexSet(ot.size());
        if (!rest.empty()) {
            auto sub = detail::restrict_by_positions(ot, rest);
            auto info = path_galaxy_info(sub.ot);
            if (!info) return false;
            for (size_t si = 0; si < info->stars.size(); ++si) {
                StarSpec remapped = info->stars[si];
                remapped.center = sub.index_map[remapped.center];
                for (int& v : remapped.leaves) v = sub.index_map[v];
                // Star leaves must also be consecutive under the full ordering.
                if (remapped.leaves.size() >= 2) {
                    int lo = ot.position(remapped.leaves.front());
                    int hi = ot.position(remapped.leaves.back());
                    if (hi - lo + 1 != (int)remapped.leaves.size()) return false;
                }
                spec.q_stars.push_back(remapped);
                spec.q_kinds.push_back(info->nebula.stars[si].kinds);
            }
            info->nebula.singletons.for_each(
                [&](int v) { spec.free_vertices.add(sub.index_map[v]); });
        }
        found = std::move(spec);
        return true;
    };

    auto dfs = [&](auto&& self, int i) -> bool {
        if (i == (int)candidates.size()) return finish();
        bool overlap = false;
        for (int j : chosen)
            if (cand_pos[i].intersects(cand_pos[j])) {
                overlap = true;
                break;
            }
        if (!overlap) {
            chosen.push_back(i);
            if (self(self, i + 1)) return true;
            chosen.pop_back();
        }
        return self(self, i + 1);
    };
    dfs(dfs, 0);
    return found;
}

// Whether the underlying undirected graph of the backward digraph is acyclic.
inline bool is_backward_forest(const OrderedTournament& ot) {
    int n = ot.size();
    std::vector<int> parent(n);
    for (int v = 0; v < n; ++v) parent[v] = v;
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (auto [u, v] : ot.backward) {
        int a = find(u), b = find(v);
        if (a == b) return false;
        parent[a] = b;
    }
    return true;
}

namespace detail {

// Places vertices position by position, pruning as soon as the backward
// graph acquires a cycle; first (lexicographically least) witness wins.
inline bool forest_dfs(const Tournament& t, std::vector<int>& perm, std::vector<char>& used,
                       std::vector<int>& parent) {
    int n = t.size();
    int depth = (int)perm.size();
    if (depth == n) return true;
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (int v = 0; v < n; ++v) {
        if (used[v]) continue;
        // Backward arcs added by placing v now: v -> u for placed u.
        std::vector<int> saved_parent = parent;
        bool cycle = false;
        for (int u : perm)
            if (t.arc(v, u)) {
                int a = find(v), b = find(u);
                if (a == b) {
                    cycle = true;
                    break;
                }
                parent[a] = b;
            }
        if (!cycle) {
            perm.push_back(v);
            used[v] = 1;
            if (forest_dfs(t, perm, used, parent)) return true;
            used[v] = 0;
            perm.pop_back();
        }
        parent = std::move(saved_parent);
    }
    return false;
}

} // namespace detail

inline std::optional<Ordering> find_forest_ordering(const Tournament& t, const Caps& caps = Caps(),
                                                    int jobs = 1) {
    int n = t.size();
    if (n > caps.forest_order_exact) throw SizeTooLargeForExact();
    if (n == 0) return Ordering(std::vector<int>{});
    auto try_first = [&](int first) -> std::optional<Ordering> {
        std::vector<int> perm{first};
        std::vector<char> used(n, 0);
        used[first] = 1;
        std::vector<int> parent(n);
        for (int v = 0; v < n; ++v) parent[v] = v;
        if (detail::forest_dfs(t, perm, used, parent)) return Ordering(perm);
        return std::nullopt;
    };
    if (jobs <= 1) {
        for (int v = 0; v < n; ++v)
            if (auto r = try_first(v)) return r;
        return std::nullopt;
    }
    auto results = parallel_map<std::optional<Ordering>>(n, jobs, [&](int v) { return try_first(v); });
    for (auto& r : results)
        if (r) return r;
    return std::nullopt;
}

} // namespace tourlab
