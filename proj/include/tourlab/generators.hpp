#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tourlab/structures.hpp"
#include "tourlab/tournament.hpp"

namespace tourlab {

struct SizeTooSmall : std::runtime_error {
    SizeTooSmall() : std::runtime_error("structure size too small") {}
};
struct ParamsOutOfRange : std::runtime_error {
    ParamsOutOfRange() : std::runtime_error("generator parameters out of range") {}
};
struct MalformedSigma : std::runtime_error {
    explicit MalformedSigma(const std::string& what) : std::runtime_error(what) {}
};

// xorshift64* with a fixed odd fallback state for seed 0. The recurrence is
// documented in the README so outputs are reproducible across implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : s_(seed ? seed : 0x9E3779B97F4A7C15ull) {}
    uint64_t next() {
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545F4914F6CDD1Dull;
    }
    bool bit() { return next() >> 63; }

private:
    uint64_t s_;
};

// Non-backward pairs in all structure generators are oriented low position
// to high position; only the backward template is constrained.
namespace detail {

inline Tournament forward_complete(int n) {
    Tournament t(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) t.set_arc(i, j);
    return t;
}

} // namespace detail

// Star on p positions with theta = identity. middle_split is the 0-based
// center position for middle stars.
inline OrderedTournament make_star(StarKind kind, int p, int middle_split = 1) {
    if (p < 2 || (kind == StarKind::Middle && p < 3)) throw SizeTooSmall();
    if (kind == StarKind::Middle && (middle_split < 1 || middle_split > p - 2))
        throw ParamsOutOfRange();
    Tournament t = detail::forward_complete(p);
    if (kind == StarKind::Right) {
        for (int i = 0; i < p - 1; ++i) t.set_arc(p - 1, i);
    } else if (kind == StarKind::Left) {
        for (int i = 1; i < p; ++i) t.set_arc(i, 0);
    } else {
        for (int i = middle_split + 1; i < p; ++i) t.set_arc(i, middle_split);
        for (int i = 0; i < middle_split; ++i) t.set_arc(middle_split, i);
    }
    return backward_arcs(t, Ordering::identity(p));
}

namespace detail {

struct PairStarLayout {
    int golden_start;                 // 0-based
    std::vector<int> run1, run2;      // positions
};

inline PairStarLayout pair_star_layout(StarKind kind, int t, int split_1b) {
    PairStarLayout lay;
    auto range = [](int lo, int hi) {   // inclusive
        std::vector<int> v;
        for (int p = lo; p <= hi; ++p) v.push_back(p);
        return v;
    };
    if (kind == StarKind::Middle) {
        if (split_1b < 2 || split_1b > t - 5) throw ParamsOutOfRange();
        lay.golden_start = split_1b - 1;
        lay.run1 = range(0, split_1b - 2);
        lay.run2 = range(split_1b + 4, t - 1);
    } else if (kind == StarKind::Left) {
        if (split_1b < 6 || split_1b > t - 1) throw ParamsOutOfRange();
        lay.golden_start = 0;
        lay.run1 = range(5, split_1b - 1);
        lay.run2 = range(split_1b, t - 1);
    } else {
        if (split_1b < 1 || split_1b > t - 6) throw ParamsOutOfRange();
        lay.golden_start = t - 5;
        lay.run1 = range(0, split_1b - 1);
        lay.run2 = range(split_1b, t - 6);
    }
    return lay;
}

// Applies one pair-star's backward template onto positions base..base+t-1.
inline void apply_pair_star(Tournament& t, int base, StarKind kind, const PairStarLayout& lay,
                            int run1_center) {
    int g = base + lay.golden_start;
    t.set_arc(g + 3, g);
    t.set_arc(g + 4, g + 1);
    auto attach = [&](const std::vector<int>& run, int center_pos) {
        for (int p : run) {
            int leaf = base + p;
            if (leaf < g)
                t.set_arc(center_pos, leaf);   // leaves before the golden run are beaten
            else
                t.set_arc(leaf, center_pos);   // leaves after it beat their center
        }
    };
    int c1 = run1_center == 0 ? g : g + 4;
    int c2 = run1_center == 0 ? g + 4 : g;
    attach(lay.run1, c1);
    attach(lay.run2, c2);
}

inline int default_run1_center(StarKind kind) { return kind == StarKind::Middle ? 0 : 4; }

} // namespace detail

// Pair-star on 2b+5 positions; split is the kind's 1-based position
// parameter (r for middle, j for left, j' for right; -1 picks the symmetric
// default). run1_center chooses which center owns the first run.
inline OrderedTournament make_pair_star(StarKind kind, int b, int split_1b = -1,
                                        int run1_center = -1) {
    if (b < 1) throw ParamsOutOfRange();
    int t_size = 2 * b + 5;
    if (split_1b < 0) split_1b = kind == StarKind::Middle ? b + 1 : (kind == StarKind::Left ? 5 + b : b);
    if (run1_center < 0) run1_center = detail::default_run1_center(kind);
    if (run1_center != 0 && run1_center != 4) throw ParamsOutOfRange();
    auto lay = detail::pair_star_layout(kind, t_size, split_1b);
    Tournament t = detail::forward_complete(t_size);
    detail::apply_pair_star(t, 0, kind, lay, run1_center);
    return backward_arcs(t, Ordering::identity(t_size));
}

struct UniformSpiralParams {
    int l = 1;                          // pair-star count
    int b = 1;                          // leaves per center
    std::vector<StarKind> kinds;        // per pair-star; default middle
    std::vector<StarKind> q_kinds;      // per path star, left/right; default right
    std::vector<int> run1_centers;      // per pair-star variant; default paper layout
};

struct GeneratedSpiral {
    Tournament t;
    Ordering theta;
    UniformSpiralParams params;
    std::vector<int> block_starts;      // position of each pair-star block
    std::vector<int> q_starts;          // position of each path star
};

// Uniform spiral galaxy: blocks S_1 Q_1 S_2 Q_2 ... with |S_i| = 2b+5 and
// |Q_i| = b+1, so h = l(3b+6).
inline GeneratedSpiral make_uniform_spiral(UniformSpiralParams params) {
    if (params.l < 0 || params.b < 1) throw ParamsOutOfRange();
    if (params.kinds.empty()) params.kinds.assign(params.l, StarKind::Middle);
    if (params.q_kinds.empty()) params.q_kinds.assign(params.l, StarKind::Right);
    if (params.run1_centers.empty()) {
        params.run1_centers.clear();
        for (int i = 0; i < params.l; ++i)
            params.run1_centers.push_back(detail::default_run1_center(params.kinds[i]));
    }
    if ((int)params.kinds.size() != params.l || (int)params.q_kinds.size() != params.l ||
        (int)params.run1_centers.size() != params.l)
        throw ParamsOutOfRange();
    for (StarKind qk : params.q_kinds)
        if (qk == StarKind::Middle) throw ParamsOutOfRange();

    int b = params.b;
    int s_size = 2 * b + 5, q_size = b + 1;
    int h = params.l * (s_size + q_size);
    Tournament t = detail::forward_complete(h);
    GeneratedSpiral out;
    int base = 0;
    for (int i = 0; i < params.l; ++i) {
        StarKind kind = params.kinds[i];
        int split = kind == StarKind::Middle ? b + 1 : (kind == StarKind::Left ? 5 + b : b);
        auto lay = detail::pair_star_layout(kind, s_size, split);
        detail::apply_pair_star(t, base, kind, lay, params.run1_centers[i]);
        out.block_starts.push_back(base);
        base += s_size;
        out.q_starts.push_back(base);
        if (params.q_kinds[i] == StarKind::Right) {
            int center = base + q_size - 1;
            for (int p = base; p < center; ++p) t.set_arc(center, p);
        } else {
            int center = base;
            for (int p = base + 1; p < base + q_size; ++p) t.set_arc(p, center);
        }
        base += q_size;
    }
    out.t = std::move(t);
    out.theta = Ordering::identity(h);
    out.params = std::move(params);
    return out;
}

inline Tournament transitive_tournament(int n) {
    if (n < 1) throw ParamsOutOfRange();
    return detail::forward_complete(n);
}

// One pseudorandom bit per unordered pair, row-major; deterministic per seed.
inline Tournament random_tournament(int n, uint64_t seed) {
    if (n < 1) throw ParamsOutOfRange();
    Tournament t(n);
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (rng.bit())
                t.set_arc(i, j);
            else
                t.set_arc(j, i);
        }
    return t;
}

struct LayeredHostSpec {
    std::vector<int> block_sizes;
    double forward_bias = 1.0;   // cross-block pairs oriented forward with this probability
    uint64_t seed = 0;
};

struct LayeredHost {
    Tournament t;
    std::vector<VertexSet> blocks;
};

// Blocks are consecutive vertex ranges. Within a block the orientation is a
// fair coin; across blocks i < j the arc points forward with probability
// forward_bias, independently per pair, row-major draw order.
inline LayeredHost make_layered_host(const LayeredHostSpec& spec) {
    int n = 0;
    for (int s : spec.block_sizes) {
        if (s <= 0) throw ParamsOutOfRange();
        n += s;
    }
    if (n == 0 || spec.forward_bias < 0.0 || spec.forward_bias > 1.0) throw ParamsOutOfRange();
    LayeredHost host;
    host.t = Tournament(n);
    std::vector<int> block_of(n);
    int v = 0;
    for (int bi = 0; bi < (int)spec.block_sizes.size(); ++bi) {
        VertexSet bs(n);
        for (int k = 0; k < spec.block_sizes[bi]; ++k) {
            block_of[v] = bi;
            bs.add(v);
            ++v;
        }
        host.blocks.push_back(bs);
    }
    Rng rng(spec.seed);
    bool always = spec.forward_bias >= 1.0, never = spec.forward_bias <= 0.0;
    uint64_t threshold = always || never
                             ? 0
                             : (uint64_t)((long double)spec.forward_bias * 18446744073709551615.0L);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool forward;
            if (block_of[i] == block_of[j])
                forward = rng.bit();
            else if (always)
                forward = true;
            else if (never)
                forward = false;
            else
                forward = rng.next() < threshold;
            if (forward)
                host.t.set_arc(i, j);
            else
                host.t.set_arc(j, i);
        }
    return host;
}

struct HPlusResult {
    Tournament t;
    Ordering sigma_plus;
    std::vector<int> old_to_new_label;   // identity: old labels are preserved
    int added = 0;
};

// Blows the path-galaxy part of (H, sigma) up: every star of H|V1 under the
// restriction of sigma gains tau = 2^(b-1) - b fresh leaves inserted just
// before its first leaf, attached to the center with the star's own leaf
// orientation. New vertices take labels h, h+1, ...
inline HPlusResult make_h_plus(const Tournament& h, const Ordering& sigma, const VertexSet& v1,
                               int b) {
    if (b < 1) throw ParamsOutOfRange();
    sigma.validate(h.size());
    auto ot = backward_arcs(h, sigma);
    for (auto [u, v] : ot.backward)
        if (v1.test(u) != v1.test(v))
            throw MalformedSigma("backward arc crosses the path-galaxy part");
    std::vector<int> v1_positions;
    for (int p = 0; p < h.size(); ++p)
        if (v1.test(sigma.vertex_at(p))) v1_positions.push_back(p);

    std::vector<StarSpec> stars;
    if (!v1_positions.empty()) {
        auto sub = detail::restrict_by_positions(ot, v1_positions);
        auto info = path_galaxy_info(sub.ot);
        if (!info) throw MalformedSigma("H|V1 is not a path-galaxy under sigma");
        for (auto star : info->stars) {
            star.center = sub.index_map[star.center];
            for (int& v : star.leaves) v = sub.index_map[v];
            stars.push_back(std::move(star));
        }
    }

    int tau = (1 << (b - 1)) - b;
    HPlusResult out;
    out.added = tau * (int)stars.size();
    int n_old = h.size(), n_new = n_old + out.added;
    out.old_to_new_label.resize(n_old);
    for (int v = 0; v < n_old; ++v) out.old_to_new_label[v] = v;

    // sigma+ : insert tau new labels just before each star's first leaf.
    std::vector<std::vector<int>> insert_before(n_old);
    int next_label = n_old;
    std::vector<std::pair<int, int>> new_leaf_center;   // (new label, center)
    for (const auto& star : stars) {
        if (star.leaves.empty()) continue;
        int first_leaf = star.leaves.front();
        for (int k = 0; k < tau; ++k) {
            insert_before[first_leaf].push_back(next_label);
            new_leaf_center.emplace_back(next_label, star.center);
            ++next_label;
        }
    }
    std::vector<int> perm;
    perm.reserve(n_new);
    for (int p = 0; p < n_old; ++p) {
        int v = sigma.vertex_at(p);
        for (int nl : insert_before[v]) perm.push_back(nl);
        perm.push_back(v);
    }
    out.sigma_plus = Ordering(perm);

    std::vector<int> pos(n_new);
    for (int p = 0; p < n_new; ++p) pos[perm[p]] = p;
    out.t = Tournament(n_new);
    for (int u = 0; u < n_old; ++u)
        for (int v = u + 1; v < n_old; ++v) {
            if (h.arc(u, v))
                out.t.set_arc(u, v);
            else
                out.t.set_arc(v, u);
        }
    for (int u = 0; u < n_new; ++u)
        for (int v = u + 1; v < n_new; ++v) {
            if (u < n_old && v < n_old) continue;
            if (pos[u] < pos[v])
                out.t.set_arc(u, v);
            else
                out.t.set_arc(v, u);
        }
    for (auto [leaf, center] : new_leaf_center) {
        if (pos[leaf] < pos[center])
            out.t.set_arc(center, leaf);
        else
            out.t.set_arc(leaf, center);
    }
    return out;
}

} // namespace tourlab
