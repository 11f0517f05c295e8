#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tourlab/generators.hpp"
#include "tourlab/invariants.hpp"
#include "tourlab/rational.hpp"
#include "tourlab/tournament.hpp"

namespace tourlab {

struct BlocksOverlap : std::runtime_error {
    BlocksOverlap() : std::runtime_error("structure blocks overlap") {}
};
struct VertexNotInStructure : std::runtime_error {
    VertexNotInStructure() : std::runtime_error("vertex lies in no other block") {}
};
struct GammaViolated : std::runtime_error {
    GammaViolated() : std::runtime_error("subset smaller than gamma fraction of its block") {}
};

// Disjoint blocks (A_1, ..., A_|w|): linear blocks (w_i = 0) have size >= c*n,
// transitive blocks (w_i = 1) are transitive of size >= c*tr(T), and every
// vertex sees every other block with one-directional density >= 1 - lambda.
struct SmoothStructure {
    std::vector<VertexSet> blocks;
    std::vector<uint8_t> w;
    Rational c;
    Rational lambda;
};

struct SmoothViolation {
    enum class Kind { LinearSize, TransitiveBlock, TransitiveSize, Density } kind;
    int block_i = -1;
    int block_j = -1;       // density violations only
    int vertex = -1;        // density violations only
    Rational measured;

    std::string describe() const {
        switch (kind) {
            case Kind::LinearSize:
                return "linear block " + std::to_string(block_i) + " below c*n";
            case Kind::TransitiveBlock:
                return "block " + std::to_string(block_i) + " not transitive";
            case Kind::TransitiveSize:
                return "transitive block " + std::to_string(block_i) + " below c*tr";
            default:
                return "density " + measured.str() + " below 1-lambda at vertex " +
                       std::to_string(vertex) + " against block " + std::to_string(block_j);
        }
    }
};

struct SmoothReport {
    bool valid = true;
    std::optional<SmoothViolation> violation;
};

// Checks all three conditions with exact rationals, reporting the earliest
// violation in (sizes, transitivity, density) order with density scanned by
// (i, j, vertex-of-i, vertex-of-j).
inline SmoothReport verify_smooth(const Tournament& t, const SmoothStructure& s,
                                  const Caps& caps = Caps()) {
    int n = t.size();
    size_t k = s.blocks.size();
    if (s.w.size() != k) throw std::invalid_argument("w length mismatch");
    VertexSet seen(n);
    for (const auto& b : s.blocks) {
        if (seen.intersects(b)) throw BlocksOverlap();
        seen |= b;
    }
    auto fail = [](SmoothViolation v) {
        SmoothReport r;
        r.valid = false;
        r.violation = v;
        return r;
    };
    int tr = -1;   // computed on demand; transitive blocks only
    for (size_t i = 0; i < k; ++i) {
        int size = s.blocks[i].count();
        if (s.w[i] == 0) {
            if (Rational(size) < s.c * Rational(n))
                return fail({SmoothViolation::Kind::LinearSize, (int)i, -1, -1, Rational(size)});
        } else {
            if (!is_transitive(induced(t, s.blocks[i]).t))
                return fail({SmoothViolation::Kind::TransitiveBlock, (int)i, -1, -1, Rational(0)});
            if (tr < 0) tr = max_transitive(t, caps).size;
            if (Rational(size) < s.c * Rational(tr))
                return fail({SmoothViolation::Kind::TransitiveSize, (int)i, -1, -1, Rational(size)});
        }
    }
    Rational need = Rational(1) - s.lambda;
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j) {
            int nj = s.blocks[j].count(), ni = s.blocks[i].count();
            std::optional<SmoothViolation> first;
            s.blocks[i].for_each([&](int v) {
                if (first) return;
                int fwd = t.out_neighbors_in(v, s.blocks[j]).count();
                Rational d(fwd, nj);
                if (d < need)
                    first = SmoothViolation{SmoothViolation::Kind::Density, (int)i, (int)j, v, d};
            });
            if (first) return fail(*first);
            s.blocks[j].for_each([&](int v) {
                if (first) return;
                int in = t.in_neighbors_in(v, s.blocks[i]).count();
                Rational d(in, ni);
                if (d < need)
                    first = SmoothViolation{SmoothViolation::Kind::Density, (int)i, (int)j, v, d};
            });
            if (first) return fail(*first);
        }
    return SmoothReport{};
}

namespace detail {

inline int block_of(const SmoothStructure& s, int v) {
    for (size_t i = 0; i < s.blocks.size(); ++i)
        if (s.blocks[i].test(v)) return (int)i;
    return -1;
}

} // namespace detail

// The slice of block j through v: members of A_j adjacent from v when v sits
// in an earlier block, adjacent to v when it sits in a later one.
inline VertexSet block_slice(const Tournament& t, const SmoothStructure& s, int j, int v) {
    int i = detail::block_of(s, v);
    if (i < 0 || i == j) throw VertexNotInStructure();
    return i < j ? t.out_neighbors_in(v, s.blocks[j]) : t.in_neighbors_in(v, s.blocks[j]);
}

struct SliceBound {
    long long measured = 0;
    Rational bound;
    VertexSet common;
};

// Intersection of the probes' slices restricted to S*_j, against the
// guaranteed floor (1 - k*lambda/gamma) * |S*_j|.
inline SliceBound common_slice_bound(const Tournament& t, const SmoothStructure& s, int j,
                                     const VertexSet& s_star, const Rational& gamma,
                                     const std::vector<int>& probes) {
    if (!s_star.subset_of(s.blocks[j])) throw std::invalid_argument("S* not inside block j");
    if (Rational(s_star.count()) < gamma * Rational(s.blocks[j].count())) throw GammaViolated();
    VertexSet common = s_star;
    for (int x : probes) common &= block_slice(t, s, j, x);
    SliceBound out;
    out.measured = common.count();
    long long k = (long long)probes.size();
    out.bound = (Rational(1) - Rational(k) * s.lambda / gamma) * Rational(s_star.count());
    out.common = common;
    return out;
}

// Restarted greedy finder for all-linear structures: order the vertices, cut
// into |w| contiguous chunks, evict per-vertex density violators, verify.
// The first restart orders by descending out-degree (which recovers layered
// hosts directly); later restarts shuffle. A returned structure always
// passes verify_smooth; absence claims nothing.
inline std::optional<SmoothStructure> find_smooth_structure(const Tournament& t, int w_len,
                                                            const Rational& c,
                                                            const Rational& lambda, int budget,
                                                            uint64_t seed,
                                                            const Caps& caps = Caps()) {
    if (w_len < 1) throw std::invalid_argument("w must be nonempty");
    int n = t.size();
    for (int restart = 0; restart < budget; ++restart) {
        Rng rng(seed + (uint64_t)restart * 0x9E3779B97F4A7C15ull);
        std::vector<int> order(n);
        for (int v = 0; v < n; ++v) order[v] = v;
        if (restart == 0) {
            std::vector<int> deg(n);
            for (int v = 0; v < n; ++v) deg[v] = t.out_degree(v);
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return deg[a] > deg[b]; });
        } else {
            for (int v = n - 1; v > 0; --v)
                std::swap(order[v], order[rng.next() % (uint64_t)(v + 1)]);
        }

        SmoothStructure s;
        s.c = c;
        s.lambda = lambda;
        s.w.assign(w_len, 0);
        int base = n / w_len, extra = n % w_len, at = 0;
        for (int i = 0; i < w_len; ++i) {
            int len = base + (i < extra ? 1 : 0);
            VertexSet b(n);
            for (int k2 = 0; k2 < len; ++k2) b.add(order[at++]);
            s.blocks.push_back(b);
        }

        Rational need = Rational(1) - lambda;
        bool alive = true;
        for (int pass = 0; pass < n && alive; ++pass) {
            bool evicted = false;
            for (int i = 0; i < w_len && alive; ++i)
                for (int j = i + 1; j < w_len && alive; ++j) {
                    int nj = s.blocks[j].count(), ni = s.blocks[i].count();
                    std::vector<int> bad_i, bad_j;
                    s.blocks[i].for_each([&](int v) {
                        if (Rational(t.out_neighbors_in(v, s.blocks[j]).count(), nj) < need)
                            bad_i.push_back(v);
                    });
                    for (int v : bad_i) s.blocks[i].remove(v);
                    s.blocks[j].for_each([&](int v) {
                        if (Rational(t.in_neighbors_in(v, s.blocks[i]).count(), ni) < need)
                            bad_j.push_back(v);
                    });
                    for (int v : bad_j) s.blocks[j].remove(v);
                    evicted = evicted || !bad_i.empty() || !bad_j.empty();
                    for (int idx : {i, j})
                        if (Rational(s.blocks[idx].count()) < c * Rational(n)) alive = false;
                }
            if (!evicted) break;
        }
        if (!alive) continue;
        if (verify_smooth(t, s, caps).valid) return s;
    }
    return std::nullopt;
}

// Constants used by the embedding pipeline, all derived from (b, l):
//   rho = 2^(b-1), tau = rho - b, xi = 2^b + 5, nu = 3l(rho + 1),
//   |w| = nu(l*xi + 1) + l*xi, h = l(3b+6), lambda = 1/h,
//   alpha = min(1/(30(rho+2)), (b+1)/(h(rho+1))).
struct EmbeddingParameters {
    int b = 0, l = 0, h = 0;
    int rho = 0, tau = 0, xi = 0, nu = 0;
    long long w_len = 0;
    Rational lambda;
    Rational alpha;
};

inline EmbeddingParameters params_from(int b, int l) {
    if (b < 1 || l < 1) throw ParamsOutOfRange();
    EmbeddingParameters p;
    p.b = b;
    p.l = l;
    p.h = l * (3 * b + 6);
    p.rho = 1 << (b - 1);
    p.tau = p.rho - b;
    p.xi = (1 << b) + 5;
    p.nu = 3 * l * (p.rho + 1);
    p.w_len = (long long)p.nu * ((long long)l * p.xi + 1) + (long long)l * p.xi;
    p.lambda = Rational(1, p.h);
    Rational a1(1, 30LL * (p.rho + 2));
    Rational a2(b + 1, (long long)p.h * (p.rho + 1));
    p.alpha = a1 < a2 ? a1 : a2;
    return p;
}

} // namespace tourlab
