#pragma once

// The embedding dichotomy. Given a host tournament carrying a verified
// smooth structure and a spiral-galaxy pattern H with its ordering, the
// pipeline either produces a verified induced copy of H or a verified pure
// pair of order >= the configured floor:
//
//   1. select every (gap+1)-th block of the structure as working blocks;
//   2. embed the pair-star blocks of H one at a time, leaf runs through
//      coherent selection plus transitive extraction, refining later blocks
//      through slices after every step (a reduced copy: arcs inside each
//      sister-leaf group and to its golden leaf stay unconstrained);
//   3. per pair-star, either the two unconstrained run/golden-leaf contacts
//      came out right (keep all 2b+5 vertices) or prune it to a 3-vertex
//      witness; resolve the unique reordering of H (golden runs of pruned
//      pair-stars shuffled by (s4 s1 s3 s5 s2)) that splits H into the
//      surviving part and a path-galaxy remainder;
//   4. blow each remainder star up to 2^(b-1) leaf candidates, assign fresh
//      blocks between the anchors, embed star by star, and merge.
//
// Every stage validates its output against the host; any selection step may
// instead surface a pure pair, which is verified and returned immediately.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tourlab/generators.hpp"
#include "tourlab/invariants.hpp"
#include "tourlab/smooth.hpp"
#include "tourlab/structures.hpp"
#include "tourlab/tournament.hpp"

namespace tourlab {

struct StructureNotSmooth : std::runtime_error {
    explicit StructureNotSmooth(const std::string& what)
        : std::runtime_error("structure not smooth: " + what) {}
};
struct PatternNotSpiral : std::runtime_error {
    PatternNotSpiral() : std::runtime_error("pattern is not a spiral galaxy under its ordering") {}
};
struct ResolutionFailed : std::runtime_error {
    explicit ResolutionFailed(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Coherent selection

enum class Dir { To, From };   // To: pivot -> partner; From: partner -> pivot

struct Chosen {
    int pivot = -1;
    std::vector<int> partners;
};

struct SelectionOutcome {
    std::optional<Chosen> chosen;
    std::optional<PurePair> pure;
    bool exhausted = false;
};

// Picks the lowest-labeled vertex of A with one partner of the required
// orientation in every B_i (lowest-labeled partners). When no vertex
// qualifies, the failing side is a complete block pair: the first i whose
// blocked subset A_i reaches the floor is returned as a pure pair.
inline SelectionOutcome select_complete_vertex(const Tournament& t, const VertexSet& a,
                                               const std::vector<VertexSet>& bs,
                                               const std::vector<Dir>& dirs,
                                               long long floor_count) {
    if (bs.size() != dirs.size()) throw std::invalid_argument("one direction per block");
    SelectionOutcome out;
    int n = t.size();
    for (int v = a.lowest(); v != -1; v = a.next_above(v)) {
        Chosen c;
        c.pivot = v;
        bool ok = true;
        for (size_t i = 0; i < bs.size(); ++i) {
            VertexSet options =
                dirs[i] == Dir::To ? t.out_neighbors_in(v, bs[i]) : t.in_neighbors_in(v, bs[i]);
            int p = options.lowest();
            if (p == -1) {
                ok = false;
                break;
            }
            c.partners.push_back(p);
        }
        if (ok) {
            out.chosen = std::move(c);
            return out;
        }
    }
    for (size_t i = 0; i < bs.size(); ++i) {
        VertexSet blocked(n);
        a.for_each([&](int v) {
            VertexSet options =
                dirs[i] == Dir::To ? t.out_neighbors_in(v, bs[i]) : t.in_neighbors_in(v, bs[i]);
            if (options.empty()) blocked.add(v);
        });
        if ((long long)blocked.count() >= floor_count && !blocked.empty() && !bs[i].empty()) {
            PurePair p;
            if (dirs[i] == Dir::To) {   // B_i complete to the blocked set
                p.a = bs[i];
                p.b = blocked;
            } else {                    // blocked set complete to B_i
                p.a = blocked;
                p.b = bs[i];
            }
            p.order = std::min(p.a.count(), p.b.count());
            if (!p.verify(t)) throw std::logic_error("selection produced an impure pair");
            out.pure = std::move(p);
            return out;
        }
    }
    out.exhausted = true;
    return out;
}

// ---------------------------------------------------------------------------
// Uniformization

struct UniformSpiral {
    Tournament h;
    Ordering theta;
    SpiralGalaxySpec spec;
    UniformParams up;
};

struct Uniformized {
    UniformSpiral us;
    std::vector<int> injection;   // original H vertex -> uniform H vertex
};

// Embeds a spiral galaxy into a uniform one: every leaf run is padded to a
// common b, star counts are balanced (extra path stars appended; extra
// pair-stars appended when the path part is longer), and the injection of
// the original vertices is tracked. Free vertices stay free.
inline Uniformized uniformize_spiral(const Tournament& h, const Ordering& theta,
                                     const SpiralGalaxySpec& spec) {
    int l = (int)spec.pair_stars.size();
    int t_stars = (int)spec.q_stars.size();
    int b = 1;
    for (const auto& ps : spec.pair_stars)
        b = std::max({b, (int)ps.run1.size(), (int)ps.run2.size()});
    for (const auto& q : spec.q_stars) b = std::max(b, (int)q.leaves.size());

    auto ot = backward_arcs(h, theta);

    // items[i] describes what sits at new position i, built around theta.
    struct Item {
        int old_vertex = -1;       // >= 0 for original vertices
        int center_pos_old = -1;   // pad leaves: theta position of their center
        bool center_beats_leaf = false;
    };
    std::vector<std::vector<Item>> before(h.size() + 1);   // pads inserted before position p
    auto pad_run = [&](const std::vector<int>& run_positions, int center_pos, int count) {
        int at = run_positions.empty() ? -1 : run_positions.front();
        if (at < 0) return;
        for (int k = 0; k < count; ++k) {
            Item it;
            it.center_pos_old = center_pos;
            it.center_beats_leaf = center_pos > at;   // center after leaf beats it
            before[at].push_back(it);
        }
    };
    for (const auto& ps : spec.pair_stars) {
        int c1 = ps.run1_center == 0 ? ps.golden[0] : ps.golden[4];
        int c2 = ps.run1_center == 0 ? ps.golden[4] : ps.golden[0];
        pad_run(ps.run1, c1, b - (int)ps.run1.size());
        pad_run(ps.run2, c2, b - (int)ps.run2.size());
    }
    for (const auto& q : spec.q_stars) {
        std::vector<int> leaf_pos;
        for (int v : q.leaves) leaf_pos.push_back(ot.position(v));
        std::sort(leaf_pos.begin(), leaf_pos.end());
        pad_run(leaf_pos, ot.position(q.center), b - (int)leaf_pos.size());
    }

    std::vector<Item> items;
    for (int p = 0; p < h.size(); ++p) {
        for (auto& it : before[p]) items.push_back(it);
        Item orig;
        orig.old_vertex = theta.vertex_at(p);
        items.push_back(orig);
    }
    // Balance star counts at the tail.
    int appended_q = std::max(0, l - t_stars);
    int appended_pairs = std::max(0, t_stars - l);
    if (l == 0) appended_pairs = 0;   // a pure path part runs without pair-stars
    for (int k = 0; k < appended_q; ++k)
        for (int i = 0; i < b + 1; ++i) items.push_back(Item{});   // right star: b leaves, center
    // Appended pair-stars: middle kind, golden in the middle of 2b leaves.
    std::vector<std::pair<int, int>> extra_backward;   // by new positions
    for (int k = 0; k < appended_pairs; ++k) {
        int base = (int)items.size();
        for (int i = 0; i < 2 * b + 5; ++i) items.push_back(Item{});
        int g = base + b;
        extra_backward.push_back({g + 3, g});
        extra_backward.push_back({g + 4, g + 1});
        for (int i = 0; i < b; ++i) extra_backward.push_back({g, base + i});
        for (int i = 0; i < b; ++i) extra_backward.push_back({base + 2 * b + 5 - 1 - i, g + 4});
    }
    // Appended path stars register their center arcs by new position.
    {
        int cursor = (int)(items.size() - appended_pairs * (2 * b + 5));
        cursor -= appended_q * (b + 1);
        for (int k = 0; k < appended_q; ++k) {
            int center = cursor + b;
            for (int i = 0; i < b; ++i) extra_backward.push_back({center, cursor + i});
            cursor += b + 1;
        }
    }

    int n_new = (int)items.size();
    std::vector<int> new_pos_of_old(h.size(), -1);
    for (int p = 0; p < n_new; ++p)
        if (items[p].old_vertex >= 0) new_pos_of_old[items[p].old_vertex] = p;

    Tournament uh = detail::forward_complete(n_new);
    // Original arcs, re-seated at new positions.
    for (int u = 0; u < h.size(); ++u)
        for (int v = 0; v < h.size(); ++v)
            if (u != v && h.arc(u, v)) uh.set_arc(new_pos_of_old[u], new_pos_of_old[v]);
    // Pad-leaf arcs onto their centers.
    for (int p = 0; p < n_new; ++p) {
        const Item& it = items[p];
        if (it.old_vertex >= 0 || it.center_pos_old < 0) continue;
        int c = new_pos_of_old[theta.vertex_at(it.center_pos_old)];
        if (it.center_beats_leaf)
            uh.set_arc(c, p);
        else
            uh.set_arc(p, c);
    }
    for (auto [s, d] : extra_backward) uh.set_arc(s, d);

    auto uot = backward_arcs(uh, Ordering::identity(n_new));
    auto uspec = is_spiral_galaxy_ordering(uot);
    if (!uspec) throw std::logic_error("uniformization lost the spiral structure");
    Uniformized out;
    if (l == 0) {
        // A pure path part never gains pair-stars; it only needs equal stars.
        for (const auto& q : uspec->q_stars)
            if ((int)q.leaves.size() != b)
                throw std::logic_error("uniformization failed to equalize path stars");
        out.us.up = UniformParams{0, (int)uspec->q_stars.size(), b};
    } else {
        if (!is_uniform(*uspec))
            throw std::logic_error("uniformization failed to produce a uniform spiral galaxy");
        out.us.up = *uniform_params(*uspec);
    }
    out.us.h = std::move(uh);
    out.us.theta = Ordering::identity(n_new);
    out.us.spec = std::move(*uspec);
    out.injection = new_pos_of_old;
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineConfig {
    int gap = -1;                  // blocks held in reserve between working blocks; default nu
    long long floor_count = -1;    // pure-pair floor; default ceil(alpha * c * n)
    Caps caps;
};

struct EmbedTrace {
    std::vector<int> w_blocks;
    struct PairStarStage {
        std::vector<int> vertices;   // host vertices in block order
        std::vector<int> blocks;     // matching structure indices
        bool pruned = false;
        std::vector<int> kept;       // surviving host vertices
    };
    std::vector<PairStarStage> pair_stars;
    std::vector<int> phi_tilde;      // surviving vertices in block order
    std::vector<int> phi_star;       // after transitive regrouping
    uint32_t sigma_mask = 0;         // pair-stars whose golden run was reordered
    std::vector<int> sigma;          // resolved ordering of the uniform pattern
    std::vector<int> v1, v2;
    int h_plus_added = 0;
    std::vector<std::pair<int, int>> enrichment;   // (sigma+ position, structure block)
    struct PathStage {
        std::vector<int> vertices;
        std::vector<int> blocks;
    };
    std::vector<PathStage> path_stars;
    std::vector<std::string> waived;
};

struct EmbedResult {
    enum class Variant { Copy, Pure, Failure } variant = Variant::Failure;
    std::vector<int> map;        // pattern vertex -> host vertex
    PurePair pure;
    long long floor_used = 0;
    std::string reason;
    EmbedTrace trace;
};

namespace detail {

struct PureSignal {
    PurePair pair;
};
struct FailSignal {
    std::string reason;
};

struct SlotPlan {
    std::vector<int> run1, run2;   // 0-based slot offsets within the xi-window
    int g[5];
};

inline SlotPlan slot_plan(StarKind kind, int rho) {
    SlotPlan p;
    auto fill = [](std::vector<int>& v, int lo, int count) {
        for (int i = 0; i < count; ++i) v.push_back(lo + i);
    };
    if (kind == StarKind::Middle) {
        fill(p.run1, 0, rho);
        for (int i = 0; i < 5; ++i) p.g[i] = rho + i;
        fill(p.run2, rho + 5, rho);
    } else if (kind == StarKind::Right) {
        fill(p.run1, 0, rho);
        fill(p.run2, rho, rho);
        for (int i = 0; i < 5; ++i) p.g[i] = 2 * rho + i;
    } else {
        for (int i = 0; i < 5; ++i) p.g[i] = i;
        fill(p.run1, 5, rho);
        fill(p.run2, rho + 5, rho);
    }
    return p;
}

} // namespace detail

class EmbedPipeline {
public:
    EmbedPipeline(const Tournament& host, const SmoothStructure& chi, UniformSpiral us,
                  PipelineConfig cfg)
        : host_(host), chi_(chi), us_(std::move(us)), cfg_(cfg) {
        b_ = std::max(1, us_.up.b);
        l_ = us_.up.l;
        rho_ = 1 << (b_ - 1);
        xi_ = (1 << b_) + 5;
        int h = us_.h.size();
        nu_ = 3 * std::max(1, l_) * (rho_ + 1);
        gap_ = cfg_.gap >= 0 ? cfg_.gap : nu_;
        if (cfg_.gap >= 0 && cfg_.gap != nu_)
            trace_.waived.push_back("reserve gap " + std::to_string(gap_) + " instead of nu = " +
                                    std::to_string(nu_));
        Rational alpha = h > 0 ? alpha_for(b_, h) : Rational(1);
        Rational target = alpha * chi_.c * Rational(host_.size());
        long long def = (target.num() + target.den() - 1) / target.den();
        floor_ = cfg_.floor_count >= 0 ? cfg_.floor_count : std::max(1LL, def);
        if (cfg_.floor_count >= 0)
            trace_.waived.push_back("pure-pair floor " + std::to_string(floor_) +
                                    " instead of ceil(alpha*c*n) = " +
                                    std::to_string(std::max(1LL, def)));
    }

    static Rational alpha_for(int b, int h) {
        int rho = 1 << (b - 1);
        Rational a1(1, 30LL * (rho + 2));
        Rational a2(b + 1, (long long)h * (rho + 1));
        return a1 < a2 ? a1 : a2;
    }

    EmbedResult run() {
        EmbedResult res;
        try {
            choose_working_blocks();
            if (l_ > 0) {
                embed_pair_stars();
                prune_and_resolve();
            } else {
                sigma_ = us_.theta;
                v1_ = VertexSet::full(us_.h.size());
                v2_ = VertexSet(us_.h.size());
                trace_.sigma = sigma_.perm;
            }
            embed_path_galaxy();
            res.map = merge_and_verify();
            res.variant = EmbedResult::Variant::Copy;
        } catch (const detail::PureSignal& p) {
            if (!p.pair.verify(host_)) throw std::logic_error("pure branch failed verification");
            res.variant = EmbedResult::Variant::Pure;
            res.pure = p.pair;
        } catch (const detail::FailSignal& f) {
            res.variant = EmbedResult::Variant::Failure;
            res.reason = f.reason;
        }
        res.floor_used = floor_;
        res.trace = trace_;
        return res;
    }

    // ---- stage 0: working blocks -----------------------------------------
    void choose_working_blocks() {
        int lxi = l_ * xi_;
        long long need = (long long)lxi * (gap_ + 1) + gap_;
        if (l_ > 0 && (long long)chi_.blocks.size() < need)
            throw detail::FailSignal{"insufficient structure size: need " + std::to_string(need) +
                                     " blocks, have " + std::to_string(chi_.blocks.size())};
        if (l_ == 0 && chi_.blocks.empty()) throw detail::FailSignal{"empty structure"};
        w_chi_.clear();
        for (int j = 0; j < lxi; ++j) w_chi_.push_back(gap_ + j * (gap_ + 1));
        trace_.w_blocks = w_chi_;
    }

    // ---- stage 1: pair-star blocks ----------------------------------------
    void embed_pair_stars() {
        cand_.assign(w_chi_.size(), VertexSet(host_.size()));
        for (size_t i = 0; i < w_chi_.size(); ++i) cand_[i] = chi_.blocks[w_chi_[i]];
        fixed_.clear();

        for (int k = 0; k < l_; ++k) {
            const PairStarSpec& ps = us_.spec.pair_stars[k];
            auto plan = detail::slot_plan(ps.kind, rho_);
            int base = k * xi_;
            EmbedTrace::PairStarStage stage;

            // Refine the whole window against everything already embedded.
            for (int s = 0; s < xi_; ++s)
                for (const auto& f : fixed_) refine(base + s, f.vertex, f.w_index);

            int ownerA = ps.run1_center;
            int ownerB = ownerA == 0 ? 4 : 0;
            Dir dir_run1 = run_dir(ps, ps.run1);
            Dir dir_run2 = run_dir(ps, ps.run2);

            auto t1 = select_center(base, plan, ownerA, plan.run1, dir_run1, k);
            auto t2 = select_center(base, plan, ownerB, plan.run2, dir_run2, k);
            (void)t1;
            (void)t2;

            // The inert golden vertex last, sliced against everything fixed.
            int g2_slot = base + plan.g[2];
            for (const auto& f : fixed_) refine(g2_slot, f.vertex, f.w_index);
            int g2 = cand_[g2_slot].lowest();
            if (g2 == -1)
                throw detail::FailSignal{"insufficient blocks: inert golden slot emptied"};
            fix(g2, g2_slot, h_pos_of(ps, plan, plan.g[2]));

            for (const auto& f : fixed_)
                if (f.w_index >= base && f.w_index < base + xi_) {
                    stage.vertices.push_back(f.vertex);
                    stage.blocks.push_back(w_chi_[f.w_index]);
                }
            trace_.pair_stars.push_back(std::move(stage));
        }
        std::sort(fixed_.begin(), fixed_.end(),
                  [](const FixedVertex& a, const FixedVertex& b) { return a.w_index < b.w_index; });
        check_reduced_copy();
    }

    // ---- stage 2: pruning and ordering resolution --------------------------
    void prune_and_resolve() {
        int n_h = us_.h.size();
        pruned_.assign(l_, false);
        std::vector<FixedVertex> survivors;

        for (int k = 0; k < l_; ++k) {
            const PairStarSpec& ps = us_.spec.pair_stars[k];
            auto copies = pair_star_copies(k);
            auto& g = copies.golden;
            // Per run: the unconstrained contact with the run's golden leaf
            // must match the pattern's forward orientation.
            auto run_ok = [&](const std::vector<int>& run_pos, const std::vector<int>& run_copy,
                              int owner) {
                int q_pos = owner == 0 ? ps.golden[3] : ps.golden[1];
                int q_copy = owner == 0 ? g[3] : g[1];
                for (size_t i = 0; i < run_copy.size(); ++i) {
                    bool want_leaf_to_q = run_pos[i] < q_pos;
                    if (want_leaf_to_q != host_.arc(run_copy[i], q_copy)) return false;
                }
                return true;
            };
            bool ok1 = run_ok(ps.run1, copies.run1, ps.run1_center);
            bool ok2 = run_ok(ps.run2, copies.run2, ps.run1_center == 0 ? 4 : 0);
            if (ok1 && ok2) {
                for (const auto& f : copies.all) survivors.push_back(f);
                continue;
            }
            pruned_[k] = true;
            trace_.pair_stars[k].pruned = true;
            auto triple = find_prune_triple(ps, copies);
            for (const auto& f : copies.all)
                for (int v : triple)
                    if (f.vertex == v) {
                        survivors.push_back(f);
                        trace_.pair_stars[k].kept.push_back(v);
                    }
        }
        std::sort(survivors.begin(), survivors.end(),
                  [](const FixedVertex& a, const FixedVertex& b) { return a.w_index < b.w_index; });
        int f_count = (int)survivors.size();
        if (f_count < 3 * l_ || f_count > l_ * (2 * b_ + 5))
            throw std::logic_error("pruned survivor count out of range");
        anchors_ = survivors;
        for (const auto& s : survivors) trace_.phi_tilde.push_back(s.vertex);

        phi_star_ = transitive_regroup(survivors);
        for (const auto& s : phi_star_) trace_.phi_star.push_back(s.vertex);

        // Try all 2^l golden-run reorderings; exactly one must resolve.
        int resolved = -1;
        for (uint32_t mask = 0; mask < (uint32_t(1) << l_); ++mask) {
            if (try_resolution(mask, f_count)) {
                if (resolved >= 0) throw ResolutionFailed("multiple orderings resolve");
                resolved = (int)mask;
            }
        }
        if (resolved < 0) throw ResolutionFailed("no candidate ordering resolves");
        apply_resolution((uint32_t)resolved, f_count);
        trace_.sigma_mask = (uint32_t)resolved;
        trace_.sigma = sigma_.perm;
        v1_.for_each([&](int v) { trace_.v1.push_back(v); });
        v2_.for_each([&](int v) { trace_.v2.push_back(v); });
        (void)n_h;
    }

    // ---- stage 3: path-galaxy part -----------------------------------------
    void embed_path_galaxy() {
        auto hp = make_h_plus(us_.h, sigma_, v1_, b_);
        trace_.h_plus_added = hp.added;
        int n_plus = hp.t.size();

        // Anchor positions in sigma+, then fresh blocks for everything else.
        // Anchor i (block order) realizes the i-th vertex of V2 under sigma,
        // which after pruning differs from the copy's original slot.
        auto pos_plus = hp.sigma_plus.positions();
        std::vector<int> chi_of_position(n_plus, -1);
        std::vector<int> v2_by_sigma;
        for (int p = 0; p < us_.h.size(); ++p) {
            int v = sigma_.vertex_at(p);
            if (v2_.test(v)) v2_by_sigma.push_back(v);
        }
        if (v2_by_sigma.size() != anchors_.size())
            throw std::logic_error("anchor/V2 size mismatch before enrichment");
        std::vector<std::pair<int, int>> anchor_at;   // (sigma+ position, chi index)
        for (size_t i = 0; i < anchors_.size(); ++i)
            anchor_at.push_back({pos_plus[v2_by_sigma[i]], anchor_chi(i)});
        std::sort(anchor_at.begin(), anchor_at.end());
        for (auto [p, c] : anchor_at) chi_of_position[p] = c;

        std::vector<char> chi_used(chi_.blocks.size(), 0);
        for (auto [p, c] : anchor_at) chi_used[c] = 1;
        int prev_chi = -1;
        size_t next_anchor = 0;
        for (int p = 0; p < n_plus; ++p) {
            if (chi_of_position[p] >= 0) {
                prev_chi = chi_of_position[p];
                ++next_anchor;
                continue;
            }
            int hi = next_anchor < anchor_at.size() ? anchor_at[next_anchor].second
                                                    : (int)chi_.blocks.size();
            int pick = -1;
            for (int c = prev_chi + 1; c < hi; ++c)
                if (!chi_used[c]) {
                    pick = c;
                    break;
                }
            if (pick == -1)
                throw detail::FailSignal{"insufficient blocks: no free block between anchors"};
            chi_used[pick] = 1;
            chi_of_position[p] = pick;
            prev_chi = pick;
            trace_.enrichment.push_back({p, pick});
        }

        // Stars of the blown-up path part, walked in sigma+ order.
        VertexSet v1_plus(n_plus);
        v1_.for_each([&](int v) { v1_plus.add(v); });
        for (int v = us_.h.size(); v < n_plus; ++v) v1_plus.add(v);
        path_map_.clear();
        if (v1_plus.empty()) return;

        std::vector<int> v1_positions;
        for (int p = 0; p < n_plus; ++p)
            if (v1_plus.test(hp.sigma_plus.vertex_at(p))) v1_positions.push_back(p);
        auto sub = detail::restrict_by_positions(backward_arcs(hp.t, hp.sigma_plus), v1_positions);
        auto info = path_galaxy_info(sub.ot);
        if (!info) throw std::logic_error("blown-up path part is not a path-galaxy");

        struct PathStar {
            int center;                 // sigma+ vertex
            std::vector<int> leaves;    // sigma+ vertices, position order
        };
        std::vector<PathStar> stars;
        for (const auto& star : info->stars) {
            PathStar pst;
            pst.center = sub.index_map[star.center];
            for (int lv : star.leaves) pst.leaves.push_back(sub.index_map[lv]);
            stars.push_back(pst);
        }
        info->nebula.singletons.for_each(
            [&](int v) { stars.push_back(PathStar{sub.index_map[v], {}}); });
        std::sort(stars.begin(), stars.end(), [&](const PathStar& a, const PathStar& b) {
            return pos_plus[a.center] < pos_plus[b.center];
        });

        std::vector<FixedVertex> placed;   // path copies, with chi indices
        for (const auto& star : stars) {
            EmbedTrace::PathStage stage;
            int center_chi = chi_of_position[pos_plus[star.center]];
            VertexSet center_cand = chi_.blocks[center_chi];
            std::vector<VertexSet> leaf_cands;
            std::vector<int> leaf_chis;
            for (int lv : star.leaves) {
                leaf_chis.push_back(chi_of_position[pos_plus[lv]]);
                leaf_cands.push_back(chi_.blocks[leaf_chis.back()]);
            }
            auto refine_all = [&](const FixedVertex& f) {
                center_cand &= f.w_index > center_chi ? host_.in_neighbors(f.vertex)
                                                      : host_.out_neighbors(f.vertex);
                for (size_t i = 0; i < leaf_cands.size(); ++i)
                    leaf_cands[i] &= (f.w_index > leaf_chis[i] ? host_.in_neighbors(f.vertex)
                                                               : host_.out_neighbors(f.vertex));
            };
            for (const auto& a : anchors_)
                refine_all(FixedVertex{a.vertex, anchor_chi_by_vertex(a.vertex), a.h_pos});
            for (const auto& f : placed) refine_all(f);

            bool center_first = star.leaves.empty() || pos_plus[star.center] < pos_plus[star.leaves[0]];
            std::vector<Dir> dirs(leaf_cands.size(), center_first ? Dir::From : Dir::To);
            auto sel = select_complete_vertex(host_, center_cand, leaf_cands, dirs, floor_);
            if (sel.pure) throw detail::PureSignal{*sel.pure};
            if (!sel.chosen)
                throw detail::FailSignal{"path star selection exhausted at floor " +
                                         std::to_string(floor_)};
            int center_copy = sel.chosen->pivot;
            placed.push_back({center_copy, center_chi, -1});
            path_map_.push_back({star.center, center_copy});
            stage.vertices.push_back(center_copy);
            stage.blocks.push_back(center_chi);

            if (!star.leaves.empty()) {
                // Original (pre-blow-up) leaves of this star, sigma order.
                std::vector<int> orig_leaves;
                for (int lv : star.leaves)
                    if (lv < us_.h.size()) orig_leaves.push_back(lv);
                int want = (int)orig_leaves.size();
                // Transitive subset of the rho candidates covers the originals.
                VertexSet cand_set(host_.size());
                for (int v : sel.chosen->partners) cand_set.add(v);
                auto ind = induced(host_, cand_set);
                auto witness = find_transitive_at_least(ind.t, want, cfg_.caps);
                std::vector<int> kept;
                for (int i = 0; i < want; ++i) kept.push_back(ind.index_map[witness.order[i]]);
                std::sort(kept.begin(), kept.end(), [&](int x, int y) {
                    return chi_index_of_partner(x, sel.chosen->partners, leaf_chis) <
                           chi_index_of_partner(y, sel.chosen->partners, leaf_chis);
                });
                // Match transitively: pattern leaves are forward-transitive in
                // sigma order; copies sorted by intra-group dominance.
                std::vector<int> ordered = kept;
                std::sort(ordered.begin(), ordered.end(), [&](int x, int y) {
                    int wins_x = 0, wins_y = 0;
                    for (int z : kept) {
                        if (z != x && host_.arc(x, z)) ++wins_x;
                        if (z != y && host_.arc(y, z)) ++wins_y;
                    }
                    if (wins_x != wins_y) return wins_x > wins_y;
                    return x < y;
                });
                for (size_t i = 0; i < orig_leaves.size(); ++i)
                    path_map_.push_back({orig_leaves[i], ordered[i]});
                for (int v : kept) {
                    placed.push_back({v, chi_index_of_partner(v, sel.chosen->partners, leaf_chis), -1});
                    stage.vertices.push_back(v);
                    stage.blocks.push_back(chi_index_of_partner(v, sel.chosen->partners, leaf_chis));
                }
            }
            trace_.path_stars.push_back(std::move(stage));
        }
    }

    // ---- stage 4: merge ----------------------------------------------------
    std::vector<int> merge_and_verify() {
        int n_h = us_.h.size();
        std::vector<int> map(n_h, -1);
        // Surviving part: sigma-restricted positions onto phi*.
        std::vector<int> v2_by_sigma;
        for (int p = 0; p < n_h; ++p) {
            int v = sigma_.vertex_at(p);
            if (v2_.test(v)) v2_by_sigma.push_back(v);
        }
        if (v2_by_sigma.size() != phi_star_.size())
            throw std::logic_error("anchor count mismatch at merge");
        for (size_t i = 0; i < v2_by_sigma.size(); ++i) map[v2_by_sigma[i]] = phi_star_[i].vertex;
        for (auto [hv, copy] : path_map_)
            if (hv < n_h) map[hv] = copy;
        for (int v = 0; v < n_h; ++v)
            if (map[v] < 0) throw std::logic_error("unmapped pattern vertex at merge");
        for (int u = 0; u < n_h; ++u)
            for (int v = 0; v < n_h; ++v)
                if (u != v && host_.arc(map[u], map[v]) != us_.h.arc(u, v))
                    throw std::logic_error("merged copy failed verification: pattern pair (" +
                                           std::to_string(u) + "," + std::to_string(v) +
                                           ") -> host (" + std::to_string(map[u]) + "," +
                                           std::to_string(map[v]) + ")");
        if (!verify_embedding(host_, us_.h, map))
            throw std::logic_error("merged copy failed verification");
        return map;
    }

    const EmbedTrace& trace() const { return trace_; }
    long long floor_used() const { return floor_; }

private:
    struct FixedVertex {
        int vertex;
        int w_index;   // structure block index space: for stage 1, index into w_chi_
        int h_pos;     // pattern theta position realized (provisional for sister leaves)
    };

    Dir run_dir(const PairStarSpec& ps, const std::vector<int>& run) const {
        // Run before the golden positions: center beats its leaves (pivot ->
        // partner). Run after: leaves beat the center.
        return run.front() < ps.golden[0] ? Dir::To : Dir::From;
    }

    void refine(int slot, int fixed_vertex, int fixed_slot) {
        if (slot == fixed_slot) return;
        cand_[slot] &= fixed_slot > slot ? host_.in_neighbors(fixed_vertex)
                                         : host_.out_neighbors(fixed_vertex);
    }

    void fix(int vertex, int slot, int h_pos) { fixed_.push_back({vertex, slot, h_pos}); }

    int h_pos_of(const PairStarSpec& ps, const detail::SlotPlan& plan, int slot_offset) const {
        for (int i = 0; i < 5; ++i)
            if (plan.g[i] == slot_offset) return ps.golden[i];
        for (size_t i = 0; i < plan.run1.size(); ++i)
            if (plan.run1[i] == slot_offset) return i < ps.run1.size() ? ps.run1[i] : -1;
        for (size_t i = 0; i < plan.run2.size(); ++i)
            if (plan.run2[i] == slot_offset) return i < ps.run2.size() ? ps.run2[i] : -1;
        return -1;
    }

    // One center's selection: pivot golden slot + run partners + cross golden
    // partner, then transitive extraction of the b actual leaves, then a
    // refinement sweep of the still-open slots.
    std::vector<int> select_center(int base, const detail::SlotPlan& plan, int owner,
                                   const std::vector<int>& run_slots, Dir run_dir, int k) {
        const PairStarSpec& ps = us_.spec.pair_stars[k];
        int pivot_slot = base + (owner == 0 ? plan.g[0] : plan.g[4]);
        int cross_slot = base + (owner == 0 ? plan.g[3] : plan.g[1]);
        Dir cross_dir = owner == 0 ? Dir::From : Dir::To;   // g3 -> g0 / g4 -> g1

        std::vector<VertexSet> bs;
        std::vector<Dir> dirs;
        for (int s : run_slots) {
            bs.push_back(cand_[base + s]);
            dirs.push_back(run_dir);
        }
        bs.push_back(cand_[cross_slot]);
        dirs.push_back(cross_dir);

        auto sel = select_complete_vertex(host_, cand_[pivot_slot], bs, dirs, floor_);
        if (sel.pure) throw detail::PureSignal{*sel.pure};
        if (!sel.chosen)
            throw detail::FailSignal{"pair-star selection exhausted at floor " +
                                     std::to_string(floor_)};
        int pivot = sel.chosen->pivot;
        int cross = sel.chosen->partners.back();

        // Transitive b-subset of the rho run candidates becomes the leaf set.
        std::vector<int> run_partners(sel.chosen->partners.begin(),
                                      sel.chosen->partners.end() - 1);
        VertexSet cand_set(host_.size());
        for (int v : run_partners) cand_set.add(v);
        auto ind = induced(host_, cand_set);
        auto witness = find_transitive_at_least(ind.t, b_, cfg_.caps);
        std::vector<int> leaves;
        for (int i = 0; i < b_; ++i) leaves.push_back(ind.index_map[witness.order[i]]);
        std::vector<int> leaf_slots;
        for (int v : leaves) {
            for (size_t i = 0; i < run_partners.size(); ++i)
                if (run_partners[i] == v) leaf_slots.push_back(base + run_slots[i]);
        }
        std::sort(leaf_slots.begin(), leaf_slots.end());
        std::sort(leaves.begin(), leaves.end(), [&](int x, int y) {
            return slot_of_partner(x, run_partners, run_slots, base) <
                   slot_of_partner(y, run_partners, run_slots, base);
        });

        const std::vector<int>& run_pos = &run_slots == &plan.run1 ? ps.run1 : ps.run2;
        fix(pivot, pivot_slot, owner == 0 ? ps.golden[0] : ps.golden[4]);
        fix(cross, cross_slot, owner == 0 ? ps.golden[3] : ps.golden[1]);
        for (size_t i = 0; i < leaves.size(); ++i) fix(leaves[i], leaf_slots[i], run_pos[i]);

        // Refinement sweep over the not-yet-fixed slots of this window.
        std::vector<char> is_fixed(xi_, 0);
        for (const auto& f : fixed_)
            if (f.w_index >= base && f.w_index < base + xi_) is_fixed[f.w_index - base] = 1;
        std::vector<int> just_fixed = leaves;
        just_fixed.push_back(pivot);
        just_fixed.push_back(cross);
        for (int s = 0; s < xi_; ++s) {
            if (is_fixed[s]) continue;
            for (int v : just_fixed) {
                int fs = -1;
                for (const auto& f : fixed_)
                    if (f.vertex == v && f.w_index >= base && f.w_index < base + xi_) fs = f.w_index;
                refine(base + s, v, fs);
            }
        }
        return leaves;
    }

    static int slot_of_partner(int v, const std::vector<int>& partners,
                               const std::vector<int>& slots, int base) {
        for (size_t i = 0; i < partners.size(); ++i)
            if (partners[i] == v) return base + slots[i];
        return -1;
    }

    static int chi_index_of_partner(int v, const std::vector<int>& partners,
                                    const std::vector<int>& chis) {
        for (size_t i = 0; i < partners.size(); ++i)
            if (partners[i] == v) return chis[i];
        return -1;
    }

    struct PairStarCopies {
        std::vector<FixedVertex> all;   // block order
        int golden[5];
        std::vector<int> run1, run2;    // copies in slot order
    };

    PairStarCopies pair_star_copies(int k) const {
        const PairStarSpec& ps = us_.spec.pair_stars[k];
        auto plan = detail::slot_plan(ps.kind, rho_);
        int base = k * xi_;
        PairStarCopies out;
        for (const auto& f : fixed_)
            if (f.w_index >= base && f.w_index < base + xi_) out.all.push_back(f);
        std::sort(out.all.begin(), out.all.end(),
                  [](const FixedVertex& a, const FixedVertex& b) { return a.w_index < b.w_index; });
        for (const auto& f : out.all) {
            int off = f.w_index - base;
            bool matched = false;
            for (int i = 0; i < 5; ++i)
                if (plan.g[i] == off) {
                    out.golden[i] = f.vertex;
                    matched = true;
                }
            if (matched) continue;
            bool in_run1 = false;
            for (int s : plan.run1)
                if (s == off) in_run1 = true;
            (in_run1 ? out.run1 : out.run2).push_back(f.vertex);
        }
        return out;
    }

    // The three-vertex witness kept from a failed pair-star: x1 beaten by
    // both others, x2 beaten by x3, searched inside the kind's candidate
    // boxes in block order.
    std::vector<int> find_prune_triple(const PairStarSpec& ps, const PairStarCopies& c) const {
        std::vector<int> box1, box2, box3;
        const auto& g = c.golden;
        if (ps.kind == StarKind::Middle) {
            if (ps.run1_center == 0) {
                box1 = c.run1;
                box1.push_back(g[1]);
                box2 = {g[0], g[4]};
                box3 = {g[3]};
                for (int v : c.run2) box3.push_back(v);
            } else {
                box1 = c.run1;
                box1.push_back(g[0]);
                box2 = {g[1], g[3]};
                box3 = {g[4]};
                for (int v : c.run2) box3.push_back(v);
            }
        } else if (ps.kind == StarKind::Right) {
            box1 = c.run1;
            for (int v : c.run2) box1.push_back(v);
            box2 = {g[0], g[1]};
            box3 = {g[3], g[4]};
        } else {
            box1 = {g[0], g[1]};
            box2 = {g[3], g[4]};
            box3 = c.run1;
            for (int v : c.run2) box3.push_back(v);
        }
        for (int x1 : box1)
            for (int x2 : box2)
                for (int x3 : box3)
                    if (host_.arc(x2, x1) && host_.arc(x3, x1) && host_.arc(x3, x2))
                        return {x1, x2, x3};
        throw ResolutionFailed("no prune witness inside the candidate boxes");
    }

    // Reorders each surviving sister-leaf run transitively (copies of one run
    // relate identically to everything outside it).
    std::vector<FixedVertex> transitive_regroup(const std::vector<FixedVertex>& survivors) const {
        std::vector<FixedVertex> out = survivors;
        for (int k = 0; k < l_; ++k) {
            if (pruned_[k]) continue;
            const PairStarSpec& ps = us_.spec.pair_stars[k];
            for (const std::vector<int>* run : {&ps.run1, &ps.run2}) {
                std::vector<int> idx;
                for (size_t i = 0; i < out.size(); ++i)
                    for (int p : *run)
                        if (out[i].h_pos == p) idx.push_back((int)i);
                if (idx.size() < 2) continue;
                std::vector<int> verts;
                for (int i : idx) verts.push_back(out[i].vertex);
                std::sort(verts.begin(), verts.end(), [&](int x, int y) {
                    int wx = 0, wy = 0;
                    for (int z : verts)
                        if (z != x && host_.arc(x, z)) ++wx;
                    for (int z : verts)
                        if (z != y && host_.arc(y, z)) ++wy;
                    if (wx != wy) return wx > wy;
                    return x < y;
                });
                for (size_t i = 0; i < idx.size(); ++i) out[idx[i]].vertex = verts[i];
            }
        }
        return out;
    }

    Ordering sigma_for_mask(uint32_t mask) const {
        std::vector<int> perm = us_.theta.perm;
        for (int k = 0; k < l_; ++k) {
            if (!((mask >> k) & 1)) continue;
            const auto& g = us_.spec.pair_stars[k].golden;
            int s[5];
            for (int i = 0; i < 5; ++i) s[i] = perm[g[i]];
            const int shuffle[5] = {3, 0, 2, 4, 1};   // (s1..s5) -> (s4 s1 s3 s5 s2)
            for (int i = 0; i < 5; ++i) perm[g[i]] = s[shuffle[i]];
        }
        return Ordering(perm);
    }

    bool try_resolution(uint32_t mask, int f_count) {
        int n_h = us_.h.size();
        VertexSet v2(n_h);
        for (int k = 0; k < l_; ++k) {
            const auto& ps = us_.spec.pair_stars[k];
            if ((mask >> k) & 1) {
                for (int i : {1, 2, 3}) v2.add(us_.theta.vertex_at(ps.golden[i]));
            } else {
                for (int i = 0; i < 5; ++i) v2.add(us_.theta.vertex_at(ps.golden[i]));
                for (int p : ps.run1) v2.add(us_.theta.vertex_at(p));
                for (int p : ps.run2) v2.add(us_.theta.vertex_at(p));
            }
        }
        if (v2.count() != f_count) return false;
        VertexSet v1 = VertexSet::full(n_h).minus(v2);

        Ordering sigma = sigma_for_mask(mask);
        auto sot = backward_arcs(us_.h, sigma);
        for (auto [u, v] : sot.backward)
            if (v1.test(u) != v1.test(v)) return false;

        if (!v1.empty()) {
            std::vector<int> v1_positions;
            for (int p = 0; p < n_h; ++p)
                if (v1.test(sigma.vertex_at(p))) v1_positions.push_back(p);
            auto sub = detail::restrict_by_positions(sot, v1_positions);
            if (!is_path_galaxy_ordering(sub.ot)) return false;
        }

        // The survivors, transitively regrouped, must realize H|V2 under the
        // restriction of sigma, position by position.
        std::vector<int> v2_by_sigma;
        for (int p = 0; p < n_h; ++p) {
            int v = sigma.vertex_at(p);
            if (v2.test(v)) v2_by_sigma.push_back(v);
        }
        for (size_t i = 0; i < v2_by_sigma.size(); ++i)
            for (size_t j = 0; j < v2_by_sigma.size(); ++j) {
                if (i == j) continue;
                if (us_.h.arc(v2_by_sigma[i], v2_by_sigma[j]) !=
                    host_.arc(phi_star_[i].vertex, phi_star_[j].vertex))
                    return false;
            }
        return true;
    }

    void apply_resolution(uint32_t mask, int f_count) {
        (void)f_count;
        sigma_ = sigma_for_mask(mask);
        int n_h = us_.h.size();
        v2_ = VertexSet(n_h);
        for (int k = 0; k < l_; ++k) {
            const auto& ps = us_.spec.pair_stars[k];
            if ((mask >> k) & 1) {
                for (int i : {1, 2, 3}) v2_.add(us_.theta.vertex_at(ps.golden[i]));
            } else {
                for (int i = 0; i < 5; ++i) v2_.add(us_.theta.vertex_at(ps.golden[i]));
                for (int p : ps.run1) v2_.add(us_.theta.vertex_at(p));
                for (int p : ps.run2) v2_.add(us_.theta.vertex_at(p));
            }
        }
        v1_ = VertexSet::full(n_h).minus(v2_);
    }

    int anchor_chi(size_t i) const { return w_chi_[anchors_[i].w_index]; }
    int anchor_chi_by_vertex(int v) const {
        for (const auto& a : anchors_)
            if (a.vertex == v) return w_chi_[a.w_index];
        return -1;
    }

    // Validates stage-1 output: all pinned arcs match the pattern, only the
    // sister-run contacts are free, and every sister run is transitive.
    void check_reduced_copy() const {
        for (int k = 0; k < l_; ++k) {
            const auto& ps = us_.spec.pair_stars[k];
            // L-sets: each run plus its center's cross golden leaf.
            auto copies = pair_star_copies(k);
            std::vector<int> l1pos = ps.run1, l2pos = ps.run2;
            l1pos.push_back(ps.run1_center == 0 ? ps.golden[3] : ps.golden[1]);
            l2pos.push_back(ps.run1_center == 0 ? ps.golden[1] : ps.golden[3]);
            auto in_same_group = [&](int pa, int pb) {
                auto in = [](const std::vector<int>& v, int x) {
                    return std::find(v.begin(), v.end(), x) != v.end();
                };
                return (in(l1pos, pa) && in(l1pos, pb)) || (in(l2pos, pa) && in(l2pos, pb));
            };
            for (const auto& fa : fixed_)
                for (const auto& fb : fixed_) {
                    if (fa.vertex == fb.vertex) continue;
                    if (fa.w_index < k * xi_ || fa.w_index >= (k + 1) * xi_) continue;
                    if (fb.w_index >= (k + 1) * xi_) continue;   // later windows handled at their k
                    if (fb.w_index >= k * xi_ && in_same_group(fa.h_pos, fb.h_pos)) continue;
                    int ha = us_.theta.vertex_at(fa.h_pos), hb = us_.theta.vertex_at(fb.h_pos);
                    if (us_.h.arc(ha, hb) != host_.arc(fa.vertex, fb.vertex))
                        throw std::logic_error("reduced copy arc mismatch");
                }
            // Sister runs are transitive.
            for (const auto& run : {copies.run1, copies.run2}) {
                VertexSet s(host_.size());
                for (int v : run) s.add(v);
                if (s.count() >= 3 && !is_transitive(induced(host_, s).t))
                    throw std::logic_error("sister leaves not transitive");
            }
        }
    }

    const Tournament& host_;
    const SmoothStructure& chi_;
    UniformSpiral us_;
    PipelineConfig cfg_;
    int b_, l_, rho_, xi_, nu_, gap_;
    long long floor_ = 1;

    std::vector<int> w_chi_;
    std::vector<VertexSet> cand_;
    std::vector<FixedVertex> fixed_;
    std::vector<char> pruned_;
    std::vector<FixedVertex> anchors_;     // phi-tilde survivors, block order
    std::vector<FixedVertex> phi_star_;    // transitively regrouped survivors
    Ordering sigma_;
    VertexSet v1_, v2_;
    std::vector<std::pair<int, int>> path_map_;   // (pattern vertex, host copy)
    EmbedTrace trace_;
};

// ---------------------------------------------------------------------------
// Driver

inline EmbedResult embed_or_pure_pair(const Tournament& host, const Tournament& h,
                                      const Ordering& theta, const SmoothStructure& chi,
                                      const PipelineConfig& cfg = PipelineConfig()) {
    auto rep = verify_smooth(host, chi, cfg.caps);
    if (!rep.valid) throw StructureNotSmooth(rep.violation->describe());
    auto ot = backward_arcs(h, theta);
    auto spec = is_spiral_galaxy_ordering(ot);
    if (!spec) throw PatternNotSpiral();

    if (is_uniform(*spec)) {
        UniformSpiral us;
        // Normalize to an identity ordering so pattern positions == labels.
        std::vector<int> to_identity(h.size());
        for (int p = 0; p < h.size(); ++p) to_identity[theta.vertex_at(p)] = p;
        Tournament ht = relabel(h, to_identity);
        auto id_ot = backward_arcs(ht, Ordering::identity(h.size()));
        auto id_spec = is_spiral_galaxy_ordering(id_ot);
        if (!id_spec || !is_uniform(*id_spec)) throw PatternNotSpiral();
        us.h = std::move(ht);
        us.theta = Ordering::identity(h.size());
        us.spec = std::move(*id_spec);
        us.up = *uniform_params(us.spec);
        EmbedPipeline pipe(host, chi, std::move(us), cfg);
        EmbedResult res = pipe.run();
        if (res.variant == EmbedResult::Variant::Copy) {
            std::vector<int> back(h.size());
            for (int v = 0; v < h.size(); ++v) back[v] = res.map[to_identity[v]];
            res.map = back;
            if (!verify_embedding(host, h, res.map))
                throw std::logic_error("relabeled copy failed verification");
        }
        return res;
    }

    auto uni = uniformize_spiral(h, theta, *spec);
    EmbedPipeline pipe(host, chi, uni.us, cfg);
    EmbedResult res = pipe.run();
    if (res.variant == EmbedResult::Variant::Copy) {
        std::vector<int> restricted(h.size());
        for (int v = 0; v < h.size(); ++v) restricted[v] = res.map[uni.injection[v]];
        res.map = restricted;
        if (!verify_embedding(host, h, res.map))
            throw std::logic_error("restricted copy failed verification");
    }
    return res;
}

} // namespace tourlab
