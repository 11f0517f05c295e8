// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Every threshold is fixed here, in code; nothing defers to calibration.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "tourlab/embed.hpp"
#include "tourlab/jsonio.hpp"

using namespace tourlab;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d. %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(), secs,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    out << data;
}

int run_cli(const std::string& args, int tlab_jobs, const std::string& out_path) {
    std::string cmd = "TLAB_JOBS=" + std::to_string(tlab_jobs) + " " + TLAB_BIN_PATH + " " + args +
                      " > " + out_path + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<Tournament> classes_up_to(int n_max) {
    std::vector<Tournament> out;
    for (int n = 2; n <= n_max; ++n)
        enumerate_tournaments(n, [&](const Tournament& t) { out.push_back(t); }, Caps(), 2);
    return out;
}

SmoothStructure blocks_structure(const std::vector<VertexSet>& blocks, Rational c, Rational lambda) {
    SmoothStructure s;
    s.blocks = blocks;
    s.w.assign(blocks.size(), 0);
    s.c = c;
    s.lambda = lambda;
    return s;
}

// --- criteria ---------------------------------------------------------------

bool c1_enumeration(std::string& detail) {
    const long long want[] = {0, 1, 1, 2, 4, 12, 56, 456, 6880};
    for (int n = 1; n <= 8; ++n) {
        long long a = count_tournament_classes(n, Caps(), 2, false);
        long long b = count_tournament_classes(n, Caps(), 2, true);
        if (a != want[n] || b != want[n]) {
            detail = "n=" + std::to_string(n) + ": min-form " + std::to_string(a) +
                     ", max-form " + std::to_string(b) + ", expected " + std::to_string(want[n]);
            return false;
        }
    }
    return true;
}

bool c2_transitive_in_eight(std::string& detail) {
    long long checked = 0;
    bool ok = true;
    enumerate_tournaments(8, [&](const Tournament& t) {
        if (!ok) return;
        ++checked;
        if (max_transitive(t).size < 4) {
            ok = false;
            detail = "class with tr < 4 found";
            return;
        }
        auto w = find_transitive_at_least(t, 4);
        if ((int)w.order.size() < 4 || !w.verify(t)) {
            ok = false;
            detail = "constructive extractor failed";
        }
    }, Caps(), 2);
    if (checked != 6880) {
        detail = "checked " + std::to_string(checked) + " classes";
        return false;
    }
    return ok;
}

bool c3_oracle_equivalence(std::string& detail) {
    for (const auto& t : classes_up_to(7)) {
        auto mt = max_transitive(t);
        if (mt.size != naive_max_transitive(t) || !mt.witness.verify(t)) {
            detail = "max_transitive disagrees with the all-subsets oracle";
            return false;
        }
        auto fast = max_pure_pair(t);
        auto slow = naive_max_pure_pair(t);
        if (fast.order != slow.order || !(fast.a == slow.a) || !(fast.b == slow.b) ||
            !fast.verify(t)) {
            detail = "max_pure_pair disagrees with the 3^n oracle";
            return false;
        }
    }
    return true;
}

bool c4_density_lemmas(std::string& detail) {
    int verified = 0;
    long long lemma1_checks = 0, lemma3_checks = 0;
    for (uint64_t seed = 1; verified < 1000; ++seed) {
        if (seed > 5000) {
            detail = "could not assemble 1000 verified instances";
            return false;
        }
        Rng cfg(seed * 7919);
        int nblocks = 3 + (int)(cfg.next() % 3);       // 3..5
        int per = 8 + (int)(cfg.next() % 9);           // 8..16
        LayeredHostSpec spec;
        spec.block_sizes.assign(nblocks, per);
        spec.forward_bias = 0.97;
        spec.seed = seed;
        auto host = make_layered_host(spec);
        auto s = blocks_structure(host.blocks, Rational(1, nblocks), Rational(1, 4));
        if (!verify_smooth(host.t, s).valid) continue;
        ++verified;

        Rng rng(seed);
        // Restriction bound: random sub-blocks meeting measured fractions.
        for (int trial = 0; trial < 3; ++trial) {
            int i = (int)(rng.next() % nblocks);
            int j = (int)(rng.next() % nblocks);
            if (i == j) continue;
            VertexSet x(host.t.size()), y(host.t.size());
            s.blocks[i].for_each([&](int v) {
                if (rng.next() & 1) x.add(v);
            });
            s.blocks[j].for_each([&](int v) {
                if (rng.next() & 1) y.add(v);
            });
            if (x.empty() || y.empty()) continue;
            Rational lam = Rational(1) - directed_density(host.t, s.blocks[std::min(i, j)],
                                                          s.blocks[std::max(i, j)]);
            Rational eta1(x.count(), s.blocks[i].count());
            Rational eta2(y.count(), s.blocks[j].count());
            Rational bound = Rational(1) - lam / (eta1 * eta2);
            Rational d = i < j ? directed_density(host.t, x, y) : directed_density(host.t, y, x);
            ++lemma1_checks;
            if (d < bound) {
                detail = "restriction bound violated at seed " + std::to_string(seed);
                return false;
            }
        }
        // Slice intersection bound.
        for (int trial = 0; trial < 3; ++trial) {
            int j = (int)(rng.next() % nblocks);
            VertexSet star(host.t.size());
            s.blocks[j].for_each([&](int v) {
                if (rng.next() & 1) star.add(v);
            });
            if (2 * star.count() < s.blocks[j].count() || star.empty()) continue;
            std::vector<int> probes;
            for (int k = 0; k < 3; ++k) {
                int v = (int)(rng.next() % host.t.size());
                if (!s.blocks[j].test(v)) probes.push_back(v);
            }
            auto r = common_slice_bound(host.t, s, j, star, Rational(1, 2), probes);
            ++lemma3_checks;
            if (Rational(r.measured) < r.bound) {
                detail = "slice bound violated at seed " + std::to_string(seed);
                return false;
            }
        }
    }
    detail = std::to_string(lemma1_checks) + " restriction checks, " +
             std::to_string(lemma3_checks) + " slice checks";
    return true;
}

bool c5_round_trips(std::string& detail) {
    const StarKind kinds[] = {StarKind::Middle, StarKind::Left, StarKind::Right};
    const StarKind qkinds[] = {StarKind::Right, StarKind::Left};
    long long instances = 0;
    for (int l = 1; l <= 3; ++l)
        for (int b = 1; b <= 3; ++b) {
            int kc_max = 1, qc_max = 1;
            for (int i = 0; i < l; ++i) {
                kc_max *= 3;
                qc_max *= 2;
            }
            for (int kc = 0; kc < kc_max; ++kc)
                for (int qc = 0; qc < qc_max; ++qc) {
                    UniformSpiralParams params;
                    params.l = l;
                    params.b = b;
                    int kk = kc, qq = qc;
                    for (int i = 0; i < l; ++i) {
                        params.kinds.push_back(kinds[kk % 3]);
                        kk /= 3;
                        params.q_kinds.push_back(qkinds[qq % 2]);
                        qq /= 2;
                    }
                    auto gen = make_uniform_spiral(params);
                    ++instances;
                    if (gen.t.size() != l * (3 * b + 6)) {
                        detail = "size identity violated";
                        return false;
                    }
                    auto ot = backward_arcs(gen.t, gen.theta);
                    if (!is_backward_forest(ot)) {
                        detail = "backward digraph is not a forest";
                        return false;
                    }
                    auto spec = is_spiral_galaxy_ordering(ot);
                    if (!spec) {
                        detail = "recognizer rejected a generated spiral";
                        return false;
                    }
                    auto up = uniform_params(*spec);
                    if (!up || up->l != l || up->b != b) {
                        detail = "uniform parameters did not round trip";
                        return false;
                    }
                    for (int i = 0; i < l; ++i) {
                        if (spec->pair_stars[i].kind != params.kinds[i]) {
                            detail = "pair-star kind did not round trip";
                            return false;
                        }
                        bool q_ok = false;
                        for (StarKind k : spec->q_kinds[i])
                            if (k == params.q_kinds[i]) q_ok = true;
                        if (!q_ok) {
                            detail = "path-star kind did not round trip";
                            return false;
                        }
                    }
                }
        }
    detail = std::to_string(instances) + " parameter tuples";
    return true;
}

bool c6_constants(std::string& detail) {
    auto p = params_from(1, 1);
    bool ok = p.xi == 7 && p.nu == 6 && p.w_len == 55 && p.lambda == Rational(1, 9) &&
              p.alpha == Rational(1, 90) && p.h == 9 && p.rho == 1 && p.tau == 0;
    if (!ok)
        detail = "got xi=" + std::to_string(p.xi) + " nu=" + std::to_string(p.nu) +
                 " |w|=" + std::to_string(p.w_len) + " lambda=" + p.lambda.str() +
                 " alpha=" + p.alpha.str();
    return ok;
}

bool c7_plant_and_recover(std::string& detail) {
    auto gen = make_uniform_spiral({1, 1, {}, {}, {}});
    const int kBlocks = 31, kPer = 30;
    int runs = 0, copies = 0;
    for (uint64_t seed = 1; runs < 50; ++seed) {
        if (seed > 500) {
            detail = "could not assemble 50 verified hosts";
            return false;
        }
        LayeredHostSpec spec;
        spec.block_sizes.assign(kBlocks, kPer);
        spec.forward_bias = 0.97;
        spec.seed = seed;
        auto host = make_layered_host(spec);
        // Plant one copy of the pattern on the lowest vertex of blocks 0..8.
        std::vector<int> planted;
        for (int k = 0; k < 9; ++k) planted.push_back(host.blocks[k].lowest());
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j)
                if (i != j && gen.t.arc(i, j)) host.t.set_arc(planted[i], planted[j]);
        auto chi = blocks_structure(host.blocks, Rational(1, kBlocks), Rational(1, 4));
        if (!verify_smooth(host.t, chi).valid) continue;
        ++runs;
        PipelineConfig cfg;
        cfg.gap = 3;
        cfg.floor_count = 15;
        auto res = embed_or_pure_pair(host.t, gen.t, gen.theta, chi, cfg);
        if (res.variant == EmbedResult::Variant::Copy) {
            if (!verify_embedding(host.t, gen.t, res.map)) {
                detail = "a returned copy failed independent verification";
                return false;
            }
            ++copies;
        } else if (res.variant == EmbedResult::Variant::Pure) {
            if (!res.pure.verify(host.t) ||
                directed_density(host.t, res.pure.a, res.pure.b) != Rational(1)) {
                detail = "a returned pure pair failed independent verification";
                return false;
            }
        }
    }
    detail = std::to_string(copies) + "/50 copies";
    return copies >= 45;
}

bool c8_pure_branch(std::string& detail) {
    Tournament host = transitive_tournament(256);
    std::vector<VertexSet> halves(2, VertexSet(256));
    for (int v = 0; v < 256; ++v) halves[v < 128 ? 0 : 1].add(v);
    auto chi = blocks_structure(halves, Rational(1, 2), Rational(0));
    Tournament arc = build_tournament(2, {{1, 0}});
    PipelineConfig cfg;
    cfg.floor_count = 128;
    auto res = embed_or_pure_pair(host, arc, Ordering::identity(2), chi, cfg);
    if (res.variant != EmbedResult::Variant::Pure) {
        detail = "expected the pure branch";
        return false;
    }
    if (res.pure.order < 128 || !res.pure.verify(host) ||
        directed_density(host, res.pure.a, res.pure.b) != Rational(1)) {
        detail = "pure pair of order " + std::to_string(res.pure.order);
        return false;
    }
    detail = "order " + std::to_string(res.pure.order);
    return true;
}

bool c9_selection_consistency(std::string& detail) {
    long long coherent_cases = 0;
    for (const auto& t : classes_up_to(7)) {
        int n = t.size();
        int pure_order = max_pure_pair(t).order;
        for (int ma = 1; ma < (1 << n); ++ma)
            for (int mb = 1; mb < (1 << n); ++mb) {
                if (ma & mb) continue;
                VertexSet a(n), b(n);
                for (int v = 0; v < n; ++v) {
                    if ((ma >> v) & 1) a.add(v);
                    if ((mb >> v) & 1) b.add(v);
                }
                Rational c(std::min(a.count(), b.count()), n);
                Rational alpha = c / Rational(2);   // m = 1
                if (!(Rational(pure_order) < alpha * Rational(n))) continue;
                long long floor_count = (alpha.num() * n + alpha.den() - 1) / alpha.den();
                ++coherent_cases;
                for (Dir d : {Dir::To, Dir::From}) {
                    auto r = select_complete_vertex(t, a, {b}, {d}, floor_count);
                    if (!r.chosen) {
                        detail = r.pure ? "selection returned a pure pair on a coherent host"
                                        : "selection exhausted on a coherent host";
                        return false;
                    }
                }
            }
    }
    detail = std::to_string(coherent_cases) + " coherent (host, A, B) cases";
    return true;
}

bool c10_determinism(std::string& detail) {
    const std::string dir = "/tmp/tlab_acc_";
    Tournament c3 = build_tournament(3, {{2, 0}});
    write_file(dir + "c3.trn", write_trn1(c3));
    // scan
    std::vector<std::string> scans;
    for (int rep = 0; rep < 3; ++rep)
        for (int jobs : {1, 8}) {
            std::string out = dir + "scan_out.json", csv = dir + "scan.csv";
            if (run_cli("scan --h " + dir + "c3.trn --max-n 6 --csv " + csv + " --json " + out,
                        jobs, dir + "scan_stdout.txt") != 0) {
                detail = "scan exited nonzero";
                return false;
            }
            scans.push_back(slurp_file(out) + slurp_file(csv));
        }
    for (const auto& s : scans)
        if (s != scans[0] || s.empty()) {
            detail = "scan outputs differ";
            return false;
        }
    // gen
    std::vector<std::string> gens;
    for (int rep = 0; rep < 3; ++rep)
        for (int jobs : {1, 8}) {
            if (run_cli("gen layered --blocks 20,20,20 --lambda 0.05 --seed 9 --out " + dir +
                            "gen.trn --sidecar " + dir + "gen.json",
                        jobs, dir + "gen_stdout.txt") != 0) {
                detail = "gen exited nonzero";
                return false;
            }
            gens.push_back(slurp_file(dir + "gen.trn") + slurp_file(dir + "gen.json"));
        }
    for (const auto& s : gens)
        if (s != gens[0] || s.empty()) {
            detail = "gen outputs differ";
            return false;
        }
    // embed (pure branch configuration, host from the suite)
    Tournament host = transitive_tournament(64);
    write_file(dir + "host.trn", write_trn1(host));
    std::vector<VertexSet> halves(2, VertexSet(64));
    for (int v = 0; v < 64; ++v) halves[v < 32 ? 0 : 1].add(v);
    write_file(dir + "struct.json",
               smooth_to_json(blocks_structure(halves, Rational(1, 2), Rational(0)), 64).dump());
    Tournament arc = build_tournament(2, {{1, 0}});
    write_file(dir + "arc.trn", write_trn1(arc));
    std::vector<std::string> embeds;
    for (int rep = 0; rep < 3; ++rep)
        for (int jobs : {1, 8}) {
            std::string out = dir + "embed_stdout.txt";
            if (run_cli("embed --host " + dir + "host.trn --h " + dir + "arc.trn --structure " +
                            dir + "struct.json --trace " + dir + "trace.json",
                        jobs, out) != 0) {
                detail = "embed exited nonzero";
                return false;
            }
            embeds.push_back(slurp_file(out) + slurp_file(dir + "trace.json"));
        }
    for (const auto& s : embeds)
        if (s != embeds[0] || s.empty()) {
            detail = "embed outputs differ";
            return false;
        }
    return true;
}

} // namespace

int main() {
    std::printf("tourlab acceptance suite\n");
    criterion(1, "enumeration counts, two canonicalizers", c1_enumeration);
    criterion(2, "every 8-vertex tournament has a verified transitive 4-set", c2_transitive_in_eight);
    criterion(3, "tr and P match the naive oracles, n <= 7", c3_oracle_equivalence);
    criterion(4, "density lemmas on 1000 verified-smooth instances", c4_density_lemmas);
    criterion(5, "generator/recognizer round trips over the full grid", c5_round_trips);
    criterion(6, "pipeline constants for b=1, l=1", c6_constants);
    criterion(7, "plant-and-recover dichotomy, 50 layered hosts", c7_plant_and_recover);
    criterion(8, "pure branch on a transitive host of size 256", c8_pure_branch);
    criterion(9, "coherent selection never fails at the coherence floor, n <= 7",
              c9_selection_consistency);
    criterion(10, "byte-identical scan/gen/embed across runs and worker counts", c10_determinism);
    if (failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
