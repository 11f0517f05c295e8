// tlab: tournament workbench command line.
//
// Subcommands: invariants, recognize, enumerate, scan, gen, smooth, forest-order,
// embed. All randomized commands take an explicit seed (default 1, never the
// clock); worker counts come from --jobs or TLAB_JOBS and never change results.
// Exit codes: 0 ok, 2 usage or domain error, 3 malformed input file.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "tourlab/embed.hpp"
#include "tourlab/jsonio.hpp"

using namespace tourlab;

namespace {

constexpr const char* kVersion =
    "tlab 1.0 (formats: TRN1, UT1, ORD1, SMST1; trace schema 1)";

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedInput("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& data) {
    if (path == "-") {
        std::cout << data;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MalformedInput("cannot write '" + path + "'");
    out << data;
}

Tournament load_tournament(const std::string& path) {
    std::string text = slurp(path);
    if (text.rfind("UT1 ", 0) == 0) return read_ut1(text);
    return read_trn1(text);
}

json load_json(const std::string& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("JSON parse: ") + e.what());
    }
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

StarKind parse_kind(const std::string& s) {
    if (s == "m" || s == "middle") return StarKind::Middle;
    if (s == "l" || s == "left") return StarKind::Left;
    if (s == "r" || s == "right") return StarKind::Right;
    throw CLI::ValidationError("kind", "expected middle|left|right (or m|l|r), got '" + s + "'");
}

std::vector<StarKind> parse_kind_list(const std::string& text) {
    std::vector<StarKind> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_kind(item));
    return out;
}

void emit_tournament(const Tournament& t, const Ordering& theta, const json& spec,
                     const std::string& out, const std::string& sidecar) {
    spit(out, write_trn1(t));
    std::string side = sidecar;
    if (side.empty() && out != "-") side = out + ".json";
    if (!side.empty()) spit(side, ordering_sidecar_to_json(theta, spec).dump(2) + "\n");
}

int run(int argc, char** argv) {
    CLI::App app{"tournament combinatorics workbench"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    int jobs = default_jobs();
    app.add_option("--jobs", jobs, "worker count (default TLAB_JOBS or hardware)");
    Caps caps;

    // ---- invariants ----
    auto* inv = app.add_subcommand("invariants", "tr, P and coherence of a tournament file");
    std::string inv_in, inv_alpha;
    bool inv_json = false;
    inv->add_option("--in", inv_in, "TRN1/UT1 input")->required();
    inv->add_option("--alpha", inv_alpha, "coherence threshold p/q");
    inv->add_flag("--json", inv_json, "machine readable output");
    inv->callback([&]() {
        Tournament t = load_tournament(inv_in);
        json out;
        out["n"] = t.size();
        out["tr"] = max_transitive(t, caps).size;
        out["P"] = max_pure_pair(t, caps).order;
        if (!inv_alpha.empty()) {
            Rational alpha = Rational::parse(inv_alpha);
            out["alpha"] = alpha.str();
            out["alpha_coherent"] = is_alpha_coherent(t, alpha, caps);
        }
        if (inv_json)
            std::cout << out.dump() << "\n";
        else
            std::cout << "n=" << out["n"] << " tr=" << out["tr"] << " P=" << out["P"]
                      << (inv_alpha.empty()
                              ? ""
                              : (out["alpha_coherent"].get<bool>() ? " coherent" : " not-coherent"))
                      << "\n";
    });

    // ---- recognize ----
    auto* rec = app.add_subcommand("recognize", "classify an ordered tournament");
    std::string rec_in, rec_ord;
    rec->add_option("--in", rec_in, "TRN1/UT1 input")->required();
    rec->add_option("--ordering", rec_ord, "ORD1 sidecar (default identity)");
    rec->callback([&]() {
        Tournament t = load_tournament(rec_in);
        Ordering theta = rec_ord.empty() ? Ordering::identity(t.size())
                                         : ordering_from_json(load_json(rec_ord), t.size());
        auto ot = backward_arcs(t, theta);
        json out;
        out["n"] = t.size();
        out["backward_arcs"] = (int)ot.backward.size();
        json star_kinds = json::array();
        for (const auto& s : classify_star_ordering(ot)) star_kinds.push_back(star_kind_name(s.kind));
        out["star_kinds"] = star_kinds;
        out["nebula"] = decompose_nebula(ot).has_value();
        out["galaxy"] = is_galaxy_ordering(ot);
        out["path_galaxy"] = is_path_galaxy_ordering(ot);
        out["regular_path_galaxy"] = is_regular_path_galaxy(ot);
        auto pair_star = classify_pair_star_ordering(ot);
        out["pair_star"] = pair_star.spec ? pair_star_to_json(*pair_star.spec) : json();
        out["golden_core_only"] = pair_star.golden_core_only;
        auto spiral = is_spiral_galaxy_ordering(ot);
        out["spiral"] = spiral ? spiral_spec_to_json(*spiral) : json();
        out["uniform"] = spiral && is_uniform(*spiral);
        out["backward_forest"] = is_backward_forest(ot);
        std::cout << out.dump(2) << "\n";
    });

    // ---- enumerate ----
    auto* enu = app.add_subcommand("enumerate", "isomorphism classes of n-vertex tournaments");
    int enu_n = 4;
    bool enu_list = false;
    enu->add_option("-n", enu_n, "vertex count")->required();
    enu->add_flag("--list", enu_list, "emit one UT1 line per class");
    enu->callback([&]() {
        long long count = 0;
        enumerate_tournaments(enu_n,
                              [&](const Tournament& t) {
                                  ++count;
                                  if (enu_list) std::cout << write_ut1(t) << "\n";
                              },
                              caps, jobs);
        if (!enu_list) {
            json out;
            out["n"] = enu_n;
            out["classes"] = count;
            std::cout << out.dump() << "\n";
        }
    });

    // ---- scan ----
    auto* scan = app.add_subcommand("scan", "P(T)/|T| over pattern-free tournaments");
    scan->set_help_flag("--help", "print help");   // frees -h for the pattern option
    std::string scan_h, scan_csv, scan_json;
    int scan_max = 5;
    scan->add_option("--h", scan_h, "pattern TRN1/UT1")->required();
    scan->add_option("--max-n", scan_max, "largest host size")->required();
    scan->add_option("--csv", scan_csv, "per-class CSV output path");
    scan->add_option("--json", scan_json, "summary JSON output path");
    scan->callback([&]() {
        Tournament pattern = load_tournament(scan_h);
        auto rep = strong_eh_scan(pattern, scan_max, caps, jobs);
        if (!scan_csv.empty()) spit(scan_csv, rep.csv());
        json summary = scan_summary_to_json(rep, pattern.size(), scan_max);
        if (!scan_json.empty())
            spit(scan_json, summary.dump(2) + "\n");
        else
            std::cout << summary.dump(2) << "\n";
    });

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generators");
    gen->require_subcommand(1);
    int gs_l = 1, gs_b = 1;
    std::string gs_kinds, gs_qkinds, gs_out = "-", gs_side;
    auto* gsp = gen->add_subcommand("spiral", "uniform spiral galaxy");
    gsp->add_option("--l", gs_l, "pair-star count")->required();
    gsp->add_option("--b", gs_b, "leaves per center")->required();
    gsp->add_option("--kinds", gs_kinds, "per pair-star kinds, comma separated");
    gsp->add_option("--qkinds", gs_qkinds, "per path-star kinds, comma separated");
    gsp->add_option("--out", gs_out, "TRN1 output path (default stdout)");
    gsp->add_option("--sidecar", gs_side, "ordering sidecar path");
    gsp->callback([&]() {
        UniformSpiralParams params;
        params.l = gs_l;
        params.b = gs_b;
        if (!gs_kinds.empty()) params.kinds = parse_kind_list(gs_kinds);
        if (!gs_qkinds.empty()) params.q_kinds = parse_kind_list(gs_qkinds);
        auto g = make_uniform_spiral(params);
        json sj;
        if (g.t.size() > 0) {
            auto spec = is_spiral_galaxy_ordering(backward_arcs(g.t, g.theta));
            if (spec) sj = spiral_spec_to_json(*spec);
        }
        sj["type"] = "spiral";
        emit_tournament(g.t, g.theta, sj, gs_out, gs_side);
    });
    std::string gl_blocks, gl_out = "-", gl_side;
    double gl_lambda = 0.0;
    uint64_t gl_seed = 1;
    auto* glay = gen->add_subcommand("layered", "layered host");
    glay->add_option("--blocks", gl_blocks, "sizes, comma separated")->required();
    glay->add_option("--lambda", gl_lambda, "cross-block backward probability");
    glay->add_option("--seed", gl_seed, "PRNG seed");
    glay->add_option("--out", gl_out, "TRN1 output path (default stdout)");
    glay->add_option("--sidecar", gl_side, "ordering sidecar path");
    glay->callback([&]() {
        LayeredHostSpec spec;
        spec.block_sizes = parse_int_list(gl_blocks);
        spec.forward_bias = 1.0 - gl_lambda;
        spec.seed = gl_seed;
        auto host = make_layered_host(spec);
        json sj;
        sj["type"] = "layered";
        sj["lambda"] = gl_lambda;
        sj["seed"] = gl_seed;
        sj["blocks"] = json::array();
        for (const auto& b : host.blocks) sj["blocks"].push_back(vertex_set_to_json(b));
        emit_tournament(host.t, Ordering::identity(host.t.size()), sj, gl_out, gl_side);
    });
    int gr_n = 8;
    uint64_t gr_seed = 1;
    std::string gr_out = "-", gr_side;
    auto* grnd = gen->add_subcommand("random", "uniform random tournament");
    grnd->add_option("-n", gr_n, "vertex count")->required();
    grnd->add_option("--seed", gr_seed, "PRNG seed");
    grnd->add_option("--out", gr_out, "TRN1 output path (default stdout)");
    grnd->add_option("--sidecar", gr_side, "ordering sidecar path");
    grnd->callback([&]() {
        Tournament t = random_tournament(gr_n, gr_seed);
        json sj;
        sj["type"] = "random";
        sj["seed"] = gr_seed;
        emit_tournament(t, Ordering::identity(t.size()), sj, gr_out, gr_side);
    });

    // ---- smooth ----
    auto* smooth = app.add_subcommand("smooth", "smooth structure tools");
    smooth->require_subcommand(1);
    std::string sv_in, sv_struct;
    auto* sver = smooth->add_subcommand("verify", "check a structure file against a host");
    sver->add_option("--in", sv_in, "host TRN1/UT1")->required();
    sver->add_option("--structure", sv_struct, "SMST1 JSON")->required();
    sver->callback([&]() {
        Tournament t = load_tournament(sv_in);
        auto s = smooth_from_json(load_json(sv_struct), t.size());
        auto rep = verify_smooth(t, s, caps);
        json out;
        out["valid"] = rep.valid;
        if (!rep.valid) out["violation"] = rep.violation->describe();
        std::cout << out.dump(2) << "\n";
        if (!rep.valid) std::exit(1);
    });
    std::string sf_in, sf_c = "1/10", sf_lambda = "1/4", sf_out = "-";
    int sf_w = 3, sf_budget = 100;
    uint64_t sf_seed = 1;
    auto* sfind = smooth->add_subcommand("find", "heuristic all-linear structure search");
    sfind->add_option("--in", sf_in, "host TRN1/UT1")->required();
    sfind->add_option("--w", sf_w, "block count")->required();
    sfind->add_option("--c", sf_c, "size floor fraction p/q");
    sfind->add_option("--lambda", sf_lambda, "density slack p/q");
    sfind->add_option("--budget", sf_budget, "restart budget");
    sfind->add_option("--seed", sf_seed, "PRNG seed");
    sfind->add_option("--out", sf_out, "structure output path");
    sfind->callback([&]() {
        Tournament t = load_tournament(sf_in);
        auto found = find_smooth_structure(t, sf_w, Rational::parse(sf_c),
                                           Rational::parse(sf_lambda), sf_budget, sf_seed, caps);
        if (!found) {
            std::cout << "{\"found\":false}\n";
            std::exit(1);
        }
        spit(sf_out, smooth_to_json(*found, t.size()).dump(2) + "\n");
    });

    // ---- forest-order ----
    auto* forest = app.add_subcommand("forest-order", "search for a forest ordering");
    std::string fo_in;
    forest->add_option("--in", fo_in, "TRN1/UT1 input")->required();
    forest->callback([&]() {
        Tournament t = load_tournament(fo_in);
        auto w = find_forest_ordering(t, caps, jobs);
        json out;
        out["found"] = w.has_value();
        if (w) out["ordering"] = w->perm;
        std::cout << out.dump() << "\n";
    });

    // ---- embed ----
    auto* emb = app.add_subcommand("embed", "embedding dichotomy");
    emb->set_help_flag("--help", "print help");   // frees -h for the pattern option
    std::string em_host, em_h, em_struct, em_trace, em_hord;
    int em_gap = -1;
    long long em_floor = -1;
    uint64_t em_seed = 1;
    emb->add_option("--host", em_host, "host TRN1/UT1")->required();
    emb->add_option("--h", em_h, "pattern: spiral:b=B,l=L or a TRN1/UT1 path")->required();
    emb->add_option("--h-ordering", em_hord, "pattern ordering sidecar (file patterns)");
    emb->add_option("--structure", em_struct, "SMST1 JSON for the host")->required();
    emb->add_option("--gap", em_gap, "reserve blocks between working blocks");
    emb->add_option("--floor", em_floor, "pure-pair order floor");
    emb->add_option("--seed", em_seed, "recorded in the result; the pipeline is deterministic");
    emb->add_option("--trace", em_trace, "stage trace JSON output path");
    emb->callback([&]() {
        Tournament host = load_tournament(em_host);
        Tournament h;
        Ordering theta;
        if (em_h.rfind("spiral:", 0) == 0) {
            int b = 1, l = 1;
            std::string rest = em_h.substr(7);
            std::stringstream ss(rest);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (tok.rfind("b=", 0) == 0)
                    b = std::stoi(tok.substr(2));
                else if (tok.rfind("l=", 0) == 0)
                    l = std::stoi(tok.substr(2));
                else
                    throw CLI::ValidationError("--h", "bad spiral parameter '" + tok + "'");
            }
            auto g = make_uniform_spiral({l, b, {}, {}, {}});
            h = g.t;
            theta = g.theta;
        } else {
            h = load_tournament(em_h);
            theta = em_hord.empty() ? Ordering::identity(h.size())
                                    : ordering_from_json(load_json(em_hord), h.size());
        }
        auto chi = smooth_from_json(load_json(em_struct), host.size());
        PipelineConfig cfg;
        cfg.gap = em_gap;
        cfg.floor_count = em_floor;
        cfg.caps = caps;
        auto res = embed_or_pure_pair(host, h, theta, chi, cfg);
        json out = embed_result_to_json(res);
        out["seed"] = em_seed;
        std::cout << out.dump(2) << "\n";
        if (!em_trace.empty()) spit(em_trace, trace_to_json(res.trace).dump(2) + "\n");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const MalformedInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
