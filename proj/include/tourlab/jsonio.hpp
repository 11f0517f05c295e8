#pragma once

#include <json.hpp>

#include "tourlab/embed.hpp"
#include "tourlab/generators.hpp"
#include "tourlab/invariants.hpp"
#include "tourlab/io.hpp"
#include "tourlab/smooth.hpp"
#include "tourlab/structures.hpp"

namespace tourlab {

using json = nlohmann::json;

inline json vertex_set_to_json(const VertexSet& s) { return json(s.to_vector()); }

inline VertexSet vertex_set_from_json(const json& j, int n) {
    VertexSet s(n);
    for (int v : j.get<std::vector<int>>()) {
        if (v < 0 || v >= n) throw MalformedInput("vertex out of range in JSON set");
        s.add(v);
    }
    return s;
}

inline json star_spec_to_json(const StarSpec& s) {
    json j;
    j["kind"] = star_kind_name(s.kind);
    j["center"] = s.center;
    j["leaves"] = s.leaves;
    if (s.split >= 0) j["split"] = s.split;
    return j;
}

inline json pair_star_to_json(const PairStarSpec& ps) {
    json j;
    j["kind"] = star_kind_name(ps.kind);
    j["golden"] = std::vector<int>(ps.golden.begin(), ps.golden.end());
    j["centers"] = {ps.center_lo, ps.center_hi};
    j["run1"] = ps.run1;
    j["run2"] = ps.run2;
    j["run1_center"] = ps.run1_center;
    j["split"] = ps.split();
    return j;
}

inline json spiral_spec_to_json(const SpiralGalaxySpec& spec) {
    json j;
    j["pair_stars"] = json::array();
    for (const auto& ps : spec.pair_stars) j["pair_stars"].push_back(pair_star_to_json(ps));
    j["q_stars"] = json::array();
    for (const auto& q : spec.q_stars) j["q_stars"].push_back(star_spec_to_json(q));
    j["q_kinds"] = json::array();
    for (const auto& ks : spec.q_kinds) {
        json arr = json::array();
        for (StarKind k : ks) arr.push_back(star_kind_name(k));
        j["q_kinds"].push_back(arr);
    }
    j["free"] = vertex_set_to_json(spec.free_vertices);
    if (auto up = uniform_params(spec)) {
        j["uniform"] = true;
        j["l"] = up->l;
        j["t"] = up->t;
        j["b"] = up->b;
    } else {
        j["uniform"] = false;
        j["l"] = (int)spec.pair_stars.size();
        j["t"] = (int)spec.q_stars.size();
    }
    return j;
}

// Structure files: {"format":"SMST1","n":...,"blocks":[[...]],"w":[...],"c":"p/q","lambda":"p/q"}
inline json smooth_to_json(const SmoothStructure& s, int n) {
    json j;
    j["format"] = "SMST1";
    j["n"] = n;
    j["blocks"] = json::array();
    for (const auto& b : s.blocks) j["blocks"].push_back(vertex_set_to_json(b));
    j["w"] = std::vector<int>(s.w.begin(), s.w.end());
    j["c"] = s.c.str();
    j["lambda"] = s.lambda.str();
    return j;
}

inline SmoothStructure smooth_from_json(const json& j, int n) {
    try {
        if (j.at("format") != "SMST1") throw MalformedInput("structure: bad format tag");
        if (j.at("n").get<int>() != n)
            throw MalformedInput("structure: vertex count does not match the host");
        SmoothStructure s;
        for (const auto& b : j.at("blocks")) s.blocks.push_back(vertex_set_from_json(b, n));
        for (int w : j.at("w").get<std::vector<int>>()) s.w.push_back((uint8_t)w);
        s.c = Rational::parse(j.at("c").get<std::string>());
        s.lambda = Rational::parse(j.at("lambda").get<std::string>());
        if (s.w.size() != s.blocks.size()) throw MalformedInput("structure: |w| != block count");
        return s;
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("structure JSON: ") + e.what());
    }
}

inline json ordering_sidecar_to_json(const Ordering& theta, const json& spec) {
    json j;
    j["format"] = "ORD1";
    j["n"] = (int)theta.perm.size();
    j["ordering"] = theta.perm;
    if (!spec.is_null()) j["spec"] = spec;
    return j;
}

inline Ordering ordering_from_json(const json& j, int n) {
    try {
        Ordering theta(j.at("ordering").get<std::vector<int>>());
        theta.validate(n);
        return theta;
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("ordering JSON: ") + e.what());
    } catch (const InvalidPermutation&) {
        throw MalformedInput("ordering JSON: not a permutation of the host vertices");
    }
}

inline json pure_pair_to_json(const PurePair& p) {
    json j;
    j["a"] = vertex_set_to_json(p.a);
    j["b"] = vertex_set_to_json(p.b);
    j["order"] = p.order;
    return j;
}

inline json trace_to_json(const EmbedTrace& tr) {
    json j;
    j["w_blocks"] = tr.w_blocks;
    j["pair_stars"] = json::array();
    for (const auto& st : tr.pair_stars) {
        json s;
        s["vertices"] = st.vertices;
        s["blocks"] = st.blocks;
        s["pruned"] = st.pruned;
        s["kept"] = st.kept;
        j["pair_stars"].push_back(s);
    }
    j["phi_tilde"] = tr.phi_tilde;
    j["phi_star"] = tr.phi_star;
    j["sigma_mask"] = tr.sigma_mask;
    j["sigma"] = tr.sigma;
    j["v1"] = tr.v1;
    j["v2"] = tr.v2;
    j["h_plus_added"] = tr.h_plus_added;
    j["enrichment"] = json::array();
    for (auto [p, c] : tr.enrichment) j["enrichment"].push_back({p, c});
    j["path_stars"] = json::array();
    for (const auto& st : tr.path_stars) {
        json s;
        s["vertices"] = st.vertices;
        s["blocks"] = st.blocks;
        j["path_stars"].push_back(s);
    }
    j["waived"] = tr.waived;
    return j;
}

inline json embed_result_to_json(const EmbedResult& r) {
    json j;
    switch (r.variant) {
        case EmbedResult::Variant::Copy:
            j["variant"] = "copy";
            j["map"] = r.map;
            break;
        case EmbedResult::Variant::Pure:
            j["variant"] = "pure";
            j["witness"] = pure_pair_to_json(r.pure);
            break;
        default:
            j["variant"] = "failure";
            j["reason"] = r.reason;
    }
    j["floor"] = r.floor_used;
    j["waived"] = r.trace.waived;
    return j;
}

inline json scan_summary_to_json(const ScanReport& rep, int pattern_n, int max_n) {
    json j;
    j["pattern_n"] = pattern_n;
    j["max_n"] = max_n;
    j["empty_universe"] = rep.empty_universe;
    j["rows"] = (int)rep.rows.size();
    if (!rep.empty_universe) {
        j["min_ratio"] = rep.min_ratio.str();
        j["argmin_trn1"] = write_trn1(rep.argmin);
    }
    return j;
}

} // namespace tourlab
