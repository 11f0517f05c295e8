#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "tourlab/generators.hpp"
#include "tourlab/invariants.hpp"
#include "tourlab/structures.hpp"

using namespace tourlab;

namespace {

std::set<std::pair<int, int>> backward_set(const OrderedTournament& ot) {
    auto v = ot.backward_positions();
    return {v.begin(), v.end()};
}

void check_valid_tournament(const Tournament& t) {
    for (int i = 0; i < t.size(); ++i) {
        CHECK_FALSE(t.arc(i, i));
        for (int j = i + 1; j < t.size(); ++j) CHECK(t.arc(i, j) != t.arc(j, i));
    }
}

} // namespace

TEST_CASE("make_star templates") {
    auto right = make_star(StarKind::Right, 3);
    CHECK(backward_set(right) == std::set<std::pair<int, int>>{{2, 0}, {2, 1}});

    auto left = make_star(StarKind::Left, 2);
    CHECK(backward_set(left) == std::set<std::pair<int, int>>{{1, 0}});

    auto mid = make_star(StarKind::Middle, 4, 1);
    CHECK(backward_set(mid) == std::set<std::pair<int, int>>{{2, 1}, {3, 1}, {1, 0}});

    CHECK_THROWS_AS(make_star(StarKind::Right, 1), SizeTooSmall);
    CHECK_THROWS_AS(make_star(StarKind::Middle, 2), SizeTooSmall);
    CHECK_THROWS_AS(make_star(StarKind::Middle, 4, 3), ParamsOutOfRange);
}

TEST_CASE("make_pair_star templates") {
    auto mid = make_pair_star(StarKind::Middle, 1, 2);
    CHECK(mid.size() == 7);
    CHECK(backward_set(mid) ==
          std::set<std::pair<int, int>>{{4, 1}, {5, 2}, {1, 0}, {6, 5}});
    CHECK(classify_pair_star_ordering(mid).spec.has_value());

    auto left = make_pair_star(StarKind::Left, 1, 6);
    CHECK(left.size() == 7);
    auto res = classify_pair_star_ordering(left);
    REQUIRE(res.spec.has_value());
    CHECK(res.spec->kind == StarKind::Left);

    CHECK_THROWS_AS(make_pair_star(StarKind::Middle, 1, 1), ParamsOutOfRange);
}

TEST_CASE("make_uniform_spiral sizes") {
    CHECK(make_uniform_spiral({1, 1, {}, {}, {}}).t.size() == 9);
    auto two = make_uniform_spiral({2, 1, {}, {}, {}});
    CHECK(two.t.size() == 18);
    auto b2 = make_uniform_spiral({1, 2, {}, {}, {}});
    CHECK(b2.t.size() == 12);
    // h = l(3b+6) over the grid.
    for (int l = 0; l <= 3; ++l)
        for (int b = 1; b <= 3; ++b)
            CHECK(make_uniform_spiral({l, b, {}, {}, {}}).t.size() == l * (3 * b + 6));
}

TEST_CASE("round trip over the full grid, l <= 3, b <= 3, all kind combos") {
    const StarKind star_kinds[] = {StarKind::Middle, StarKind::Left, StarKind::Right};
    const StarKind q_kind_opts[] = {StarKind::Right, StarKind::Left};
    for (int l = 1; l <= 3; ++l)
        for (int b = 1; b <= 3; ++b) {
            int kind_combos = 1, q_combos = 1;
            for (int i = 0; i < l; ++i) {
                kind_combos *= 3;
                q_combos *= 2;
            }
            for (int kc = 0; kc < kind_combos; ++kc)
                for (int qc = 0; qc < q_combos; ++qc) {
                    UniformSpiralParams params;
                    params.l = l;
                    params.b = b;
                    int kk = kc, qq = qc;
                    for (int i = 0; i < l; ++i) {
                        params.kinds.push_back(star_kinds[kk % 3]);
                        kk /= 3;
                        params.q_kinds.push_back(q_kind_opts[qq % 2]);
                        qq /= 2;
                    }
                    auto gen = make_uniform_spiral(params);
                    check_valid_tournament(gen.t);
                    auto ot = backward_arcs(gen.t, gen.theta);
                    CHECK(is_backward_forest(ot));

                    auto spec = is_spiral_galaxy_ordering(ot);
                    REQUIRE(spec.has_value());
                    REQUIRE((int)spec->pair_stars.size() == l);
                    REQUIRE((int)spec->q_stars.size() == l);
                    auto up = uniform_params(*spec);
                    REQUIRE(up.has_value());
                    CHECK(up->l == l);
                    CHECK(up->b == b);
                    for (int i = 0; i < l; ++i) {
                        CHECK(spec->pair_stars[i].kind == params.kinds[i]);
                        CHECK((int)spec->pair_stars[i].run1.size() == b);
                        // Path star kind: unambiguous for b >= 2, ambiguous at b = 1.
                        bool kind_ok = false;
                        for (StarKind k : spec->q_kinds[i])
                            if (k == params.q_kinds[i]) kind_ok = true;
                        CHECK(kind_ok);
                    }
                }
        }
}

TEST_CASE("spiral self-containment") {
    auto gen = make_uniform_spiral({1, 1, {}, {}, {}});
    auto spec = is_spiral_galaxy_ordering(backward_arcs(gen.t, gen.theta));
    REQUIRE(spec.has_value());
    VertexSet s1(gen.t.size());
    for (int p : spec->pair_stars[0].positions()) s1.add(gen.theta.vertex_at(p));
    Tournament pair_star = induced(gen.t, s1).t;
    CHECK(contains(gen.t, pair_star).has_value());
}

TEST_CASE("make_h_plus") {
    // b = 1 and b = 2 add no leaves.
    for (int b : {1, 2}) {
        auto gen = make_uniform_spiral({1, b, {}, {}, {}});
        VertexSet v1(gen.t.size());
        for (int p = gen.q_starts[0]; p < gen.t.size(); ++p) v1.add(gen.theta.vertex_at(p));
        auto hp = make_h_plus(gen.t, gen.theta, v1, b);
        CHECK(hp.added == 0);
        CHECK(hp.t.size() == gen.t.size());
    }
    // b = 3: each path star gains 2^(b-1) - b = 1 leaf.
    auto gen = make_uniform_spiral({1, 3, {}, {}, {}});
    VertexSet v1(gen.t.size());
    for (int p = gen.q_starts[0]; p < gen.t.size(); ++p) v1.add(gen.theta.vertex_at(p));
    auto hp = make_h_plus(gen.t, gen.theta, v1, 3);
    CHECK(hp.added == 1);
    CHECK(hp.t.size() == gen.t.size() + 1);
    // The blown-up path star now carries 2^(b-1) = 4 leaves.
    auto sub_positions = [&]() {
        std::vector<int> ps;
        auto pos = hp.sigma_plus.positions();
        for (int v = 0; v < hp.t.size(); ++v)
            if (v >= gen.t.size() || v1.test(v)) ps.push_back(pos[v]);
        std::sort(ps.begin(), ps.end());
        return ps;
    }();
    CHECK((int)sub_positions.size() == 5);

    // Malformed: a backward arc crossing the split.
    VertexSet bad(gen.t.size());
    bad.add(gen.theta.vertex_at(1));
    CHECK_THROWS_AS(make_h_plus(gen.t, gen.theta, bad, 3), MalformedSigma);
}

TEST_CASE("random and transitive hosts") {
    auto a = random_tournament(5, 42), b = random_tournament(5, 42);
    CHECK(a == b);
    auto c = random_tournament(5, 43);
    CHECK_FALSE(a == c);
    check_valid_tournament(random_tournament(20, 7));

    CHECK(is_transitive(transitive_tournament(4)));

    Tournament big = random_tournament(200, 1);
    long long arcs = 0;
    for (int v = 0; v < 200; ++v) arcs += big.out_degree(v);
    CHECK(arcs == 19900);
}

TEST_CASE("layered host") {
    LayeredHostSpec spec;
    spec.block_sizes = {4, 4, 4};
    spec.seed = 9;

    spec.forward_bias = 1.0;
    auto full = make_layered_host(spec);
    check_valid_tournament(full.t);
    for (int u = 0; u < 4; ++u)
        for (int v = 4; v < 12; ++v) CHECK(full.t.arc(u, v));

    spec.forward_bias = 0.0;
    auto none = make_layered_host(spec);
    for (int u = 0; u < 4; ++u)
        for (int v = 4; v < 12; ++v) CHECK(none.t.arc(v, u));

    spec.forward_bias = 0.9;
    auto x = make_layered_host(spec), y = make_layered_host(spec);
    CHECK(x.t == y.t);
}
