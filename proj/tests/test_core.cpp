#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <set>

#include "tourlab/canonical.hpp"
#include "tourlab/io.hpp"
#include "tourlab/tournament.hpp"

using namespace tourlab;

namespace {

// The labeled 3-cycle 0 -> 1 -> 2 -> 0.
Tournament c3() { return build_tournament(3, {{2, 0}}); }

Tournament transitive_n(int n) { return build_tournament(n, {}); }

// Quadratic-residue tournament on 5: i -> j iff j - i in {1, 2} mod 5.
Tournament qr5() {
    Tournament t(5);
    for (int i = 0; i < 5; ++i)
        for (int d : {1, 2}) t.set_arc(i, (i + d) % 5);
    return t;
}

// Exhaustive minimal form over all permutations; no pruning of any kind.
CanonicalForm brute_min_form(const Tournament& t) {
    int n = t.size();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    CanonicalForm best;
    bool have = false;
    do {
        Tournament r = relabel(t, perm);
        CanonicalForm cf;
        cf.n = n;
        cf.bits.assign(std::max(1, (n * (n - 1) / 2 + 63) / 64), 0);
        int b = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (r.arc(i, j)) cf.bits[b >> 6] |= uint64_t(1) << (63 - (b & 63));
                ++b;
            }
        if (!have || cf < best) {
            best = cf;
            have = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

std::vector<Tournament> all_orientations(int n) {
    std::vector<Tournament> out;
    int pairs = n * (n - 1) / 2;
    for (uint64_t mask = 0; mask < (uint64_t(1) << pairs); ++mask) {
        Tournament t(n);
        int b = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if ((mask >> b) & 1)
                    t.set_arc(i, j);
                else
                    t.set_arc(j, i);
                ++b;
            }
        out.push_back(t);
    }
    return out;
}

} // namespace

TEST_CASE("build_tournament basics") {
    Tournament rev = build_tournament(3, {{1, 0}, {2, 1}, {0, 2}});
    CHECK(rev.arc(1, 0));
    CHECK(rev.arc(2, 1));
    CHECK(rev.arc(0, 2));
    CHECK_FALSE(rev.arc(0, 1));
    CHECK_FALSE(is_transitive(rev));

    Tournament t = c3();
    CHECK(t.arc(0, 1));
    CHECK(t.arc(1, 2));
    CHECK(t.arc(2, 0));

    Tournament tr = transitive_n(3);
    CHECK(tr.arc(0, 1));
    CHECK(tr.arc(0, 2));
    CHECK(tr.arc(1, 2));

    CHECK_THROWS_AS(build_tournament(3, {{0, 1}, {1, 0}}), DuplicateOrConflictingArc);
    CHECK_THROWS_AS(build_tournament(3, {{0, 0}}), DuplicateOrConflictingArc);
    CHECK_THROWS_AS(build_tournament(3, {{0, 3}}), VertexOutOfRange);
}

TEST_CASE("is_transitive") {
    CHECK(is_transitive(transitive_n(3)));
    CHECK_FALSE(is_transitive(c3()));
    CHECK_FALSE(is_transitive(qr5()));
    CHECK(is_transitive(transitive_n(1)));
}

TEST_CASE("backward_arcs") {
    auto ot = backward_arcs(c3(), Ordering::identity(3));
    REQUIRE(ot.backward.size() == 1);
    CHECK(ot.backward[0] == std::pair<int, int>(2, 0));

    auto tr = backward_arcs(transitive_n(3), Ordering::identity(3));
    CHECK(tr.backward.empty());

    auto four = backward_arcs(build_tournament(4, {{3, 0}, {2, 1}}), Ordering::identity(4));
    std::set<std::pair<int, int>> got(four.backward.begin(), four.backward.end());
    CHECK(got == std::set<std::pair<int, int>>{{3, 0}, {2, 1}});

    CHECK_THROWS_AS(backward_arcs(c3(), Ordering({0, 0, 1})), InvalidPermutation);
    CHECK_THROWS_AS(backward_arcs(c3(), Ordering({0, 1})), InvalidPermutation);
}

TEST_CASE("backward plus forward arc count") {
    for (const Tournament& t : all_orientations(4)) {
        auto ot = backward_arcs(t, Ordering({2, 0, 3, 1}));
        int backward = (int)ot.backward.size();
        int forward = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j && t.arc(i, j) && ot.position(i) < ot.position(j)) ++forward;
        CHECK(backward + forward == 6);
    }
}

TEST_CASE("directed_density") {
    Tournament t = c3();
    CHECK(directed_density(t, VertexSet::of(3, {0}), VertexSet::of(3, {1})) == Rational(1));
    CHECK(directed_density(t, VertexSet::of(3, {0, 1}), VertexSet::of(3, {2})) == Rational(1, 2));
    CHECK_THROWS_AS(directed_density(t, VertexSet(3), VertexSet::of(3, {1})), EmptySet);
    CHECK_THROWS_AS(directed_density(t, VertexSet::of(3, {0, 1}), VertexSet::of(3, {1})), SetsOverlap);
}

TEST_CASE("density complement identity") {
    Tournament t = qr5();
    std::vector<VertexSet> sets;
    for (int mask = 1; mask < 32; ++mask) {
        VertexSet s(5);
        for (int v = 0; v < 5; ++v)
            if ((mask >> v) & 1) s.add(v);
        sets.push_back(s);
    }
    for (const auto& x : sets)
        for (const auto& y : sets) {
            if (x.intersects(y)) continue;
            CHECK(directed_density(t, x, y) + directed_density(t, y, x) == Rational(1));
        }
}

TEST_CASE("restricted density lower bound, exhaustive") {
    // For disjoint A1, A2 and X in A1, Y in A2 meeting the eta fractions,
    // d(X,Y) >= 1 - lambda/(eta1*eta2) with lambda = 1 - d(A1,A2). Exact.
    Tournament t = build_tournament(7, {{3, 0}, {4, 1}, {5, 2}, {6, 0}, {5, 1}, {6, 4}});
    int n = 7;
    for (int m1 = 1; m1 < (1 << n); ++m1)
        for (int m2 = 1; m2 < (1 << n); ++m2) {
            if (m1 & m2) continue;
            if (std::popcount(unsigned(m1)) > 3 || std::popcount(unsigned(m2)) > 3) continue;
            VertexSet a1(n), a2(n);
            for (int v = 0; v < n; ++v) {
                if ((m1 >> v) & 1) a1.add(v);
                if ((m2 >> v) & 1) a2.add(v);
            }
            Rational lambda = Rational(1) - directed_density(t, a1, a2);
            for (int s1 = m1; s1; s1 = (s1 - 1) & m1)
                for (int s2 = m2; s2; s2 = (s2 - 1) & m2) {
                    VertexSet x(n), y(n);
                    for (int v = 0; v < n; ++v) {
                        if ((s1 >> v) & 1) x.add(v);
                        if ((s2 >> v) & 1) y.add(v);
                    }
                    Rational eta1(x.count(), a1.count());
                    Rational eta2(y.count(), a2.count());
                    Rational bound = Rational(1) - lambda / (eta1 * eta2);
                    CHECK(directed_density(t, x, y) >= bound);
                }
        }
}

TEST_CASE("induced") {
    auto r = induced(c3(), VertexSet::of(3, {0, 1}));
    CHECK(r.t.size() == 2);
    CHECK(r.t.arc(0, 1));
    CHECK(r.index_map == std::vector<int>{0, 1});

    auto full = induced(c3(), VertexSet::full(3));
    CHECK(full.t == c3());

    auto sub = induced(transitive_n(5), VertexSet::of(5, {0, 2, 4}));
    CHECK(is_transitive(sub.t));
    CHECK_THROWS_AS(induced(c3(), VertexSet(3)), EmptySet);
}

TEST_CASE("canonical form vs brute force, all n <= 4 plus spot checks") {
    for (int n = 1; n <= 4; ++n)
        for (const Tournament& t : all_orientations(n)) CHECK(canonical_form(t) == brute_min_form(t));
    CHECK(canonical_form(qr5()) == brute_min_form(qr5()));
}

TEST_CASE("canonical form is relabeling invariant, exhaustive n <= 5") {
    for (int n = 2; n <= 5; ++n) {
        std::vector<Tournament> reps;
        enumerate_tournaments(n, [&](const Tournament& t) { reps.push_back(t); });
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (const auto& t : reps) {
            CanonicalForm cf = canonical_form(t);
            CanonicalForm cfm = canonical_form_max(t);
            std::vector<int> p = perm;
            do {
                Tournament r = relabel(t, p);
                CHECK(canonical_form(r) == cf);
                CHECK(canonical_form_max(r) == cfm);
            } while (std::next_permutation(p.begin(), p.end()));
        }
    }
}

TEST_CASE("canonical distinguishes non-isomorphic") {
    CHECK_FALSE(canonical_form(c3()) == canonical_form(transitive_n(3)));
    std::set<CanonicalForm> four;
    enumerate_tournaments(4, [&](const Tournament& t) { four.insert(canonical_form(t)); });
    CHECK(four.size() == 4);
}

TEST_CASE("enumeration counts, small") {
    long long expected[] = {0, 1, 1, 2, 4, 12, 56};
    for (int n = 1; n <= 6; ++n) {
        CHECK(count_tournament_classes(n) == expected[n]);
        CHECK(count_tournament_classes(n, Caps(), 1, true) == expected[n]);
    }
    Caps caps;
    caps.enumerate_max = 4;
    CHECK_THROWS_AS(count_tournament_classes(5, caps), SizeTooLargeForExhaustive);
}

TEST_CASE("enumeration agrees with direct orientation sweep, n <= 5") {
    for (int n = 2; n <= 5; ++n) {
        std::set<CanonicalForm> direct;
        for (const Tournament& t : all_orientations(n)) direct.insert(canonical_form(t));
        CHECK((long long)direct.size() == count_tournament_classes(n));
    }
}

TEST_CASE("enumeration deterministic across worker counts") {
    std::vector<CanonicalForm> a, b;
    enumerate_tournaments(6, [&](const Tournament& t) { a.push_back(canonical_form(t)); }, Caps(), 1);
    enumerate_tournaments(6, [&](const Tournament& t) { b.push_back(canonical_form(t)); }, Caps(), 8);
    CHECK(a == b);
}

TEST_CASE("transitive iff some ordering has no backward arcs, exhaustive n <= 5") {
    for (int n = 2; n <= 5; ++n) {
        std::vector<Tournament> reps;
        enumerate_tournaments(n, [&](const Tournament& t) { reps.push_back(t); });
        std::vector<int> perm(n);
        for (const auto& t : reps) {
            std::iota(perm.begin(), perm.end(), 0);
            bool found = false;
            do {
                if (backward_arcs(t, Ordering(perm)).backward.empty()) {
                    found = true;
                    break;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            CHECK(found == is_transitive(t));
        }
    }
}

TEST_CASE("TRN1 round trip and validation") {
    Tournament t = qr5();
    CHECK(read_trn1(write_trn1(t)) == t);
    CHECK(read_trn1(write_trn1(c3())) == c3());

    CHECK_THROWS_AS(read_trn1("2\n01\n01\n"), MalformedInput);   // antisymmetry
    CHECK_THROWS_AS(read_trn1("2\n11\n00\n"), MalformedInput);   // diagonal
    CHECK_THROWS_AS(read_trn1("2\n0\n00\n"), MalformedInput);    // row length
    CHECK_THROWS_AS(read_trn1("x\n"), MalformedInput);
}

TEST_CASE("UT1 round trip") {
    for (const Tournament& t : all_orientations(4)) CHECK(read_ut1(write_ut1(t)) == t);
    Tournament t = qr5();
    CHECK(read_ut1(write_ut1(t)) == t);
    std::string s = write_ut1(t);
    CHECK(s.rfind("UT1 n=5 ", 0) == 0);
    CHECK(s.size() == 8 + 3);   // 10 bits -> 3 hex digits
    CHECK_THROWS_AS(read_ut1("UT1 n=5 ff"), MalformedInput);
    CHECK_THROWS_AS(read_ut1("UT2 n=5 ffc"), MalformedInput);
}
