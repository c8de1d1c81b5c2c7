#include <catch2/catch_amalgamated.hpp>

#include "opalg/corpus.hpp"
#include "opalg/group.hpp"

using namespace opalg;

TEST_CASE("group generation from permutations") {
    GroupPtr g = corpus::s3();
    REQUIRE(g->order == 6);
    REQUIRE(g->identity == 0);
    REQUIRE(g->labels[0] == "e");
    g->validate();

    // convention: mul(g, h) applies h first, then g
    // find (1 2) and (1 2 3) by label
    int t = -1, c = -1;
    for (int i = 0; i < g->order; ++i) {
        if (g->labels[i] == "(1 2)") t = i;
        if (g->labels[i] == "(1 2 3)") c = i;
    }
    REQUIRE(t >= 0);
    REQUIRE(c >= 0);
    REQUIRE(g->mul(t, t) == 0);
    REQUIRE(g->mul(c, g->mul(c, c)) == 0);
    REQUIRE(g->inv(c) != c);
}

TEST_CASE("generator validation rejects non-bijections") {
    REQUIRE_THROWS_AS(group_from_generators({{0, 0, 1}}), NotBijective);
    REQUIRE_THROWS_AS(group_from_generators({{1, 2, 3, 4, 0}}, 3), ClosureCapExceeded);
}

TEST_CASE("subgroup lattice sizes for the corpus") {
    REQUIRE(all_subgroups(corpus::s3()).size() == 6);
    REQUIRE(all_subgroups(corpus::s4()).size() == 30);
    REQUIRE(all_subgroups(corpus::d4()).size() == 10);
    REQUIRE(all_subgroups(corpus::q8()).size() == 6);
    REQUIRE(all_subgroups(corpus::z6()).size() == 4);
    REQUIRE(all_subgroups(corpus::z2z2()).size() == 5);
}

TEST_CASE("subgroup construction and validation") {
    GroupPtr g = corpus::s3();
    REQUIRE_THROWS_AS(make_subgroup(g, {0, 1}), NotASubgroup);
    // A3 = elements of order dividing 3
    std::vector<int> elems;
    for (int i = 0; i < g->order; ++i)
        if (g->mul(i, g->mul(i, i)) == 0) elems.push_back(i);
    Subgroup h = make_subgroup(g, elems);
    REQUIRE(h.order() == 3);
    REQUIRE(is_subgroup(*g, h.elements));
}

TEST_CASE("normalizer, centralizer, center") {
    GroupPtr g = corpus::s3();
    std::vector<int> a3_elems;
    for (int i = 0; i < g->order; ++i)
        if (g->mul(i, g->mul(i, i)) == 0) a3_elems.push_back(i);
    Subgroup a3 = make_subgroup(g, a3_elems);
    REQUIRE(normalizer(g, a3).order() == 6);   // A3 is normal
    REQUIRE(centralizer(g, a3).order() == 3);  // A3 is its own centralizer
    REQUIRE(center(g).order() == 1);           // S3 has trivial center

    GroupPtr q = corpus::q8();
    REQUIRE(center(q).order() == 2);
}

TEST_CASE("coset representatives partition the group") {
    GroupPtr g = corpus::s4();
    for (const Subgroup& h : all_subgroups(g)) {
        std::vector<int> reps = coset_representatives(g, h, CosetSide::Left);
        REQUIRE((int)reps.size() * h.order() == g->order);
        REQUIRE(reps[0] == g->identity);
        std::vector<bool> covered(g->order, false);
        for (int r : reps)
            for (int x : h.elements) {
                int y = g->mul(r, x);
                REQUIRE(!covered[y]);
                covered[y] = true;
            }
    }
}

TEST_CASE("conjugation orbits satisfy orbit-stabilizer") {
    GroupPtr g = corpus::s3();
    for (const Subgroup& h : all_subgroups(g)) {
        ConjugationOrbit o = conjugation_orbit(g, h);
        REQUIRE((int)o.orbit.size() * o.stabilizer.order() == g->order);
    }
}

TEST_CASE("order cap for subgroup enumeration") {
    Permutation cyc(72);
    for (int i = 0; i < 72; ++i) cyc[i] = (i + 1) % 72;
    GroupPtr big = group_from_generators({cyc}, 5040, "Z72");
    REQUIRE(big->order == 72);
    REQUIRE_THROWS_AS(all_subgroups(big), OrderCapExceeded);
}
