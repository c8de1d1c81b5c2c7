#include <catch2/catch_amalgamated.hpp>

#include "opalg/corpus.hpp"
#include "opalg/expectation.hpp"

using namespace opalg;

namespace {

Subgroup a3_subgroup(GroupPtr g) {
    std::vector<int> elems;
    for (int i = 0; i < g->order; ++i)
        if (g->mul(i, g->mul(i, i)) == 0) elems.push_back(i);
    return make_subgroup(g, elems);
}

} // namespace

TEST_CASE("subgroup truncation is a conditional expectation with index [G:H]") {
    for (GroupPtr g : {corpus::s3(), corpus::z6(), corpus::d4(), corpus::q8(),
                       corpus::z2z2()}) {
        AlgebraPtr a = make_group_algebra(g);
        Rng rng(1);
        for (const Subgroup& h : all_subgroups(g)) {
            CondExp e = expectation_subgroup(a, h);
            verify_cond_exp(e, rng);
            auto qb = quasi_basis_solve(e);
            REQUIRE((int)qb.first.size() == g->order / h.order());
            AlgElement expect = (double)(g->order / h.order()) * one_element(a);
            REQUIRE((qb.second - expect).coeffs.norm() == 0.0); // exact
            Mat phi = reconstruction_matrix(e, qb.first);
            REQUIRE((phi - Mat::Identity(a->dim, a->dim)).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("trace-preserving expectation onto C[A3]: frame quasi-basis") {
    AlgebraPtr a = make_group_algebra(corpus::s3());
    Subgroup a3 = a3_subgroup(a->group);
    StarSubalgebra ca3 = subgroup_algebra(a, a3);
    CondExp e = expectation_trace_preserving(a, ca3);
    Rng rng(2);
    verify_cond_exp(e, rng);
    // tau-preservation
    for (int t = 0; t < 10; ++t) {
        AlgElement x(a, rng.cgaussian_vec(a->dim));
        REQUIRE(std::abs(tau(e.apply(x)) - tau(x)) < 1e-10);
    }
    auto qb = quasi_basis_solve(e);
    AlgElement expect = 2.0 * one_element(a);
    REQUIRE((qb.second - expect).coeffs.norm() < 1e-8);
}

TEST_CASE("tracial expectation M2 -> C has index 4") {
    AlgebraPtr m2 = corpus::m2();
    CondExp e = expectation_trace_preserving(m2, scalar_subalgebra(m2));
    auto qb = quasi_basis_solve(e);
    AlgElement expect = 4.0 * one_element(m2);
    REQUIRE((qb.second - expect).coeffs.norm() < 1e-9);
}

TEST_CASE("pimsner-popa constants for known inclusions") {
    AlgebraPtr a = make_group_algebra(corpus::s3());
    Subgroup a3 = a3_subgroup(a->group);
    CondExp e = expectation_subgroup(a, a3);
    Rng rng(3);
    double c = pimsner_popa_constant(e, rng, 32);
    REQUIRE(c >= 0.5 - 1e-9); // 1/[G:H]
    REQUIRE(c <= 0.5 + 1e-7); // attained at x = e + (1 2)

    AlgebraPtr m2 = corpus::m2();
    CondExp em = expectation_trace_preserving(m2, scalar_subalgebra(m2));
    double cm = pimsner_popa_constant(em, rng, 32);
    REQUIRE(cm >= 0.25 - 1e-9); // >= 1/||Ind||
    REQUIRE(cm <= 0.5 + 1e-7);  // sharp constant for the tracial pair
}

TEST_CASE("relative commutant and center of C[S3]") {
    AlgebraPtr a = make_group_algebra(corpus::s3());
    Subgroup a3 = a3_subgroup(a->group);
    StarSubalgebra ca3 = subgroup_algebra(a, a3);
    StarSubalgebra comm = relative_commutant(ca3, a);
    REQUIRE(comm.dim() == 4);
    validate_star_subalgebra(comm);
    StarSubalgebra z = algebra_center(a);
    REQUIRE(z.dim() == 3); // three conjugacy classes
    validate_star_subalgebra(z);

    // irreducible inclusion: delta inside M2 has trivial relative commutant... no;
    // C1 inside M2 has commutant M2, delta has commutant delta
    AlgebraPtr m2 = corpus::m2();
    REQUIRE(relative_commutant(scalar_subalgebra(m2), m2).dim() == 4);
    REQUIRE(relative_commutant(diagonal_subalgebra(m2), m2).dim() == 2);
}

TEST_CASE("compatible expectation exists exactly along truncation chains") {
    GroupPtr g = corpus::s3();
    AlgebraPtr a = make_group_algebra(g);
    Rng rng(4);
    auto subs = all_subgroups(g);
    for (const Subgroup& h : subs)
        for (const Subgroup& k : subs) {
            bool contained = true;
            for (int e : h.elements)
                if (!k.contains(e)) { contained = false; break; }
            if (!contained) continue;
            CondExp eh = expectation_subgroup(a, h);
            CondExp ek = expectation_subgroup(a, k);
            // exact compatibility of truncations
            REQUIRE((eh.matrix * ek.matrix - eh.matrix).cwiseAbs().maxCoeff() == 0.0);
            auto f = compatible_expectation(eh, ek.target, rng);
            REQUIRE(f.has_value());
            REQUIRE(same_algebra(f->target, ek.target));
        }
}

TEST_CASE("compatible expectation is found for a conjugated diagonal in M2") {
    AlgebraPtr m2 = corpus::m2();
    CondExp e = expectation_trace_preserving(m2, scalar_subalgebra(m2));
    Rng rng(5);
    AlgElement u = random_unitary(full_subalgebra(m2), rng);
    StarSubalgebra moved = conjugate_subalgebra(diagonal_subalgebra(m2), u);
    auto f = compatible_expectation(e, moved, rng);
    REQUIRE(f.has_value());
    verify_cond_exp(*f, rng);
}

TEST_CASE("conjugated expectation passes certification") {
    AlgebraPtr m2 = corpus::m2();
    CondExp f = expectation_trace_preserving(m2, diagonal_subalgebra(m2));
    Rng rng(6);
    AlgElement u = random_unitary(full_subalgebra(m2), rng);
    CondExp fu = conjugate_expectation(f, u);
    verify_cond_exp(fu, rng);
    REQUIRE(same_algebra(fu.target, conjugate_subalgebra(f.target, u)));
}

TEST_CASE("normalizer membership for group unitaries") {
    AlgebraPtr a = make_group_algebra(corpus::s3());
    Subgroup a3 = a3_subgroup(a->group);
    StarSubalgebra ca3 = subgroup_algebra(a, a3);
    // A3 is normal: every group element normalizes C[A3]
    for (int g = 0; g < a->group->order; ++g)
        REQUIRE(normalizer_membership(group_element(a, g), ca3));
    // a generic unitary does not
    Rng rng(7);
    AlgElement u = random_unitary(full_subalgebra(a), rng);
    REQUIRE(!normalizer_membership(u, ca3));
    REQUIRE_THROWS_AS(normalizer_membership(2.0 * u, ca3), NotUnitary);
}
