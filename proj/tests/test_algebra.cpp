#include <catch2/catch_amalgamated.hpp>

#include "opalg/corpus.hpp"
#include "opalg/subalgebra.hpp"

using namespace opalg;

namespace {

int find_label(GroupPtr g, const std::string& label) {
    for (int i = 0; i < g->order; ++i)
        if (g->labels[i] == label) return i;
    return -1;
}

} // namespace

TEST_CASE("algebra multiplication is associative and unital") {
    AlgebraPtr a = make_group_algebra(corpus::s3());
    Rng rng(7);
    AlgElement one = one_element(a);
    for (int t = 0; t < 10; ++t) {
        AlgElement x(a, rng.cgaussian_vec(a->dim));
        AlgElement y(a, rng.cgaussian_vec(a->dim));
        AlgElement z(a, rng.cgaussian_vec(a->dim));
        REQUIRE(((x * y) * z - x * (y * z)).coeffs.norm() < 1e-10);
        REQUIRE((one * x - x).coeffs.norm() < 1e-12);
        REQUIRE((x * one - x).coeffs.norm() < 1e-12);
        // *-algebra identities
        REQUIRE((adjoint(adjoint(x)) - x).coeffs.norm() < 1e-12);
        REQUIRE((adjoint(x * y) - adjoint(y) * adjoint(x)).coeffs.norm() < 1e-10);
    }
}

TEST_CASE("trace is faithful, normalized and tracial") {
    for (AlgebraPtr a : {make_group_algebra(corpus::s3()), corpus::m2()}) {
        Rng rng(11);
        REQUIRE(std::abs(tau(one_element(a)) - 1.0) < 1e-14);
        for (int t = 0; t < 10; ++t) {
            AlgElement x(a, rng.cgaussian_vec(a->dim));
            AlgElement y(a, rng.cgaussian_vec(a->dim));
            REQUIRE(std::abs(tau(x * y) - tau(y * x)) < 1e-10);
            REQUIRE(tau(adjoint(x) * x).real() > 0);
            REQUIRE(std::abs(tau(adjoint(x) * x).imag()) < 1e-12);
        }
    }
}

TEST_CASE("regular representation is a faithful star-homomorphism") {
    verify_representation(make_group_algebra(corpus::z6()));
    verify_representation(corpus::m2());
    GroupPtr s3 = corpus::s3();
    std::vector<Permutation> pact;
    for (int e = 0; e < s3->order; ++e) pact.push_back(s3->perms[e]);
    verify_representation(corpus::function_crossed_product(s3, pact, "C3xS3"));
}

TEST_CASE("known operator-norm values in C[S3] and C[Z2]") {
    AlgebraPtr a = make_group_algebra(corpus::s3());
    int c = find_label(a->group, "(1 2 3)");
    int c2 = find_label(a->group, "(1 3 2)");
    REQUIRE(c >= 0);
    REQUIRE(c2 >= 0);
    // 2e + (123) + (132) acts as 4 on the invariant vector of the rotations
    AlgElement x = 2.0 * one_element(a) + group_element(a, c) + group_element(a, c2);
    REQUIRE(std::abs(norm_operator(x) - 4.0) < 1e-9);

    AlgebraPtr z2 = make_group_algebra(corpus::z2());
    AlgElement d = one_element(z2) - group_element(z2, 1);
    REQUIRE(std::abs(norm_operator(d) - 2.0) < 1e-12);
    REQUIRE(std::abs(norm_l1(d) - 2.0) < 1e-12);
    REQUIRE(std::abs(norm_tau(d) - std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("distinct group elements are uniformly separated") {
    AlgebraPtr a = make_group_algebra(corpus::s3());
    for (int g = 0; g < a->group->order; ++g)
        for (int h = g + 1; h < a->group->order; ++h) {
            double n = norm_operator(group_element(a, g) - group_element(a, h));
            REQUIRE(n >= std::sqrt(2.0) - 1e-9);
        }
}

TEST_CASE("norm comparisons: operator <= l1, tau <= operator") {
    AlgebraPtr a = make_group_algebra(corpus::d4());
    Rng rng(3);
    for (int t = 0; t < 25; ++t) {
        AlgElement x(a, rng.cgaussian_vec(a->dim));
        double op = norm_operator(x);
        REQUIRE(norm_tau(x) <= op + 1e-9);
        REQUIRE(op <= norm_l1(x) + 1e-9);
        // C*-identity
        REQUIRE(std::abs(norm_operator(adjoint(x) * x) - op * op) < 1e-7 * (1 + op * op));
    }
}

TEST_CASE("eta seminorm: truncation formula and norm equivalence") {
    AlgebraPtr a = make_group_algebra(corpus::s3());
    Subgroup triv = trivial_subgroup(a->group);
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        AlgElement x(a, rng.cgaussian_vec(a->dim));
        // trivial-subgroup eta is the Euclidean coefficient norm
        double eta = norm_eta(x, triv);
        REQUIRE(std::abs(eta - x.coeffs.norm()) < 1e-9);
        double nr = norm_operator(x);
        REQUIRE(eta <= nr + 1e-9);
        REQUIRE(nr <= a->group->order * eta + 1e-9);
    }
}

TEST_CASE("u_theta is unitary exactly for involutions") {
    AlgebraPtr a = make_group_algebra(corpus::s3());
    int t = find_label(a->group, "(1 2)");
    int c = find_label(a->group, "(1 2 3)");
    REQUIRE_THROWS_AS(u_theta(a, 0.3, c), NotAnInvolution);
    for (double theta : {0.1, 0.7, 1.3, 2.9, 4.4, 6.0}) {
        AlgElement u = u_theta(a, theta, t);
        REQUIRE(is_unitary(u, 1e-12));
        double bound = std::abs(std::cos(theta) - 1.0) + std::abs(std::sin(theta));
        REQUIRE(norm_operator(u - one_element(a)) <= bound + 1e-9);
    }
}

TEST_CASE("crossed product arithmetic matches the action") {
    GroupPtr s3 = corpus::s3();
    std::vector<Permutation> pact;
    for (int e = 0; e < s3->order; ++e) pact.push_back(s3->perms[e]);
    AlgebraPtr cp = corpus::function_crossed_product(s3, pact, "C3xS3");
    REQUIRE(cp->dim == 18);
    // g f g^{-1} = f ∘ g^{-1} for point masses f = delta_p
    Rng rng(1);
    for (int g = 1; g < s3->order; ++g) {
        AlgElement ug = group_element(cp, g);
        for (int p = 0; p < 3; ++p) {
            AlgElement f = basis_element(cp, cp->idx(s3->identity, p, 0, 0));
            AlgElement moved = ug * f * adjoint(ug);
            AlgElement expect = basis_element(
                cp, cp->idx(s3->identity, s3->perms[g][p], 0, 0));
            REQUIRE((moved - expect).coeffs.norm() < 1e-12);
        }
    }
}

TEST_CASE("star subalgebra validation and closure") {
    AlgebraPtr a = make_group_algebra(corpus::s3());
    int c = find_label(a->group, "(1 2 3)");
    StarSubalgebra s = star_closure(a, {group_element(a, c)}, "C[A3]");
    REQUIRE(s.dim() == 3);
    validate_star_subalgebra(s);

    // a non-closed subspace is rejected
    Mat q = Mat::Zero(a->dim, 1);
    q(c, 0) = 1.0; // span{(123)} alone is not unital
    StarSubalgebra bad{a, q, true, 1e-9, "bad", std::nullopt};
    REQUIRE_THROWS_AS(validate_star_subalgebra(bad), Error);
}

TEST_CASE("random unitaries are unitary and stay in the subalgebra") {
    AlgebraPtr a = make_group_algebra(corpus::s3());
    StarSubalgebra full = full_subalgebra(a);
    Rng rng(17);
    for (int t = 0; t < 5; ++t) {
        AlgElement u = random_unitary(full, rng);
        REQUIRE(is_unitary(u, 1e-8));
        REQUIRE(full.contains(u));
    }
    std::vector<int> a3;
    for (int i = 0; i < a->group->order; ++i)
        if (a->group->mul(i, a->group->mul(i, i)) == 0) a3.push_back(i);
    StarSubalgebra ca3 = subgroup_algebra(a, make_subgroup(a->group, a3));
    AlgElement v = random_unitary(ca3, rng);
    REQUIRE(is_unitary(v, 1e-8));
    REQUIRE(ca3.contains(v));
}
