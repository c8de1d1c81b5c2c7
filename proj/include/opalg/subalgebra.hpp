#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opalg/algebra.hpp"

namespace opalg {

/// A unital *-closed subspace of an AlgebraSpec, held as a matrix Q of
/// Euclidean-orthonormal coefficient columns. The tau inner product is a
/// positive scalar multiple of the Euclidean one in coefficient coordinates,
/// so Q is tau-orthogonal as well and QQ† is the tau-orthogonal projection.
struct StarSubalgebra {
    AlgebraPtr parent;
    Mat Q;              // dim x k, orthonormal columns
    bool unital = true;
    double tol = 1e-9;
    std::string name;
    std::optional<Subgroup> subgroup; // provenance when built from a subgroup

    int dim() const { return (int)Q.cols(); }

    /// i-th basis vector, normalized to tau-norm 1.
    AlgElement basis(int i) const {
        return AlgElement(parent, std::sqrt((double)parent->rep_block) * Q.col(i));
    }

    Vec project_coeffs(const Vec& v) const { return Q * (Q.adjoint() * v); }

    AlgElement project(const AlgElement& x) const {
        return AlgElement(parent, project_coeffs(x.coeffs));
    }

    bool contains(const AlgElement& x) const {
        double scale = std::max(1.0, x.coeffs.norm());
        return (x.coeffs - project_coeffs(x.coeffs)).norm() <= tol * scale;
    }
};

inline void require_subalgebra_parent(const StarSubalgebra& s, const AlgebraPtr& a) {
    if (s.parent.get() != a.get()) throw ParentMismatch();
}

/// Check *-closure, multiplicative closure and (optionally) the unit.
inline void validate_star_subalgebra(const StarSubalgebra& s) {
    const int k = s.dim();
    for (int i = 0; i < k; ++i) {
        if (!s.contains(adjoint(s.basis(i)))) throw NotStarClosed();
        for (int j = 0; j < k; ++j)
            if (!s.contains(s.basis(i) * s.basis(j)))
                throw NotStarClosed("products leave the subspace");
    }
    if (s.unital && !s.contains(one_element(s.parent))) throw NotUnital();
}

/// Smallest unital *-subalgebra containing the generators.
inline StarSubalgebra star_closure(AlgebraPtr a,
                                   const std::vector<AlgElement>& generators,
                                   const std::string& name = "") {
    std::vector<Vec> cols{one_element(a).coeffs};
    for (const auto& g : generators) {
        cols.push_back(g.coeffs);
        cols.push_back(adjoint(g).coeffs);
    }
    Mat span(a->dim, cols.size());
    for (size_t i = 0; i < cols.size(); ++i) span.col(i) = cols[i];
    Mat q = column_span(span);
    for (;;) {
        int k = (int)q.cols();
        Mat prods(a->dim, k + k * k);
        prods.leftCols(k) = q;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                prods.col(k + i * k + j) =
                    multiply(AlgElement(a, q.col(i)), AlgElement(a, q.col(j))).coeffs;
        Mat q2 = column_span(prods);
        if (q2.cols() == q.cols()) break;
        q = q2;
    }
    StarSubalgebra s{a, q, true, 1e-9, name, std::nullopt};
    validate_star_subalgebra(s);
    return s;
}

/// Span{1·h : h ∈ H} — the subgroup algebra C[H] inside any algebra over G.
inline StarSubalgebra subgroup_algebra(AlgebraPtr a, const Subgroup& h,
                                       std::string name = "") {
    if (h.parent.get() != a->group.get()) throw ParentMismatch();
    require_subgroup(*a->group, h);
    Mat span(a->dim, h.order());
    for (int i = 0; i < h.order(); ++i)
        span.col(i) = group_element(a, h.elements[i]).coeffs;
    if (name.empty()) {
        name = "C[";
        for (int e : h.elements) name += a->group->labels[e] + ",";
        name.back() = ']';
    }
    StarSubalgebra s{a, column_span(span), true, 1e-9, name, h};
    return s;
}

inline StarSubalgebra full_subalgebra(AlgebraPtr a) {
    return StarSubalgebra{a, Mat::Identity(a->dim, a->dim), true, 1e-9,
                          a->name.empty() ? "full" : a->name, std::nullopt};
}

inline StarSubalgebra scalar_subalgebra(AlgebraPtr a) {
    Vec one = one_element(a).coeffs;
    return StarSubalgebra{a, one / one.norm(), true, 1e-9, "C1", std::nullopt};
}

/// Diagonal matrix units at the group identity (the algebra Δ for M_n).
inline StarSubalgebra diagonal_subalgebra(AlgebraPtr a) {
    int total = 0;
    for (int d : a->blocks) total += d;
    Mat q = Mat::Zero(a->dim, total);
    int c = 0;
    for (int b = 0; b < a->num_blocks(); ++b)
        for (int i = 0; i < a->blocks[b]; ++i)
            q(a->idx(a->group->identity, b, i, i), c++) = 1.0;
    return StarSubalgebra{a, q, true, 1e-9, "delta", std::nullopt};
}

inline bool is_unitary(const AlgElement& u, double tol = 1e-8) {
    AlgElement r = adjoint(u) * u - one_element(u.parent);
    AlgElement l = u * adjoint(u) - one_element(u.parent);
    return r.coeffs.norm() < tol && l.coeffs.norm() < tol;
}

/// u S u* for a unitary u.
inline StarSubalgebra conjugate_subalgebra(const StarSubalgebra& s, const AlgElement& u,
                                           std::string name = "") {
    require_same_parent(u, AlgElement(s.parent, Vec::Zero(s.parent->dim)));
    if (!is_unitary(u)) throw NotUnitary();
    AlgElement ustar = adjoint(u);
    Mat span(s.parent->dim, s.dim());
    for (int i = 0; i < s.dim(); ++i)
        span.col(i) = (u * s.basis(i) * ustar).coeffs;
    if (name.empty()) name = "Ad[" + s.name + "]";
    return StarSubalgebra{s.parent, column_span(span), s.unital, s.tol, name,
                          std::nullopt};
}

inline bool same_algebra(const StarSubalgebra& a, const StarSubalgebra& b,
                         double tol = 1e-8) {
    return a.parent.get() == b.parent.get() && same_subspace(a.Q, b.Q, tol);
}

inline bool algebra_contained(const StarSubalgebra& inner, const StarSubalgebra& outer,
                              double tol = 1e-8) {
    return inner.parent.get() == outer.parent.get() &&
           subspace_contained(inner.Q, outer.Q, tol);
}

/// exp(x) computed inside the algebra by scaling-and-squaring.
inline AlgElement exp_element(const AlgElement& x) {
    double scale = norm_l1(x); // cheap upper bound for the operator norm
    int squarings = 0;
    while (scale > 0.5 && squarings < 40) {
        scale /= 2;
        ++squarings;
    }
    AlgElement xs = std::pow(0.5, squarings) * x;
    AlgElement term = one_element(x.parent);
    AlgElement sum = term;
    for (int k = 1; k <= 16; ++k) {
        term = (1.0 / k) * (term * xs);
        sum = sum + term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

/// A Haar-ish random unitary exp(i h) with h Hermitian in S; deterministic
/// given the Rng state.
inline AlgElement random_unitary(const StarSubalgebra& s, Rng& rng) {
    Vec v = s.Q * rng.cgaussian_vec(s.dim());
    AlgElement z(s.parent, v);
    AlgElement h = 0.5 * (z + adjoint(z));
    double n = norm_tau(h);
    if (n > 1e-12) h = (1.0 / n) * h;
    AlgElement u = exp_element(Complex(0, 1) * h);
    if (!is_unitary(u)) throw NotUnitary("exp(ih) failed unitarity check");
    return u;
}

/// Random Hermitian element of S with tau-norm about `scale`.
inline AlgElement random_hermitian(const StarSubalgebra& s, Rng& rng,
                                   double scale = 1.0) {
    Vec v = s.Q * rng.cgaussian_vec(s.dim());
    AlgElement z(s.parent, v);
    AlgElement h = 0.5 * (z + adjoint(z));
    double n = norm_tau(h);
    if (n > 1e-12) h = (scale / n) * h;
    return h;
}

/// Random element of S (not normalized).
inline AlgElement random_element(const StarSubalgebra& s, Rng& rng) {
    return AlgElement(s.parent, s.Q * rng.cgaussian_vec(s.dim()));
}

} // namespace opalg
