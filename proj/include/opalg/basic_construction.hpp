#pragma once

#include <utility>
#include <vector>

#include "opalg/expectation.hpp"

namespace opalg {

/// Matrix <-> element helpers for a full matrix algebra M_n realized as
/// matrix_block_sum({n}) (coefficients are the matrix entries, row-major).
inline AlgElement matrix_to_element(AlgebraPtr m_n, const Mat& m) {
    AlgElement x = zero_element(m_n);
    const int n = m_n->blocks[0];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x.coeffs(m_n->idx(0, 0, i, j)) = m(i, j);
    return x;
}

inline Mat element_to_matrix(const AlgElement& x) {
    const AlgebraSpec& a = *x.parent;
    const int n = a.blocks[0];
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = x.coeffs(a.idx(0, 0, i, j));
    return m;
}

/// Multiplicative inverse inside the algebra (solve x y = 1).
inline AlgElement inverse_element(const AlgElement& x, double tol = 1e-9) {
    Mat l = left_mult_matrix(x);
    Vec one = one_element(x.parent).coeffs;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(l);
    Vec y = cod.solve(one);
    if ((l * y - one).norm() > tol) throw Error("element is not invertible");
    return AlgElement(x.parent, y);
}

/// The basic construction of an inclusion B ⊆ A (with A itself allowed to
/// be a subalgebra of an ambient realization) for a finite-index E: A -> B.
/// The GNS space of the trace on A is its coefficient span; A acts by left
/// multiplication; e1 is the projection onto B-hat.
struct BasicConstruction {
    AlgebraPtr ambient;      // realization containing A and B
    StarSubalgebra A;        // the larger algebra of the inclusion
    StarSubalgebra B;        // target of E
    CondExp E;               // conditional expectation A -> B (ambient matrix)
    std::vector<AlgElement> quasi_basis; // of E, ambient elements
    AlgElement index;        // Ind_W(E), ambient element

    AlgebraPtr gns_algebra;  // matrix_block_sum({dim A}): operators on GNS
    Mat e1;                  // Jones projection, (dim A)^2 matrix entries
    StarSubalgebra A1;       // span{x e1 y}, subalgebra of gns_algebra
    StarSubalgebra lambdaA;  // lambda(A), subalgebra of gns_algebra
    Mat lambda_cols;         // A-basis coords -> vec(lambda(x)) linear map

    /// lambda(x): left multiplication by x ∈ A as a GNS-space matrix.
    Mat lambda_matrix(const AlgElement& x) const {
        return A.Q.adjoint() * left_mult_matrix(x) * A.Q;
    }

    AlgElement lambda_op(const AlgElement& x) const {
        return matrix_to_element(gns_algebra, lambda_matrix(x));
    }

    /// Inverse of lambda on lambda(A): recover x ∈ A from its GNS matrix.
    AlgElement lambda_inverse(const AlgElement& op, double tol = 1e-8) const {
        Mat m = element_to_matrix(op);
        Vec v(m.size());
        for (int j = 0; j < m.cols(); ++j)
            v.segment(j * m.rows(), m.rows()) = m.col(j);
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(lambda_cols);
        Vec c = cod.solve(v);
        if ((lambda_cols * c - v).norm() > tol * std::max(1.0, v.norm()))
            throw Error("operator is not in lambda(A)");
        AlgElement x = zero_element(ambient);
        for (int i = 0; i < (int)c.size(); ++i)
            x = x + c(i) * A.basis(i);
        return x;
    }
};

/// Build the basic construction. Requires a finite-index E (quasi-basis is
/// solved for if not already attached).
inline BasicConstruction basic_construction(const StarSubalgebra& a_sub,
                                            const CondExp& e,
                                            double tol = 1e-9) {
    AlgebraPtr amb = e.parent;
    require_subalgebra_parent(a_sub, amb);
    if (!algebra_contained(e.target, a_sub)) throw InclusionViolated();

    BasicConstruction bc{amb, a_sub, e.target, e, {}, zero_element(amb),
                         nullptr, Mat(), StarSubalgebra{}, StarSubalgebra{}, Mat()};
    auto qb = quasi_basis_solve(e); // throws NoQuasiBasis-equivalent on failure
    bc.quasi_basis = std::move(qb.first);
    bc.index = std::move(qb.second);

    const int k = a_sub.dim();
    bc.gns_algebra = make_matrix_block_sum({k}, "B(GNS)");

    // e1 in GNS coordinates: E restricted to span(A)
    Mat e1 = a_sub.Q.adjoint() * e.matrix * a_sub.Q;
    if ((e1 - e1.adjoint()).cwiseAbs().maxCoeff() > 1e-8 ||
        (e1 * e1 - e1).cwiseAbs().maxCoeff() > 1e-8)
        throw NoQuasiBasis("expectation is not an orthogonal projection on the GNS space");
    bc.e1 = (e1 + e1.adjoint()) / 2.0;

    // e1 eta(x) = eta(E(x)) exactly, by construction; certify anyway
    for (int i = 0; i < k; ++i) {
        Vec x = a_sub.Q.col(i);
        if ((bc.e1 * (a_sub.Q.adjoint() * x) - a_sub.Q.adjoint() * (e.matrix * x)).norm() > tol)
            throw CertificationFailed("e1 does not implement E on the GNS space");
    }

    // lambda(A) and A1 = span{lambda(x) e1 lambda(y)}
    Mat lcols(k * k, k);
    std::vector<Mat> lam(k);
    for (int i = 0; i < k; ++i) {
        lam[i] = bc.lambda_matrix(a_sub.basis(i));
        for (int j = 0; j < k; ++j) lcols.block(j * k, i, k, 1) = lam[i].col(j);
    }
    bc.lambda_cols = lcols;
    bc.lambdaA = StarSubalgebra{bc.gns_algebra, column_span(lcols), true, 1e-9,
                                "lambda(" + a_sub.name + ")", std::nullopt};

    Mat span1(k * k, k * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            Mat m = lam[i] * bc.e1 * lam[j];
            for (int col = 0; col < k; ++col)
                span1.block(col * k, i * k + j, k, 1) = m.col(col);
        }
    bc.A1 = StarSubalgebra{bc.gns_algebra, column_span(span1), true, 1e-9,
                           "<" + a_sub.name + ",e1>", std::nullopt};

    // e1 x e1 = E(x) e1 on a basis of A
    for (int i = 0; i < k; ++i) {
        Mat lhs = bc.e1 * lam[i] * bc.e1;
        Mat rhs = bc.lambda_matrix(e.apply(a_sub.basis(i))) * bc.e1;
        if ((lhs - rhs).cwiseAbs().maxCoeff() > tol)
            throw CertificationFailed("e1 x e1 = E(x) e1 fails");
    }
    // sum_i lambda(l_i) e1 lambda(l_i)* = 1
    Mat s = Mat::Zero(k, k);
    for (const auto& l : bc.quasi_basis) {
        Mat lm = bc.lambda_matrix(l);
        s += lm * bc.e1 * lm.adjoint();
    }
    if ((s - Mat::Identity(k, k)).cwiseAbs().maxCoeff() > tol)
        throw CertificationFailed("quasi-basis partition of unity fails");
    return bc;
}

/// The dual expectation A1 -> lambda(A), defined on the spanning set by
/// x e1 y -> Ind^{-1} x y and extended linearly; well-definedness is
/// certified by the consistency of the least-squares extension.
inline CondExp dual_expectation(const BasicConstruction& bc, double tol = 1e-9) {
    const int k = bc.A.dim();
    const int n1 = bc.A1.dim();
    AlgElement ind_inv = inverse_element(bc.index);

    Mat coords(n1, k * k);
    Mat targets(k * k, k * k); // vec of target operators per spanning pair
    int col = 0;
    for (int i = 0; i < k; ++i) {
        Mat li = bc.lambda_matrix(bc.A.basis(i));
        for (int j = 0; j < k; ++j, ++col) {
            Mat lj = bc.lambda_matrix(bc.A.basis(j));
            Mat v = li * bc.e1 * lj;
            Vec vv(k * k);
            for (int c = 0; c < k; ++c) vv.segment(c * k, k) = v.col(c);
            coords.col(col) = bc.A1.Q.adjoint() * vv;
            if ((vv - bc.A1.Q * coords.col(col)).norm() > 1e-8 * std::max(1.0, vv.norm()))
                throw InconsistentSpan("spanning element leaves A1");
            Mat w = bc.lambda_matrix(ind_inv * (bc.A.basis(i) * bc.A.basis(j)));
            Vec wv(k * k);
            for (int c = 0; c < k; ++c) wv.segment(c * k, k) = w.col(c);
            targets.col(col) = wv;
        }
    }
    // solve X * coords = targets for the map X on A1 coordinates
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(coords.transpose());
    Mat xt = cod.solve(targets.transpose());
    Mat x = xt.transpose();
    double resid = (x * coords - targets).cwiseAbs().maxCoeff();
    if (resid > tol) throw InconsistentSpan("dual expectation is not well defined");
    Mat full = x * bc.A1.Q.adjoint(); // extend by 0 on the A1-orthocomplement
    // Ind_W(dual) = Ind_W(E) when the index is scalar
    std::optional<AlgElement> dual_index;
    Vec ind_dir = one_element(bc.ambient).coeffs;
    Complex c = ind_dir.dot(bc.index.coeffs) / ind_dir.squaredNorm();
    if ((bc.index.coeffs - c * ind_dir).norm() < 1e-9)
        dual_index = c * one_element(bc.gns_algebra);
    return CondExp{bc.gns_algebra, bc.lambdaA, std::move(full), std::nullopt,
                   std::move(dual_index), std::nullopt};
}

/// Pushdown: for x1 ∈ A1, the unique x0 ∈ A with x1 e1 = x0 e1;
/// x0 = Ind · dual(x1 e1).
inline AlgElement pushdown(const BasicConstruction& bc, const CondExp& dual,
                           const AlgElement& x1, double tol = 1e-9) {
    AlgElement e1_el = matrix_to_element(bc.gns_algebra, bc.e1);
    AlgElement x0_op = dual.apply(x1 * e1_el);
    AlgElement x0 = bc.index * bc.lambda_inverse(x0_op);
    Mat lhs = element_to_matrix(x1) * bc.e1;
    Mat rhs = bc.lambda_matrix(x0) * bc.e1;
    if ((lhs - rhs).cwiseAbs().maxCoeff() > tol * std::max(1.0, lhs.cwiseAbs().maxCoeff()))
        throw CertificationFailed("pushdown identity fails");
    return x0;
}

/// One tower step: the basic construction of A ⊆ A1 with respect to the
/// dual expectation, inside the GNS realization of A.
inline BasicConstruction tower_step(const BasicConstruction& bc, const CondExp& dual,
                                    int dim_cap = 4096) {
    if (bc.A1.dim() > dim_cap) throw DimensionCapExceeded();
    return basic_construction(bc.A1, dual);
}

} // namespace opalg
