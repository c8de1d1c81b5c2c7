#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

#include "opalg/errors.hpp"

namespace opalg {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;

/// Largest singular value via a Hermitian eigensolve of m*m.
inline double operator_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigSolverFailure();
    double lmax = es.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, lmax));
}

/// Smallest eigenvalue of a Hermitian matrix.
inline double min_eigenvalue(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigSolverFailure();
    return es.eigenvalues().minCoeff();
}

inline bool is_psd(const Mat& m, double tol) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    return min_eigenvalue(m) > -tol;
}

/// Orthonormal basis (Euclidean) for the column span of m; rank cut at tol
/// relative to the largest singular value.
inline Mat column_span(const Mat& m, double tol = 1e-10) {
    if (m.cols() == 0) return Mat(m.rows(), 0);
    Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    double cutoff = sv.size() ? sv(0) * tol : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff && sv(i) > tol) ++rank;
    return svd.matrixU().leftCols(rank);
}

/// Orthonormal basis of the (right) null space of m.
inline Mat null_space(const Mat& m, double tol = 1e-10) {
    if (m.rows() == 0) return Mat::Identity(m.cols(), m.cols());
    Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double cutoff = sv.size() ? std::max(sv(0) * tol, tol) : tol;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

/// Largest principal-angle sine between the spans of two matrices with
/// orthonormal columns. 0 means equal subspaces (when dimensions agree).
inline double subspace_gap(const Mat& q1, const Mat& q2) {
    if (q1.cols() != q2.cols()) return 1.0;
    if (q1.cols() == 0) return 0.0;
    Eigen::BDCSVD<Mat> svd(q1.adjoint() * q2);
    double cmin = svd.singularValues().minCoeff();
    cmin = std::min(1.0, std::max(-1.0, cmin));
    return std::sqrt(std::max(0.0, 1.0 - cmin * cmin));
}

inline bool same_subspace(const Mat& q1, const Mat& q2, double tol = 1e-8) {
    return q1.cols() == q2.cols() && subspace_gap(q1, q2) < tol;
}

/// Is span(q1) contained in span(q2)? Both with orthonormal columns.
inline bool subspace_contained(const Mat& q1, const Mat& q2, double tol = 1e-8) {
    if (q1.cols() == 0) return true;
    Mat residual = q1 - q2 * (q2.adjoint() * q1);
    return residual.cwiseAbs().maxCoeff() < tol;
}

/// Orthonormal basis of span(q1) ∩ span(q2); inputs have orthonormal columns.
inline Mat intersect_spans(const Mat& q1, const Mat& q2, double tol = 1e-9) {
    if (q1.cols() == 0 || q2.cols() == 0) return Mat(q1.rows(), 0);
    // v in both spans iff (I - P1)v = 0 and (I - P2)v = 0
    Mat m(2 * q1.rows(), q1.rows());
    m.topRows(q1.rows()) = Mat::Identity(q1.rows(), q1.rows()) - q1 * q1.adjoint();
    m.bottomRows(q1.rows()) = Mat::Identity(q1.rows(), q1.rows()) - q2 * q2.adjoint();
    return null_space(m, tol);
}

/// Hermitian inverse square root (eigenvalues clipped below at `floor`).
inline Mat inv_sqrt_hermitian(const Mat& m, double floor = 1e-12) {
    Eigen::SelfAdjointEigenSolver<Mat> es((m + m.adjoint()) / 2.0);
    if (es.info() != Eigen::Success) throw EigSolverFailure();
    RealVec d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) d(i) = 1.0 / std::sqrt(std::max(d(i), floor));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

/// Deterministic RNG wrapper used for all sampling in the library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    Complex cgaussian() { return Complex(gaussian(), gaussian()); }
    int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }

    Vec cgaussian_vec(int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v(i) = cgaussian();
        return v;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace opalg
