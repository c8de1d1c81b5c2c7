#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "opalg/expectation.hpp"

namespace opalg {

enum class Metric { kk, c0, c, mt, l1kk };

inline const char* metric_name(Metric m) {
    switch (m) {
        case Metric::kk: return "kk";
        case Metric::c0: return "c0";
        case Metric::c: return "c";
        case Metric::mt: return "mt";
        case Metric::l1kk: return "l1kk";
    }
    return "?";
}

enum class Certificate { none, subgroup_pair, proper_inclusion, conjugation_bound,
                         equality, numeric };

inline const char* certificate_name(Certificate c) {
    switch (c) {
        case Certificate::none: return "none";
        case Certificate::subgroup_pair: return "subgroup-pair";
        case Certificate::proper_inclusion: return "proper-inclusion";
        case Certificate::conjugation_bound: return "conjugation-bound";
        case Certificate::equality: return "equality";
        case Certificate::numeric: return "numeric";
    }
    return "?";
}

/// Every distance is reported as an interval [lower, upper] with the source
/// of exactness (certificate) recorded; bare floats are never returned.
struct DistanceResult {
    Metric metric = Metric::kk;
    double lower = 0.0;
    double upper = 1.0;
    Certificate certificate = Certificate::none;
    std::string witness;
    std::uint64_t seed = 0;
    int iterations = 0;
    double tolerance = 1e-7;
    bool converged = true;
};

enum class NormKind { Operator, Tau, L1 };

struct BallDistance {
    double lower = 0.0;
    double upper = 0.0;
    bool converged = true;
    int iterations = 0;
};

struct DistanceOptions {
    int multistart = 200;
    std::uint64_t seed = 0;
    double tol = 1e-7;
    int dykstra_cap = 100000;
};

namespace detail {

inline Vec vec_mat(const Mat& m) {
    Vec v(m.size());
    for (int j = 0; j < m.cols(); ++j) v.segment(j * m.rows(), m.rows()) = m.col(j);
    return v;
}

inline Mat unvec_mat(const Vec& v, int n) {
    Mat m(n, n);
    for (int j = 0; j < n; ++j) m.col(j) = v.segment(j * n, n);
    return m;
}

/// Singular values clipped to at most 1 (the HS-metric projection onto the
/// operator-norm unit ball).
inline Mat clip_operator_ball(const Mat& m) {
    Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    RealVec s = svd.singularValues();
    for (int i = 0; i < s.size(); ++i) s(i) = std::min(s(i), 1.0);
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
}

/// Euclidean projection of a complex vector onto {Σ|v_i| <= 1}: phases are
/// kept, moduli are projected onto the real l1 ball.
inline Vec project_l1_ball(const Vec& v) {
    const int n = (int)v.size();
    RealVec a(n);
    for (int i = 0; i < n; ++i) a(i) = std::abs(v(i));
    if (a.sum() <= 1.0) return v;
    std::vector<double> u(a.data(), a.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cssv = 0, theta = 0;
    for (int i = 0; i < n; ++i) {
        cssv += u[i];
        double t = (cssv - 1.0) / (i + 1);
        if (i + 1 == n || u[i + 1] <= t) {
            theta = t;
            break;
        }
    }
    Vec out(n);
    for (int i = 0; i < n; ++i) {
        double m = std::max(0.0, a(i) - theta);
        out(i) = (a(i) > 1e-300) ? v(i) * (m / a(i)) : Complex(0, 0);
    }
    return out;
}

} // namespace detail

/// ‖x − E_D(x)‖_tau — the tau-distance from x to span(D).
inline double tau_dist_to_span(const AlgElement& x, const StarSubalgebra& d) {
    Vec r = x.coeffs - d.project_coeffs(x.coeffs);
    return r.norm() / std::sqrt((double)x.parent->rep_block);
}

/// Distance from x to the operator-norm unit ball of D, measured in the
/// requested norm. Computed by Dykstra's alternating projections between
/// the span of D and the unit ball, run in the faithful realization for
/// operator/tau norms and in coefficient space for l1. Returns an honest
/// interval: the upper bound is attained by a feasible point, the lower
/// bound comes from norm comparisons (tau-distance to span; ‖x‖ − 1).
inline BallDistance dist_to_unit_ball(const AlgElement& x, const StarSubalgebra& d,
                                      NormKind norm, double tol = 1e-9,
                                      int iter_cap = 100000) {
    require_subalgebra_parent(d, x.parent);
    BallDistance out;
    const double tau_lower = tau_dist_to_span(x, d);

    if (norm == NormKind::L1) {
        for (int b : x.parent->blocks)
            if (b != 1) throw UnsupportedParent("l1 ball projection needs scalar coefficients");
        Vec z = x.coeffs, p = Vec::Zero(z.size()), q = Vec::Zero(z.size());
        Vec prev = z;
        int it = 0;
        for (; it < iter_cap; ++it) {
            Vec y = d.project_coeffs(z + p);
            p = z + p - y;
            Vec z2 = detail::project_l1_ball(y + q);
            q = y + q - z2;
            double delta = (z2 - z).norm();
            z = z2;
            if (delta < tol) break;
        }
        Vec f = detail::project_l1_ball(d.project_coeffs(z));
        AlgElement fe(x.parent, f);
        out.upper = norm_l1(AlgElement(x.parent, x.coeffs - f));
        out.lower = std::max({0.0, tau_lower, norm_l1(x) - 1.0});
        out.iterations = it;
        out.converged = it < iter_cap;
        out.lower = std::min(out.lower, out.upper);
        return out;
    }

    // faithful-realization Dykstra
    const int n = x.parent->gns_dim;
    Mat xr = matrix_rep(x);
    Mat span(n * n, d.dim());
    for (int i = 0; i < d.dim(); ++i)
        span.col(i) = detail::vec_mat(matrix_rep(d.basis(i)));
    Mat qs = column_span(span);
    auto proj_span = [&](const Mat& m) {
        Vec v = detail::vec_mat(m);
        return detail::unvec_mat(qs * (qs.adjoint() * v), n);
    };
    Mat z = xr, p = Mat::Zero(n, n), q = Mat::Zero(n, n);
    int it = 0;
    for (; it < iter_cap; ++it) {
        Mat y = proj_span(z + p);
        p = z + p - y;
        Mat z2 = detail::clip_operator_ball(y + q);
        q = y + q - z2;
        double delta = (z2 - z).norm();
        z = z2;
        if (delta < tol) break;
    }
    Mat f = detail::clip_operator_ball(proj_span(z)); // feasible: clip stays in span
    double scale = std::sqrt((double)(x.parent->group->order * x.parent->rep_block));
    if (norm == NormKind::Tau) {
        out.upper = (xr - f).norm() / scale;
        out.lower = std::max({0.0, tau_lower, norm_tau(x) - 1.0});
    } else {
        out.upper = operator_norm(xr - f);
        out.lower = std::max({0.0, tau_lower, operator_norm(xr) - 1.0});
    }
    out.iterations = it;
    out.converged = it < iter_cap;
    out.lower = std::min(out.lower, out.upper);
    return out;
}

namespace detail {

struct CertCheck {
    std::optional<DistanceResult> result;
};

/// Shared certificate logic for all five metrics. Distinct subgroup pairs
/// are at distance exactly 1 in every realization; equal spans give 0; a
/// proper inclusion gives exactly 1 for the metrics where that is a theorem
/// (kk, c0, and the traced metrics via the c = mt identity for unital
/// subalgebras together with nested subgroup arguments).
inline std::optional<DistanceResult> certificate_path(Metric m,
                                                      const StarSubalgebra& c,
                                                      const StarSubalgebra& d) {
    DistanceResult r;
    r.metric = m;
    if (same_algebra(c, d)) {
        r.lower = r.upper = 0.0;
        r.certificate = Certificate::equality;
        return r;
    }
    if (c.subgroup && d.subgroup && !(c.subgroup->elements == d.subgroup->elements)) {
        r.lower = r.upper = 1.0;
        r.certificate = Certificate::subgroup_pair;
        r.witness = c.name + " vs " + d.name;
        return r;
    }
    bool cd = algebra_contained(c, d), dc = algebra_contained(d, c);
    if ((cd || dc) && (m == Metric::kk || m == Metric::c0)) {
        r.lower = r.upper = 1.0;
        r.certificate = Certificate::proper_inclusion;
        return r;
    }
    return std::nullopt;
}

/// Unit-ball extreme points of C used as outer candidates: random unitaries
/// plus normalized basis directions.
inline std::vector<AlgElement> outer_candidates(const StarSubalgebra& c, Rng& rng,
                                                int count) {
    std::vector<AlgElement> out;
    for (int i = 0; i < c.dim(); ++i) {
        AlgElement b = c.basis(i);
        double nb = norm_operator(b);
        if (nb > 1e-12) out.push_back((1.0 / nb) * b);
    }
    while ((int)out.size() < count + c.dim()) out.push_back(random_unitary(c, rng));
    return out;
}

} // namespace detail

/// Kadison–Kastler distance: Hausdorff distance between operator-norm unit
/// balls. Certificate-exact where the theory gives exact values; otherwise
/// a numeric interval from multistart over unit-ball extreme points.
inline DistanceResult d_kk(const StarSubalgebra& c, const StarSubalgebra& d,
                           const DistanceOptions& opts = {}) {
    if (c.parent.get() != d.parent.get()) throw ParentMismatch();
    if (auto r = detail::certificate_path(Metric::kk, c, d)) return *r;
    DistanceResult r;
    r.metric = Metric::kk;
    r.seed = opts.seed;
    r.certificate = Certificate::numeric;
    r.tolerance = opts.tol;
    Rng rng(opts.seed);
    double lower = 0.0;
    bool conv = true;
    int iters = 0;
    for (const StarSubalgebra* from : {&c, &d}) {
        const StarSubalgebra* to = (from == &c) ? &d : &c;
        for (const AlgElement& x : detail::outer_candidates(*from, rng, opts.multistart)) {
            BallDistance bd = dist_to_unit_ball(x, *to, NormKind::Operator, 1e-9,
                                                opts.dykstra_cap);
            conv = conv && bd.converged;
            iters += bd.iterations;
            if (bd.lower > lower) {
                lower = bd.lower;
                r.witness = "ball element of " + from->name;
            }
        }
    }
    r.lower = std::min(1.0, lower);
    r.upper = 1.0;
    r.iterations = iters;
    r.converged = conv;
    return r;
}

/// Christensen's d0: near-inclusion distance with the approximant ranging
/// over all of the other algebra (not just its unit ball).
inline DistanceResult d_0(const StarSubalgebra& c, const StarSubalgebra& d,
                          const DistanceOptions& opts = {}) {
    if (c.parent.get() != d.parent.get()) throw ParentMismatch();
    if (auto r = detail::certificate_path(Metric::c0, c, d)) return *r;
    DistanceResult r;
    r.metric = Metric::c0;
    r.seed = opts.seed;
    r.certificate = Certificate::numeric;
    r.tolerance = opts.tol;
    Rng rng(opts.seed);
    double lower = 0.0, upper = 0.0;
    for (const StarSubalgebra* from : {&c, &d}) {
        const StarSubalgebra* to = (from == &c) ? &d : &c;
        for (const AlgElement& x : detail::outer_candidates(*from, rng, opts.multistart)) {
            // y = E_to(x) is a feasible approximant; tau gives the lower bound
            double up = norm_operator(x - to->project(x));
            double lo = tau_dist_to_span(x, *to);
            lower = std::max(lower, lo);
            upper = std::max(upper, std::min(1.0, up));
        }
    }
    r.lower = std::min(1.0, lower);
    r.upper = std::min(1.0, std::max(upper, r.lower));
    r.converged = true;
    return r;
}

namespace detail {

/// Shared engine for the two traced metrics: the one-sided sup of
/// ‖x − E_Q(x)‖_tau over the operator unit ball of P, maximized over
/// extreme points, with an exact operator upper bound.
inline void traced_metric_engine(const StarSubalgebra& p, const StarSubalgebra& q,
                                 Rng& rng, int starts, double& lower, double& upper,
                                 std::string& witness) {
    for (const AlgElement& x : outer_candidates(p, rng, starts)) {
        double v = tau_dist_to_span(x, q);
        if (v > lower) {
            lower = v;
            witness = "ball element of " + p.name;
        }
    }
    // sup over ‖x‖_op<=1, x in span(P) of ‖(I-E_Q)x‖_tau <= σ_max((I-P_Q)P_P)
    Mat m = (Mat::Identity(p.Q.rows(), p.Q.rows()) - q.Q * q.Q.adjoint()) * p.Q;
    Eigen::BDCSVD<Mat> svd(m);
    double sigma = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    upper = std::max(upper, std::min(1.0, sigma));
}

} // namespace detail

/// Christensen's d_C in the traced realization, computed through the
/// tau-preserving expectation formula.
inline DistanceResult d_c(const StarSubalgebra& p, const StarSubalgebra& q,
                          const DistanceOptions& opts = {}) {
    if (p.parent.get() != q.parent.get()) throw ParentMismatch();
    if (!p.unital || !q.unital) throw NotUnital();
    if (auto r = detail::certificate_path(Metric::c, p, q)) return *r;
    DistanceResult r;
    r.metric = Metric::c;
    r.seed = opts.seed;
    r.certificate = Certificate::numeric;
    r.tolerance = opts.tol;
    Rng rng(opts.seed);
    double lower = 0.0, upper = 0.0;
    detail::traced_metric_engine(p, q, rng, opts.multistart, lower, upper, r.witness);
    detail::traced_metric_engine(q, p, rng, opts.multistart, lower, upper, r.witness);
    r.lower = std::min(1.0, lower);
    r.upper = std::min(1.0, std::max(upper, r.lower));
    return r;
}

/// Mashood–Taylor distance: Hausdorff distance of the operator unit balls
/// under the tau norm. The inner distance uses the expectation shortcut
/// (distance to the ball equals distance to the algebra here) and the best
/// witness is cross-checked against the alternating-projection solver.
inline DistanceResult d_mt(const StarSubalgebra& p, const StarSubalgebra& q,
                           const DistanceOptions& opts = {}) {
    if (p.parent.get() != q.parent.get()) throw ParentMismatch();
    if (!p.unital || !q.unital) throw NotUnital();
    if (auto r = detail::certificate_path(Metric::mt, p, q)) return *r;
    DistanceResult r;
    r.metric = Metric::mt;
    r.seed = opts.seed;
    r.certificate = Certificate::numeric;
    r.tolerance = opts.tol;
    Rng rng(opts.seed);
    double lower = 0.0, upper = 0.0;
    AlgElement best_witness;
    const StarSubalgebra* best_target = nullptr;
    for (const StarSubalgebra* from : {&p, &q}) {
        const StarSubalgebra* to = (from == &p) ? &q : &p;
        for (const AlgElement& x : detail::outer_candidates(*from, rng, opts.multistart)) {
            double v = tau_dist_to_span(x, *to);
            if (v > lower) {
                lower = v;
                best_witness = x;
                best_target = to;
                r.witness = "ball element of " + from->name;
            }
        }
        double up = 0;
        std::string w;
        detail::traced_metric_engine(*from, *to, rng, 0, up, upper, w);
    }
    if (best_target) {
        BallDistance bd = dist_to_unit_ball(best_witness, *best_target, NormKind::Tau,
                                            1e-9, opts.dykstra_cap);
        r.converged = bd.converged;
        if (std::abs(bd.upper - lower) > 1e-7 * std::max(1.0, lower) + 1e-7)
            throw CertificationFailed(
                "expectation shortcut disagrees with the projection solver");
    }
    r.lower = std::min(1.0, lower);
    r.upper = std::min(1.0, std::max(upper, r.lower));
    return r;
}

/// d_KK computed with the l1 norm and l1 unit balls (group algebras).
inline DistanceResult d_l1kk(const StarSubalgebra& c, const StarSubalgebra& d,
                             const DistanceOptions& opts = {}) {
    if (c.parent.get() != d.parent.get()) throw ParentMismatch();
    if (auto r = detail::certificate_path(Metric::l1kk, c, d)) {
        if (r->certificate == Certificate::proper_inclusion) {
            // keep only what the theory gives for the l1 realization
            r->lower = 0.0;
            r->certificate = Certificate::none;
            r->upper = 1.0;
        }
        if (r->certificate != Certificate::none) return *r;
    }
    DistanceResult r;
    r.metric = Metric::l1kk;
    r.seed = opts.seed;
    r.certificate = Certificate::numeric;
    r.tolerance = opts.tol;
    Rng rng(opts.seed);
    double lower = 0.0, upper = 0.0;
    bool conv = true;
    for (const StarSubalgebra* from : {&c, &d}) {
        const StarSubalgebra* to = (from == &c) ? &d : &c;
        for (int g = 0; g < from->parent->group->order; ++g) {
            AlgElement x = group_element(from->parent, g);
            if (!from->contains(x)) continue;
            BallDistance bd = dist_to_unit_ball(x, *to, NormKind::L1, 1e-9,
                                                opts.dykstra_cap);
            conv = conv && bd.converged;
            lower = std::max(lower, bd.lower);
            upper = std::max(upper, bd.upper);
        }
    }
    r.lower = std::min(1.0, lower);
    r.upper = 1.0;
    r.converged = conv;
    return r;
}

inline DistanceResult compute_distance(Metric m, const StarSubalgebra& a,
                                       const StarSubalgebra& b,
                                       const DistanceOptions& opts = {}) {
    switch (m) {
        case Metric::kk: return d_kk(a, b, opts);
        case Metric::c0: return d_0(a, b, opts);
        case Metric::c: return d_c(a, b, opts);
        case Metric::mt: return d_mt(a, b, opts);
        case Metric::l1kk: return d_l1kk(a, b, opts);
    }
    throw Error("unknown metric");
}

/// Audit of the chain d_KK(B, uBu*) <= 2 d(u, N_A(B)) <= 2‖u − 1‖.
struct ConjugationAudit {
    DistanceResult dkk;           // with the conjugation-bound upper
    double norm_u_minus_1 = 0.0;  // ‖u − 1‖_r
    double normalizer_dist = 0.0; // upper bound on d(u, N_A(B))
    bool chain_holds = false;
};

inline ConjugationAudit conjugation_audit(const AlgElement& u, const StarSubalgebra& b,
                                          const DistanceOptions& opts = {}) {
    if (!is_unitary(u)) throw NotUnitary();
    ConjugationAudit a;
    AlgElement one = one_element(u.parent);
    a.norm_u_minus_1 = norm_operator(u - one);
    // normalizer sample: 1 and the group-element normalizers of B
    a.normalizer_dist = a.norm_u_minus_1;
    for (int g = 0; g < u.parent->group->order; ++g) {
        AlgElement v = group_element(u.parent, g);
        if (!normalizer_membership(v, b)) continue;
        a.normalizer_dist = std::min(a.normalizer_dist, norm_operator(u - v));
    }
    StarSubalgebra moved = conjugate_subalgebra(b, u);
    DistanceOptions o = opts;
    o.multistart = std::min(o.multistart, 8); // the bound below is the payload
    a.dkk = d_kk(b, moved, o);
    double bound = std::min(1.0, 2.0 * a.normalizer_dist);
    if (bound < a.dkk.upper) {
        a.dkk.upper = bound;
        a.dkk.certificate = (a.dkk.certificate == Certificate::equality)
                                ? a.dkk.certificate
                                : Certificate::conjugation_bound;
        a.dkk.lower = std::min(a.dkk.lower, a.dkk.upper);
    }
    a.chain_holds = a.dkk.upper <= 2.0 * a.normalizer_dist + 1e-9 &&
                    a.normalizer_dist <= a.norm_u_minus_1 + 1e-9;
    return a;
}

/// Perturbation radius from the quasi-basis size N: alpha = 0.5/(10N)^4.
inline double perturbation_radius(const CondExp& e) {
    std::size_t n = 0;
    if (e.quasi_basis) {
        n = e.quasi_basis->size();
    } else {
        auto qb = quasi_basis_solve(e); // throws when no finite quasi-basis
        n = qb.first.size();
    }
    double tenn = 10.0 * (double)n;
    return 0.5 / (tenn * tenn * tenn * tenn);
}

/// Half of the documented strict-inequality threshold gamma = 1e-6.
inline double dickson_radius() { return 5e-7; }

/// Scan: sample unitaries close to 1 and test whether u C[H] u* coincides
/// with C[K] for any subgroup K; matches with K ≠ H are reported.
struct ConjugateScan {
    int trials = 0;
    int matches_h = 0;
    int matches_other = 0;
};

inline ConjugateScan ch_conjugate_scan(AlgebraPtr a, const Subgroup& h, int trials,
                                       std::uint64_t seed = 0) {
    ConjugateScan sc;
    sc.trials = trials;
    Rng rng(seed);
    StarSubalgebra ch = subgroup_algebra(a, h);
    std::vector<StarSubalgebra> cks;
    for (const Subgroup& k : all_subgroups(a->group))
        cks.push_back(subgroup_algebra(a, k));
    StarSubalgebra full = full_subalgebra(a);
    AlgElement one = one_element(a);
    int made = 0;
    while (made < trials) {
        AlgElement hrm = random_hermitian(full, rng, 0.05);
        AlgElement u = exp_element(Complex(0, 1) * hrm);
        if (norm_operator(u - one) >= 0.5) continue;
        ++made;
        StarSubalgebra moved = conjugate_subalgebra(ch, u);
        for (size_t i = 0; i < cks.size(); ++i) {
            if (!same_algebra(moved, cks[i])) continue;
            if (cks[i].subgroup->elements == h.elements)
                ++sc.matches_h;
            else
                ++sc.matches_other;
        }
    }
    return sc;
}

} // namespace opalg
