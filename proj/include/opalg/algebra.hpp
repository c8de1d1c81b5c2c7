#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "opalg/group.hpp"
#include "opalg/linalg.hpp"

namespace opalg {

// The automorphism attached to one group element: permute the matrix blocks,
// then conjugate each block by a unitary. alpha_g(a)[perm[b]] = U[b] a[b] U[b]*.
struct BlockAction {
    std::vector<int> perm;      // block index map b -> perm[b]
    std::vector<Mat> unitaries; // one d_b x d_b unitary per source block
};

enum class AlgebraKind { GroupAlgebra, CrossedProduct, MatrixBlockSum };

/// A finite-dimensional *-algebra with a faithful trace, realized as a
/// reduced crossed product (⊕_b M_{d_b}) ⋊ G. Group algebras are the case
/// blocks = [1]; plain multi-matrix algebras are the case |G| = 1.
/// Basis label (g, b, i, j) = matrix unit e^b_{ij} placed at group element g.
struct AlgebraSpec : std::enable_shared_from_this<AlgebraSpec> {
    AlgebraKind kind = AlgebraKind::GroupAlgebra;
    GroupPtr group;
    std::vector<int> blocks;          // matrix block dimensions d_b
    std::vector<BlockAction> action;  // one per group element
    std::string name;

    // derived layout
    std::vector<int> block_off2; // offsets of d_b^2 within one group slot
    std::vector<int> block_off1; // offsets of d_b within the D-dim realization
    int coeff_dim = 0;           // S = sum d_b^2
    int rep_block = 0;           // D = sum d_b
    int dim = 0;                 // |G| * S
    int gns_dim = 0;             // |G| * D

    void finalize() {
        block_off2.clear();
        block_off1.clear();
        coeff_dim = rep_block = 0;
        for (int d : blocks) {
            block_off2.push_back(coeff_dim);
            block_off1.push_back(rep_block);
            coeff_dim += d * d;
            rep_block += d;
        }
        dim = group->order * coeff_dim;
        gns_dim = group->order * rep_block;
    }

    int num_blocks() const { return (int)blocks.size(); }
    int idx(int g, int b, int i, int j) const {
        return g * coeff_dim + block_off2[b] + i * blocks[b] + j;
    }

    std::string basis_label(int k) const {
        int g = k / coeff_dim, r = k % coeff_dim;
        int b = 0;
        while (b + 1 < num_blocks() && block_off2[b + 1] <= r) ++b;
        r -= block_off2[b];
        int i = r / blocks[b], j = r % blocks[b];
        if (kind == AlgebraKind::GroupAlgebra) return group->labels[g];
        std::string lbl = "b" + std::to_string(b) + "[" + std::to_string(i) + "," +
                          std::to_string(j) + "]";
        if (group->order > 1) lbl += "|" + group->labels[g];
        return lbl;
    }

    // blocks of the coefficient at group element g
    std::vector<Mat> coeff_blocks(const Vec& coeffs, int g) const {
        std::vector<Mat> out(num_blocks());
        for (int b = 0; b < num_blocks(); ++b) {
            int d = blocks[b];
            out[b] = Mat(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) out[b](i, j) = coeffs(idx(g, b, i, j));
        }
        return out;
    }

    void add_blocks(Vec& coeffs, int g, const std::vector<Mat>& bl,
                    Complex scale = Complex(1, 0)) const {
        for (int b = 0; b < num_blocks(); ++b) {
            int d = blocks[b];
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    coeffs(idx(g, b, i, j)) += scale * bl[b](i, j);
        }
    }

    std::vector<Mat> alpha(int g, const std::vector<Mat>& a) const {
        const BlockAction& act = action[g];
        std::vector<Mat> out(num_blocks());
        for (int b = 0; b < num_blocks(); ++b)
            out[act.perm[b]] = act.unitaries[b] * a[b] * act.unitaries[b].adjoint();
        return out;
    }

    std::vector<Mat> zero_blocks() const {
        std::vector<Mat> out(num_blocks());
        for (int b = 0; b < num_blocks(); ++b)
            out[b] = Mat::Zero(blocks[b], blocks[b]);
        return out;
    }

    std::vector<Mat> identity_blocks() const {
        std::vector<Mat> out(num_blocks());
        for (int b = 0; b < num_blocks(); ++b)
            out[b] = Mat::Identity(blocks[b], blocks[b]);
        return out;
    }

    // D x D block-diagonal matrix of a coefficient
    Mat coeff_matrix(const std::vector<Mat>& bl) const {
        Mat m = Mat::Zero(rep_block, rep_block);
        for (int b = 0; b < num_blocks(); ++b)
            m.block(block_off1[b], block_off1[b], blocks[b], blocks[b]) = bl[b];
        return m;
    }
};

using AlgebraPtr = std::shared_ptr<const AlgebraSpec>;

/// Element of an AlgebraSpec as a dense coefficient vector.
struct AlgElement {
    AlgebraPtr parent;
    Vec coeffs;

    AlgElement() = default;
    AlgElement(AlgebraPtr p, Vec c) : parent(std::move(p)), coeffs(std::move(c)) {}

    bool same_parent(const AlgElement& o) const { return parent.get() == o.parent.get(); }
};

inline void require_same_parent(const AlgElement& x, const AlgElement& y) {
    if (!x.same_parent(y)) throw ParentMismatch();
}

inline AlgElement zero_element(AlgebraPtr a) {
    return AlgElement(a, Vec::Zero(a->dim));
}

inline AlgElement one_element(AlgebraPtr a) {
    AlgElement x = zero_element(a);
    a->add_blocks(x.coeffs, a->group->identity, a->identity_blocks());
    return x;
}

/// The unitary 1·g for a group element.
inline AlgElement group_element(AlgebraPtr a, int g) {
    AlgElement x = zero_element(a);
    a->add_blocks(x.coeffs, g, a->identity_blocks());
    return x;
}

inline AlgElement basis_element(AlgebraPtr a, int k) {
    AlgElement x = zero_element(a);
    x.coeffs(k) = 1.0;
    return x;
}

inline AlgElement operator+(const AlgElement& x, const AlgElement& y) {
    require_same_parent(x, y);
    return AlgElement(x.parent, x.coeffs + y.coeffs);
}

inline AlgElement operator-(const AlgElement& x, const AlgElement& y) {
    require_same_parent(x, y);
    return AlgElement(x.parent, x.coeffs - y.coeffs);
}

inline AlgElement operator*(Complex c, const AlgElement& x) {
    return AlgElement(x.parent, c * x.coeffs);
}

inline AlgElement operator*(double c, const AlgElement& x) {
    return Complex(c, 0) * x;
}

/// Twisted convolution: (a_s s)(b_t t) = a_s alpha_s(b_t) st.
inline AlgElement multiply(const AlgElement& x, const AlgElement& y) {
    require_same_parent(x, y);
    const AlgebraSpec& A = *x.parent;
    const GroupTable& G = *A.group;
    AlgElement out = zero_element(x.parent);
    for (int s = 0; s < G.order; ++s) {
        if (x.coeffs.segment(s * A.coeff_dim, A.coeff_dim).isZero(0)) continue;
        std::vector<Mat> as = A.coeff_blocks(x.coeffs, s);
        for (int t = 0; t < G.order; ++t) {
            if (y.coeffs.segment(t * A.coeff_dim, A.coeff_dim).isZero(0)) continue;
            std::vector<Mat> bt = A.alpha(s, A.coeff_blocks(y.coeffs, t));
            for (int b = 0; b < A.num_blocks(); ++b) bt[b] = as[b] * bt[b];
            A.add_blocks(out.coeffs, G.mul(s, t), bt);
        }
    }
    return out;
}

inline AlgElement operator*(const AlgElement& x, const AlgElement& y) {
    return multiply(x, y);
}

/// (Σ a_s s)* = Σ alpha_{s^{-1}}(a_s*) s^{-1}.
inline AlgElement adjoint(const AlgElement& x) {
    const AlgebraSpec& A = *x.parent;
    const GroupTable& G = *A.group;
    AlgElement out = zero_element(x.parent);
    for (int s = 0; s < G.order; ++s) {
        std::vector<Mat> as = A.coeff_blocks(x.coeffs, s);
        for (auto& m : as) m = m.adjoint().eval();
        A.add_blocks(out.coeffs, G.inv(s), A.alpha(G.inv(s), as));
    }
    return out;
}

/// Normalized trace: tau(Σ a_g g) = tr(a_e)/D; tau(1) = 1.
inline Complex tau(const AlgElement& x) {
    const AlgebraSpec& A = *x.parent;
    Complex t = 0;
    for (int b = 0; b < A.num_blocks(); ++b)
        for (int i = 0; i < A.blocks[b]; ++i)
            t += x.coeffs(A.idx(A.group->identity, b, i, i));
    return t / (double)A.rep_block;
}

/// tau(y* x); in coefficient coordinates this is y†x / D.
inline Complex tau_inner(const AlgElement& x, const AlgElement& y) {
    require_same_parent(x, y);
    return y.coeffs.dot(x.coeffs) / (double)x.parent->rep_block;
}

inline double norm_tau(const AlgElement& x) {
    return x.coeffs.norm() / std::sqrt((double)x.parent->rep_block);
}

/// Left regular representation on C^D ⊗ l²(G):
/// rep(Σ a_s s) block (sg, g) = alpha_{(sg)^{-1}}(a_s) as a D x D matrix.
inline Mat matrix_rep(const AlgElement& x) {
    const AlgebraSpec& A = *x.parent;
    const GroupTable& G = *A.group;
    const int D = A.rep_block;
    Mat m = Mat::Zero(A.gns_dim, A.gns_dim);
    for (int s = 0; s < G.order; ++s) {
        if (x.coeffs.segment(s * A.coeff_dim, A.coeff_dim).isZero(0)) continue;
        std::vector<Mat> as = A.coeff_blocks(x.coeffs, s);
        for (int g = 0; g < G.order; ++g) {
            int sg = G.mul(s, g);
            m.block(sg * D, g * D, D, D) += A.coeff_matrix(A.alpha(G.inv(sg), as));
        }
    }
    return m;
}

inline double norm_operator(const AlgElement& x) {
    return operator_norm(matrix_rep(x));
}

/// l¹ norm: sum over g of the operator norm of the coefficient a_g
/// (modulus for scalar coefficients).
inline double norm_l1(const AlgElement& x) {
    const AlgebraSpec& A = *x.parent;
    double s = 0;
    for (int g = 0; g < A.group->order; ++g) {
        std::vector<Mat> ag = A.coeff_blocks(x.coeffs, g);
        double blockmax = 0;
        for (const auto& m : ag) blockmax = std::max(blockmax, operator_norm(m));
        s += blockmax;
    }
    return s;
}

/// Coefficient truncation to the support of a subgroup (the subgroup
/// conditional expectation, inlined here for the eta seminorms).
inline AlgElement truncate_to_subgroup(const AlgElement& x, const Subgroup& h) {
    if (h.parent.get() != x.parent->group.get()) throw ParentMismatch();
    AlgElement out = zero_element(x.parent);
    const AlgebraSpec& A = *x.parent;
    for (int g : h.elements)
        out.coeffs.segment(g * A.coeff_dim, A.coeff_dim) =
            x.coeffs.segment(g * A.coeff_dim, A.coeff_dim);
    return out;
}

/// ‖E_H(x* x)‖_r^{1/2}.
inline double norm_eta(const AlgElement& x, const Subgroup& h) {
    return std::sqrt(norm_operator(truncate_to_subgroup(adjoint(x) * x, h)));
}

/// u_theta = cos(theta)·e + i·sin(theta)·g for an involution g.
inline AlgElement u_theta(AlgebraPtr a, double theta, int g) {
    if (a->group->inv(g) != g) throw NotAnInvolution();
    return Complex(std::cos(theta), 0) * one_element(a) +
           Complex(0, std::sin(theta)) * group_element(a, g);
}

namespace detail {

inline void require_unitary_matrix(const Mat& u, double tol = 1e-9) {
    if (u.rows() != u.cols() ||
        (u.adjoint() * u - Mat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff() > tol)
        throw NotUnitary();
}

} // namespace detail

/// Validate an AlgebraSpec: layout, action is a homomorphism into block
/// automorphisms, and the regular representation is a faithful *-homomorphism.
inline void validate_algebra(const AlgebraSpec& a, double tol = 1e-10) {
    const GroupTable& G = *a.group;
    if ((int)a.action.size() != G.order || a.blocks.empty())
        throw SpecParse("malformed algebra spec");
    for (int d : a.blocks)
        if (d <= 0) throw SpecParse("block dimension must be positive");
    for (int g = 0; g < G.order; ++g) {
        const BlockAction& act = a.action[g];
        if ((int)act.perm.size() != a.num_blocks() ||
            (int)act.unitaries.size() != a.num_blocks())
            throw SpecParse("action arity mismatch");
        std::vector<bool> hit(a.num_blocks(), false);
        for (int b = 0; b < a.num_blocks(); ++b) {
            int p = act.perm[b];
            if (p < 0 || p >= a.num_blocks() || hit[p] || a.blocks[p] != a.blocks[b])
                throw SpecParse("action permutation invalid");
            hit[p] = true;
            if (act.unitaries[b].rows() != a.blocks[b]) throw SpecParse("action unitary size");
            detail::require_unitary_matrix(act.unitaries[b]);
        }
    }
    // identity acts trivially; alpha_g alpha_h = alpha_{gh} on a basis
    auto apply_on_basis = [&](int g, int b, int i, int j) {
        std::vector<Mat> e = a.zero_blocks();
        e[b](i, j) = 1.0;
        return a.coeff_matrix(a.alpha(g, e));
    };
    for (int b = 0; b < a.num_blocks(); ++b)
        for (int i = 0; i < a.blocks[b]; ++i)
            for (int j = 0; j < a.blocks[b]; ++j) {
                std::vector<Mat> e = a.zero_blocks();
                e[b](i, j) = 1.0;
                Mat em = a.coeff_matrix(e);
                if ((a.coeff_matrix(a.alpha(G.identity, e)) - em).cwiseAbs().maxCoeff() > tol)
                    throw SpecParse("identity action is not trivial");
                for (int g = 0; g < G.order; ++g)
                    for (int h = 0; h < G.order; ++h) {
                        Mat lhs = a.coeff_matrix(a.alpha(g, a.alpha(h, e)));
                        Mat rhs = apply_on_basis(G.mul(g, h), b, i, j);
                        if ((lhs - rhs).cwiseAbs().maxCoeff() > tol)
                            throw SpecParse("action is not a homomorphism");
                    }
            }
}

/// Verify rep(xy) = rep(x)rep(y) and rep(x*) = rep(x)† on all basis pairs,
/// and that rep is injective (scaled isometry for the tau inner product).
inline void verify_representation(AlgebraPtr a, double tol = 1e-10) {
    std::vector<Mat> reps(a->dim);
    for (int k = 0; k < a->dim; ++k) reps[k] = matrix_rep(basis_element(a, k));
    for (int k = 0; k < a->dim; ++k) {
        AlgElement xk = basis_element(a, k);
        Mat star = matrix_rep(adjoint(xk));
        if ((star - reps[k].adjoint()).cwiseAbs().maxCoeff() > tol)
            throw SpecParse("representation does not respect the involution");
        for (int l = 0; l < a->dim; ++l) {
            Mat prod = matrix_rep(multiply(xk, basis_element(a, l)));
            if ((prod - reps[k] * reps[l]).cwiseAbs().maxCoeff() > tol)
                throw SpecParse("representation is not multiplicative");
        }
        // faithfulness: Frobenius norm of rep(e_k) is |G| / D-scaled, nonzero
        if (reps[k].norm() < 0.5) throw SpecParse("representation is not faithful");
    }
}

// --- constructors ---

inline AlgebraPtr make_group_algebra(GroupPtr g, const std::string& name = "") {
    auto a = std::make_shared<AlgebraSpec>();
    a->kind = AlgebraKind::GroupAlgebra;
    a->group = std::move(g);
    a->blocks = {1};
    a->action.resize(a->group->order);
    for (auto& act : a->action) {
        act.perm = {0};
        act.unitaries = {Mat::Identity(1, 1)};
    }
    a->name = name.empty() ? ("C[" + a->group->name + "]") : name;
    a->finalize();
    return a;
}

inline AlgebraPtr make_matrix_block_sum(std::vector<int> block_dims,
                                        const std::string& name = "") {
    auto a = std::make_shared<AlgebraSpec>();
    a->kind = AlgebraKind::MatrixBlockSum;
    a->group = group_from_generators({}, 2, "1");
    a->blocks = std::move(block_dims);
    BlockAction id;
    for (int d : a->blocks) {
        id.perm.push_back((int)id.perm.size());
        id.unitaries.push_back(Mat::Identity(d, d));
    }
    a->action = {id};
    a->name = name;
    a->finalize();
    return a;
}

inline AlgebraPtr make_crossed_product(GroupPtr g, std::vector<int> block_dims,
                                       std::vector<BlockAction> action,
                                       const std::string& name = "") {
    auto a = std::make_shared<AlgebraSpec>();
    a->kind = AlgebraKind::CrossedProduct;
    a->group = std::move(g);
    a->blocks = std::move(block_dims);
    a->action = std::move(action);
    a->name = name;
    a->finalize();
    validate_algebra(*a);
    return a;
}

} // namespace opalg
