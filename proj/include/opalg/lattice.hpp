#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opalg/expectation.hpp"

namespace opalg {

/// Intermediate-subalgebra candidates from the subgroup lattice:
/// {C[K] : H ≤ K ≤ G} realized inside the given algebra.
inline std::vector<StarSubalgebra> subgroup_candidates(AlgebraPtr a, const Subgroup& h) {
    if (h.parent.get() != a->group.get()) throw ParentMismatch();
    require_subgroup(*a->group, h);
    std::vector<StarSubalgebra> out;
    for (const Subgroup& k : all_subgroups(a->group)) {
        bool contains_h = true;
        for (int e : h.elements)
            if (!k.contains(e)) { contains_h = false; break; }
        if (contains_h) out.push_back(subgroup_algebra(a, k));
    }
    return out;
}

struct LatticeEntry {
    StarSubalgebra candidate;
    std::string provenance; // subgroup | conjugate | user
    bool ims = false;       // admits an E-compatible expectation
    bool in_f = false;      // F(B,A,E) filter
    bool in_i0 = false;     // I0 filter
    bool in_i1 = false;     // I1 filter
    int dim = 0;
};

struct LatticeReport {
    StarSubalgebra base;  // B
    std::vector<LatticeEntry> entries;
};

/// Classify candidates B ⊆ C ⊆ A: IMS membership via the compatibility
/// solver, plus the relative-commutant filters. A subspace is contained in
/// a union of two subspaces iff it lies in one of them, which makes the
/// C_A(B) ⊆ C_A(C) ∪ C predicate decidable by two span comparisons.
inline LatticeReport ims_classify(const CondExp& e,
                                  std::vector<LatticeEntry> candidates,
                                  Rng& rng) {
    AlgebraPtr a = e.parent;
    StarSubalgebra cab = relative_commutant(e.target, a);
    LatticeReport rep{e.target, {}};
    for (LatticeEntry entry : candidates) {
        const StarSubalgebra& c = entry.candidate;
        if (!algebra_contained(e.target, c)) throw InclusionViolated();
        entry.dim = c.dim();
        entry.ims = compatible_expectation(e, c, rng).has_value();
        StarSubalgebra cac = relative_commutant(c, a);
        bool union_ok = subspace_contained(cab.Q, cac.Q) ||
                        subspace_contained(cab.Q, c.Q);
        entry.in_i0 = union_ok;
        entry.in_f = entry.ims && union_ok;
        entry.in_i1 = subspace_contained(cab.Q, c.Q);
        rep.entries.push_back(std::move(entry));
    }
    return rep;
}

inline std::vector<LatticeEntry> as_entries(std::vector<StarSubalgebra> cands,
                                            const std::string& provenance) {
    std::vector<LatticeEntry> out;
    for (auto& c : cands) {
        LatticeEntry e;
        e.candidate = std::move(c);
        e.provenance = provenance;
        out.push_back(std::move(e));
    }
    return out;
}

/// Conjugates u C u* for u in the normalizer of B, each with its compatible
/// expectation F_u = Ad_u ∘ F ∘ Ad_{u*}; pairwise-distinctness is checked
/// by span comparison.
struct ConjugateFamily {
    std::vector<StarSubalgebra> members;
    std::vector<CondExp> expectations;
    int distinct = 0;
};

inline ConjugateFamily conjugate_family(const CondExp& e, const StarSubalgebra& c,
                                        const CondExp& f_c,
                                        const std::vector<AlgElement>& unitaries,
                                        Rng& rng) {
    ConjugateFamily fam;
    for (const AlgElement& u : unitaries) {
        if (!normalizer_membership(u, e.target)) throw NotInNormalizer();
        CondExp fu = conjugate_expectation(f_c, u);
        // certify IMS membership of uCu* with respect to F_u
        verify_cond_exp(fu, rng);
        if ((e.matrix * fu.matrix - e.matrix).cwiseAbs().maxCoeff() > 1e-7)
            throw NotIMS("conjugated expectation is not E-compatible");
        fam.members.push_back(fu.target);
        fam.expectations.push_back(std::move(fu));
    }
    for (size_t i = 0; i < fam.members.size(); ++i) {
        bool fresh = true;
        for (size_t j = 0; j < i; ++j)
            if (same_algebra(fam.members[i], fam.members[j])) { fresh = false; break; }
        if (fresh) ++fam.distinct;
    }
    return fam;
}

/// Orbit-stabilizer surrogate for |IMS|: Σ over orbit representatives of
/// [N : N ∩ N_C], computed with group-element normalizers. A lower-bound
/// surrogate whenever unitary normalizers exceed group ones.
inline long ims_cardinality_estimate(AlgebraPtr a, const Subgroup& base,
                                     const std::vector<Subgroup>& orbit_reps) {
    GroupPtr g = a->group;
    Subgroup n_b = normalizer(g, base);
    long total = 0;
    for (const Subgroup& rep : orbit_reps) {
        Subgroup n_c = normalizer(g, rep);
        std::vector<int> inter;
        for (int x : n_b.elements)
            if (n_c.contains(x)) inter.push_back(x);
        Subgroup meet = make_subgroup(g, inter);
        total += n_b.order() / meet.order();
    }
    return total;
}

} // namespace opalg
