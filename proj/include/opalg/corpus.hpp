#pragma once

#include <string>
#include <vector>

#include "opalg/algebra.hpp"

namespace opalg {
namespace corpus {

inline GroupPtr s3() { return group_from_generators({{1, 0, 2}, {1, 2, 0}}, 5040, "S3"); }

inline GroupPtr s4() {
    return group_from_generators({{1, 0, 2, 3}, {1, 2, 3, 0}}, 5040, "S4");
}

inline GroupPtr d4() {
    return group_from_generators({{1, 2, 3, 0}, {2, 1, 0, 3}}, 5040, "D4");
}

/// Q8 via its faithful regular-style action on 8 points: generators i, j as
/// permutations of {1,i,-1,-i,j,k,-j,-k} under left multiplication.
inline GroupPtr q8() {
    // points: 0:1, 1:i, 2:-1, 3:-i, 4:j, 5:k, 6:-j, 7:-k
    Permutation gi{1, 2, 3, 0, 5, 6, 7, 4}; // left mult by i
    Permutation gj{4, 7, 6, 5, 2, 1, 0, 3}; // left mult by j
    return group_from_generators({gi, gj}, 5040, "Q8");
}

inline GroupPtr z6() {
    return group_from_generators({{1, 2, 3, 4, 5, 0}}, 5040, "Z6");
}

inline GroupPtr z2z2() {
    return group_from_generators({{1, 0, 2, 3}, {0, 1, 3, 2}}, 5040, "Z2xZ2");
}

inline GroupPtr z2() { return group_from_generators({{1, 0}}, 5040, "Z2"); }

inline GroupPtr trivial() { return group_from_generators({}, 2, "1"); }

/// The 2x2 matrix algebra with its normalized trace.
inline AlgebraPtr m2() { return make_matrix_block_sum({2}, "M2"); }

/// C^X ⋊ G for an action of G on a finite set X given by point permutations
/// (one permutation per group element index).
inline AlgebraPtr function_crossed_product(GroupPtr g,
                                           const std::vector<Permutation>& point_action,
                                           const std::string& name) {
    int npts = (int)point_action.at(0).size();
    std::vector<int> blocks(npts, 1);
    std::vector<BlockAction> action(g->order);
    for (int e = 0; e < g->order; ++e) {
        action[e].perm = point_action[e];
        action[e].unitaries.assign(npts, Mat::Identity(1, 1));
    }
    return make_crossed_product(g, blocks, std::move(action), name);
}

/// C^X ⋊ G where X = the coset space G/H and G acts by left translation,
/// or X = points of the defining permutation representation. Here: the
/// tautological action when G was built from permutations of |X| points is
/// not retained, so we provide the left-translation action on G/H.
inline AlgebraPtr coset_crossed_product(GroupPtr g, const Subgroup& h,
                                        const std::string& name) {
    std::vector<int> reps = coset_representatives(g, h, CosetSide::Left);
    int npts = (int)reps.size();
    // coset index of an element
    auto coset_of = [&](int x) {
        for (int i = 0; i < npts; ++i)
            for (int hh : h.elements)
                if (g->mul(reps[i], hh) == x) return i;
        throw Error("coset decomposition failed");
    };
    std::vector<Permutation> pact(g->order, Permutation(npts));
    for (int e = 0; e < g->order; ++e)
        for (int i = 0; i < npts; ++i) pact[e][i] = coset_of(g->mul(e, reps[i]));
    return function_crossed_product(g, pact, name);
}

} // namespace corpus
} // namespace opalg
