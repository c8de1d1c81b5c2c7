#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "opalg/errors.hpp"
#include "opalg/linalg.hpp"

namespace opalg {

using Permutation = std::vector<int>; // perm[i] = image of point i

/// A finite group as a complete multiplication table. Element 0 is the
/// identity. Immutable after construction.
struct GroupTable {
    int order = 0;
    std::vector<int> mul_table; // order*order, row-major: mul_table[g*order+h] = g*h
    std::vector<int> inv_table;
    int identity = 0;
    std::vector<std::string> labels;
    std::string name;
    // optional named subgroups (element index sets), used by loaders/CLI
    std::map<std::string, std::vector<int>> named_subgroups;
    // defining permutations when built from generators (empty for raw tables)
    std::vector<Permutation> perms;

    int mul(int g, int h) const { return mul_table[g * order + h]; }
    int inv(int g) const { return inv_table[g]; }
    int conj(int g, int h) const { return mul(mul(g, h), inv(g)); } // g h g^-1

    /// Latin-square, identity, inverse and associativity checks. Full
    /// associativity for order <= 24, randomized above.
    void validate(Rng* rng = nullptr) const {
        if (order <= 0 || (int)mul_table.size() != order * order ||
            (int)inv_table.size() != order)
            throw SpecParse("malformed group table");
        for (int g = 0; g < order; ++g) {
            std::vector<bool> row(order, false), col(order, false);
            for (int h = 0; h < order; ++h) {
                int r = mul(g, h), c = mul(h, g);
                if (r < 0 || r >= order || row[r] || col[c])
                    throw SpecParse("multiplication table is not a Latin square");
                row[r] = col[c] = true;
            }
            if (mul(identity, g) != g || mul(g, identity) != g)
                throw SpecParse("identity is inconsistent");
            if (mul(g, inv(g)) != identity || mul(inv(g), g) != identity)
                throw SpecParse("inverse map is inconsistent");
        }
        auto check = [&](int a, int b, int c) {
            if (mul(mul(a, b), c) != mul(a, mul(b, c)))
                throw SpecParse("multiplication table is not associative");
        };
        if (order <= 24) {
            for (int a = 0; a < order; ++a)
                for (int b = 0; b < order; ++b)
                    for (int c = 0; c < order; ++c) check(a, b, c);
        } else {
            Rng local(12345);
            Rng& r = rng ? *rng : local;
            for (int t = 0; t < 100000; ++t)
                check(r.index(order), r.index(order), r.index(order));
        }
    }
};

using GroupPtr = std::shared_ptr<const GroupTable>;

/// A subgroup given by its sorted element set.
struct Subgroup {
    GroupPtr parent;
    std::vector<int> elements; // sorted, contains identity

    int order() const { return (int)elements.size(); }
    bool contains(int g) const {
        return std::binary_search(elements.begin(), elements.end(), g);
    }
    bool operator==(const Subgroup& o) const { return elements == o.elements; }
    bool operator<(const Subgroup& o) const {
        if (elements.size() != o.elements.size())
            return elements.size() < o.elements.size();
        return elements < o.elements;
    }
};

inline bool is_subgroup(const GroupTable& g, const std::vector<int>& elems) {
    if (elems.empty()) return false;
    std::set<int> s(elems.begin(), elems.end());
    if (!s.count(g.identity)) return false;
    for (int a : s)
        for (int b : s)
            if (!s.count(g.mul(a, b))) return false;
    for (int a : s)
        if (!s.count(g.inv(a))) return false;
    return true;
}

inline void require_subgroup(const GroupTable& g, const Subgroup& h) {
    if (!is_subgroup(g, h.elements)) throw NotASubgroup();
}

inline Subgroup make_subgroup(GroupPtr g, std::vector<int> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    Subgroup h{std::move(g), std::move(elems)};
    require_subgroup(*h.parent, h);
    return h;
}

/// Closure of a subset under multiplication (parent is finite, so this is
/// the generated subgroup once the subset contains the identity).
inline std::vector<int> subgroup_closure(const GroupTable& g, std::vector<int> seed) {
    std::set<int> s(seed.begin(), seed.end());
    s.insert(g.identity);
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<int> cur(s.begin(), s.end());
        for (int a : cur)
            for (int b : cur)
                if (s.insert(g.mul(a, b)).second) grew = true;
    }
    return {s.begin(), s.end()};
}

namespace detail {

inline std::string cycle_label(const Permutation& p) {
    const int n = (int)p.size();
    std::vector<bool> seen(n, false);
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (seen[i] || p[i] == i) continue;
        out += '(';
        int j = i;
        bool first = true;
        while (!seen[j]) {
            seen[j] = true;
            if (!first) out += ' ';
            out += std::to_string(j + 1);
            first = false;
            j = p[j];
        }
        out += ')';
    }
    return out.empty() ? "e" : out;
}

inline Permutation compose(const Permutation& g, const Permutation& h) {
    // apply h, then g
    Permutation r(g.size());
    for (size_t i = 0; i < g.size(); ++i) r[i] = g[h[i]];
    return r;
}

} // namespace detail

/// Generate a group table from permutation generators by breadth-first
/// closure. Convention: mul(g, h) = "apply h, then g".
inline GroupPtr group_from_generators(std::vector<Permutation> gens,
                                      int closure_cap = 5040,
                                      const std::string& name = "") {
    size_t degree = 1;
    for (const auto& p : gens) degree = std::max(degree, p.size());
    for (auto& p : gens) {
        size_t old = p.size();
        p.resize(degree);
        for (size_t i = old; i < degree; ++i) p[i] = (int)i;
        std::vector<bool> hit(degree, false);
        for (int v : p) {
            if (v < 0 || v >= (int)degree || hit[v]) throw NotBijective();
            hit[v] = true;
        }
    }
    Permutation id(degree);
    for (size_t i = 0; i < degree; ++i) id[i] = (int)i;

    std::set<Permutation> elems{id};
    std::queue<Permutation> frontier;
    frontier.push(id);
    while (!frontier.empty()) {
        Permutation cur = frontier.front();
        frontier.pop();
        for (const auto& g : gens) {
            Permutation next = detail::compose(g, cur);
            if (elems.insert(next).second) {
                if ((int)elems.size() > closure_cap) throw ClosureCapExceeded();
                frontier.push(next);
            }
        }
    }

    std::vector<Permutation> sorted(elems.begin(), elems.end()); // lex order, id first
    auto table = std::make_shared<GroupTable>();
    table->order = (int)sorted.size();
    table->identity = 0;
    table->name = name;
    table->perms = sorted;
    std::map<Permutation, int> index;
    for (int i = 0; i < table->order; ++i) {
        index[sorted[i]] = i;
        table->labels.push_back(detail::cycle_label(sorted[i]));
    }
    table->mul_table.resize(table->order * table->order);
    table->inv_table.resize(table->order);
    for (int a = 0; a < table->order; ++a) {
        for (int b = 0; b < table->order; ++b)
            table->mul_table[a * table->order + b] = index.at(detail::compose(sorted[a], sorted[b]));
        Permutation inv(degree);
        for (size_t i = 0; i < degree; ++i) inv[sorted[a][i]] = (int)i;
        table->inv_table[a] = index.at(inv);
    }
    table->validate();
    return table;
}

/// Exhaustive subgroup enumeration by closure growth; sorted by order then
/// lexicographic element set. Capped at |G| <= 64.
inline std::vector<Subgroup> all_subgroups(GroupPtr g) {
    if (g->order > 64) throw OrderCapExceeded();
    std::set<std::vector<int>> found;
    std::queue<std::vector<int>> frontier;
    std::vector<int> trivial{g->identity};
    found.insert(trivial);
    frontier.push(trivial);
    while (!frontier.empty()) {
        std::vector<int> cur = frontier.front();
        frontier.pop();
        for (int e = 0; e < g->order; ++e) {
            if (std::binary_search(cur.begin(), cur.end(), e)) continue;
            std::vector<int> seed = cur;
            seed.push_back(e);
            std::vector<int> cl = subgroup_closure(*g, seed);
            if (found.insert(cl).second) frontier.push(cl);
        }
    }
    std::vector<Subgroup> out;
    for (const auto& elems : found) out.push_back(Subgroup{g, elems});
    std::sort(out.begin(), out.end());
    return out;
}

inline Subgroup normalizer(GroupPtr g, const Subgroup& h) {
    require_subgroup(*g, h);
    std::vector<int> elems;
    for (int a = 0; a < g->order; ++a) {
        std::vector<int> conj;
        conj.reserve(h.elements.size());
        for (int x : h.elements) conj.push_back(g->conj(a, x));
        std::sort(conj.begin(), conj.end());
        if (conj == h.elements) elems.push_back(a);
    }
    return make_subgroup(g, std::move(elems));
}

inline Subgroup centralizer(GroupPtr g, const Subgroup& h) {
    require_subgroup(*g, h);
    std::vector<int> elems;
    for (int a = 0; a < g->order; ++a) {
        bool commutes = true;
        for (int x : h.elements)
            if (g->mul(a, x) != g->mul(x, a)) { commutes = false; break; }
        if (commutes) elems.push_back(a);
    }
    return make_subgroup(g, std::move(elems));
}

inline Subgroup center(GroupPtr g) {
    Subgroup full{g, {}};
    for (int a = 0; a < g->order; ++a) full.elements.push_back(a);
    return centralizer(g, full);
}

enum class CosetSide { Left, Right };

/// One representative per coset, the smallest element index in each;
/// representatives listed in increasing order.
inline std::vector<int> coset_representatives(GroupPtr g, const Subgroup& h,
                                              CosetSide side = CosetSide::Left) {
    require_subgroup(*g, h);
    std::vector<bool> covered(g->order, false);
    std::vector<int> reps;
    for (int a = 0; a < g->order; ++a) {
        if (covered[a]) continue;
        reps.push_back(a);
        for (int x : h.elements)
            covered[side == CosetSide::Left ? g->mul(a, x) : g->mul(x, a)] = true;
    }
    return reps;
}

struct ConjugationOrbit {
    std::vector<Subgroup> orbit;
    Subgroup stabilizer;
};

inline ConjugationOrbit conjugation_orbit(GroupPtr g, const Subgroup& h) {
    require_subgroup(*g, h);
    std::set<std::vector<int>> seen;
    std::vector<Subgroup> orbit;
    for (int a = 0; a < g->order; ++a) {
        std::vector<int> conj;
        conj.reserve(h.elements.size());
        for (int x : h.elements) conj.push_back(g->conj(a, x));
        std::sort(conj.begin(), conj.end());
        if (seen.insert(conj).second) orbit.push_back(Subgroup{g, conj});
    }
    return ConjugationOrbit{std::move(orbit), normalizer(g, h)};
}

inline Subgroup trivial_subgroup(GroupPtr g) {
    return Subgroup{g, {g->identity}};
}

inline Subgroup full_subgroup(GroupPtr g) {
    Subgroup h{g, {}};
    for (int a = 0; a < g->order; ++a) h.elements.push_back(a);
    return h;
}

} // namespace opalg
