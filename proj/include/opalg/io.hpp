#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "opalg/algebra.hpp"
#include "opalg/metrics.hpp"
#include "opalg/subalgebra.hpp"

namespace opalg {
namespace io {

using nlohmann::json;

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw SpecParse("unknown key '" + it.key() + "' in " + where);
    }
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecParse("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw SpecParse(std::string("invalid JSON in ") + path + ": " + ex.what());
    }
    return j;
}

/// Atomic write: temp file in the same directory, then rename.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

/// A generator entry is either a flat image array [1,0,2] or a cycle list
/// [[0,1],[2]] over 0-based points.
inline Permutation parse_permutation(const json& j) {
    if (!j.is_array() || j.empty()) throw SpecParse("empty permutation spec");
    if (j[0].is_array()) {
        int maxpt = 0;
        for (const auto& cyc : j)
            for (const auto& p : cyc) maxpt = std::max(maxpt, p.get<int>());
        Permutation perm(maxpt + 1);
        for (int i = 0; i <= maxpt; ++i) perm[i] = i;
        for (const auto& cyc : j) {
            int n = (int)cyc.size();
            for (int i = 0; i < n; ++i)
                perm[cyc[i].get<int>()] = cyc[(i + 1) % n].get<int>();
        }
        return perm;
    }
    return j.get<Permutation>();
}

inline GroupPtr load_group(const json& j) {
    reject_unknown_keys(j, {"generators", "table", "name", "subgroups"}, "group spec");
    std::string name = j.value("name", "");
    GroupPtr g;
    if (j.contains("generators")) {
        std::vector<Permutation> gens;
        for (const auto& spec : j["generators"]) gens.push_back(parse_permutation(spec));
        g = group_from_generators(gens, 5040, name);
    } else if (j.contains("table")) {
        auto table = std::make_shared<GroupTable>();
        auto rows = j["table"].get<std::vector<std::vector<int>>>();
        table->order = (int)rows.size();
        for (const auto& r : rows) {
            if ((int)r.size() != table->order) throw SpecParse("table is not square");
            table->mul_table.insert(table->mul_table.end(), r.begin(), r.end());
        }
        // identify the identity and inverses from the table
        table->identity = -1;
        for (int e = 0; e < table->order; ++e) {
            bool is_id = true;
            for (int x = 0; x < table->order; ++x)
                if (table->mul(e, x) != x || table->mul(x, e) != x) { is_id = false; break; }
            if (is_id) { table->identity = e; break; }
        }
        if (table->identity < 0) throw SpecParse("table has no identity");
        table->inv_table.resize(table->order);
        for (int x = 0; x < table->order; ++x) {
            int inv = -1;
            for (int y = 0; y < table->order; ++y)
                if (table->mul(x, y) == table->identity) { inv = y; break; }
            if (inv < 0) throw SpecParse("table has no inverse for some element");
            table->inv_table[x] = inv;
        }
        for (int x = 0; x < table->order; ++x)
            table->labels.push_back("g" + std::to_string(x));
        table->name = name;
        table->validate();
        g = table;
    } else {
        throw SpecParse("group spec needs 'generators' or 'table'");
    }
    if (j.contains("subgroups")) {
        auto mutable_g = std::const_pointer_cast<GroupTable>(g);
        for (auto it = j["subgroups"].begin(); it != j["subgroups"].end(); ++it) {
            const json& sub = it.value();
            reject_unknown_keys(sub, {"generators", "elements"},
                                "subgroup '" + it.key() + "'");
            std::vector<int> elems;
            if (sub.contains("elements")) {
                elems = sub["elements"].get<std::vector<int>>();
            } else if (sub.contains("generators")) {
                if (g->perms.empty())
                    throw SpecParse("generator-specified subgroup needs a permutation group");
                std::vector<int> seed;
                for (const auto& spec : sub["generators"]) {
                    Permutation q = parse_permutation(spec);
                    size_t deg = g->perms[0].size();
                    if (q.size() > deg)
                        throw SpecParse("subgroup generator moves unknown points");
                    for (size_t i = q.size(); i < deg; ++i) q.push_back((int)i);
                    int idx = -1;
                    for (int e = 0; e < g->order; ++e)
                        if (g->perms[e] == q) { idx = e; break; }
                    if (idx < 0) throw SpecParse("subgroup generator not in group");
                    seed.push_back(idx);
                }
                elems = subgroup_closure(*g, seed);
            } else {
                throw SpecParse("subgroup needs 'elements' or 'generators'");
            }
            Subgroup h = make_subgroup(g, elems); // validates
            mutable_g->named_subgroups[it.key()] = h.elements;
        }
    }
    return g;
}

inline GroupPtr load_group_file(const std::string& path) { return load_group(load_json(path)); }

inline Mat parse_complex_matrix(const json& j) {
    auto rows = j.get<std::vector<std::vector<std::vector<double>>>>();
    Mat m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i) {
        if ((int)rows[i].size() != m.cols()) throw SpecParse("ragged matrix");
        for (size_t k = 0; k < rows[i].size(); ++k) {
            if (rows[i][k].size() != 2) throw SpecParse("complex entry needs [re, im]");
            m(i, k) = Complex(rows[i][k][0], rows[i][k][1]);
        }
    }
    return m;
}

inline AlgebraPtr load_algebra(const json& j) {
    reject_unknown_keys(j, {"kind", "group", "blocks", "action", "name"}, "algebra spec");
    std::string kind = j.at("kind").get<std::string>();
    std::string name = j.value("name", "");
    if (kind == "matrix_block_sum") {
        return make_matrix_block_sum(j.at("blocks").get<std::vector<int>>(), name);
    }
    GroupPtr g = j.at("group").is_string() ? load_group_file(j["group"].get<std::string>())
                                           : load_group(j.at("group"));
    if (kind == "group_algebra") return make_group_algebra(g, name);
    if (kind != "crossed_product") throw SpecParse("unknown algebra kind " + kind);
    std::vector<int> blocks = j.at("blocks").get<std::vector<int>>();
    std::vector<BlockAction> action(g->order);
    const json& aj = j.at("action");
    if (aj.is_string() && aj.get<std::string>() == "tautological") {
        // G permuting the points of its defining permutation representation
        if (g->perms.empty()) throw SpecParse("tautological action needs generators");
        if ((int)blocks.size() != (int)g->perms[0].size())
            throw SpecParse("blocks must match the number of points");
        for (int e = 0; e < g->order; ++e) {
            action[e].perm = g->perms[e];
            for (int b = 0; b < (int)blocks.size(); ++b)
                action[e].unitaries.push_back(Mat::Identity(blocks[b], blocks[b]));
        }
    } else {
        for (int e = 0; e < g->order; ++e) {
            const json& ej = aj.at(std::to_string(e));
            reject_unknown_keys(ej, {"perm", "unitaries"}, "action entry");
            action[e].perm = ej.at("perm").get<std::vector<int>>();
            if (ej.contains("unitaries")) {
                for (const auto& u : ej["unitaries"])
                    action[e].unitaries.push_back(parse_complex_matrix(u));
            } else {
                for (int b = 0; b < (int)blocks.size(); ++b)
                    action[e].unitaries.push_back(Mat::Identity(blocks[b], blocks[b]));
            }
        }
    }
    return make_crossed_product(g, std::move(blocks), std::move(action), name);
}

inline AlgebraPtr load_algebra_file(const std::string& path) {
    return load_algebra(load_json(path));
}

inline std::map<std::string, int> label_index(const AlgebraSpec& a) {
    std::map<std::string, int> out;
    for (int k = 0; k < a.dim; ++k) out[a.basis_label(k)] = k;
    return out;
}

/// Elements are serialized as {"label": [re, im]} maps.
inline AlgElement load_element(AlgebraPtr a, const json& j) {
    AlgElement x = zero_element(a);
    auto idx = label_index(*a);
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto found = idx.find(it.key());
        if (found == idx.end()) throw SpecParse("unknown basis label " + it.key());
        auto v = it.value().get<std::vector<double>>();
        if (v.size() != 2) throw SpecParse("coefficient needs [re, im]");
        x.coeffs(found->second) = Complex(v[0], v[1]);
    }
    return x;
}

inline json element_to_json(const AlgElement& x, double tol = 1e-14) {
    json j = json::object();
    for (int k = 0; k < x.parent->dim; ++k) {
        Complex c = x.coeffs(k);
        if (std::abs(c) > tol)
            j[x.parent->basis_label(k)] = {c.real(), c.imag()};
    }
    return j;
}

inline json distance_to_json(const DistanceResult& r) {
    json j;
    j["schema"] = 1;
    j["metric"] = metric_name(r.metric);
    j["lower"] = r.lower;
    j["upper"] = r.upper;
    j["certificate"] = certificate_name(r.certificate);
    j["witness"] = r.witness;
    j["seed"] = r.seed;
    j["iterations"] = r.iterations;
    j["tolerance"] = r.tolerance;
    j["converged"] = r.converged;
    return j;
}

struct CsvRow {
    std::string a, b;
    DistanceResult result;
};

inline std::string distances_to_csv(const std::vector<CsvRow>& rows) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "sub_a,sub_b,metric,lower,upper,certificate,converged\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.a << ',' << r.b << ',' << metric_name(r.result.metric) << ','
            << r.result.lower << ',' << r.result.upper << ','
            << certificate_name(r.result.certificate) << ','
            << (r.result.converged ? "true" : "false") << '\n';
    return out.str();
}

} // namespace io
} // namespace opalg
