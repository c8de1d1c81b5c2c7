// Command-line driver: distance computations, invariant-verification
// suites, and intermediate-subalgebra reports for finite-dimensional
// *-algebras built from groups and crossed products.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "opalg/basic_construction.hpp"
#include "opalg/corpus.hpp"
#include "opalg/io.hpp"
#include "opalg/lattice.hpp"
#include "opalg/metrics.hpp"

using nlohmann::json;
using namespace opalg;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct Context {
    AlgebraPtr algebra;
};

Context load_context(const std::string& group_path, const std::string& algebra_path) {
    if (!group_path.empty() && !algebra_path.empty())
        throw SpecParse("give either --group or --algebra, not both");
    Context ctx;
    if (!group_path.empty()) {
        ctx.algebra = make_group_algebra(io::load_group_file(group_path));
    } else if (!algebra_path.empty()) {
        ctx.algebra = io::load_algebra_file(algebra_path);
    } else {
        throw SpecParse("one of --group or --algebra is required");
    }
    return ctx;
}

/// Resolve a --sub token: a named subgroup, "trivial", "full", "delta",
/// "scalar", or "conj:<name>:<unitary element file>".
StarSubalgebra resolve_sub(const Context& ctx, const std::string& token) {
    AlgebraPtr a = ctx.algebra;
    if (token == "trivial")
        return subgroup_algebra(a, trivial_subgroup(a->group), "trivial");
    if (token == "full") return full_subalgebra(a);
    if (token == "delta") return diagonal_subalgebra(a);
    if (token == "scalar") return scalar_subalgebra(a);
    if (token.rfind("conj:", 0) == 0) {
        auto rest = token.substr(5);
        auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw SpecParse("conj spec must be conj:<name>:<unitary file>");
        StarSubalgebra base = resolve_sub(ctx, rest.substr(0, colon));
        AlgElement u = io::load_element(a, io::load_json(rest.substr(colon + 1)));
        return conjugate_subalgebra(base, u, token);
    }
    auto it = a->group->named_subgroups.find(token);
    if (it == a->group->named_subgroups.end())
        throw SpecParse("unknown subalgebra name '" + token + "'");
    return subgroup_algebra(a, make_subgroup(a->group, it->second), token);
}

Metric parse_metric(const std::string& m) {
    if (m == "kk") return Metric::kk;
    if (m == "c0") return Metric::c0;
    if (m == "c") return Metric::c;
    if (m == "mt") return Metric::mt;
    if (m == "l1kk") return Metric::l1kk;
    throw SpecParse("unknown metric '" + m + "'");
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        io::write_file_atomic(out_path, content);
}

int cmd_dist(const std::string& group_path, const std::string& algebra_path,
             std::vector<std::string> subs, const std::string& metric_s,
             std::uint64_t seed, double tol, const std::string& out_path,
             const std::string& format) {
    Context ctx = load_context(group_path, algebra_path);
    if (subs.size() < 2) throw SpecParse("need at least two --sub");
    Metric metric = parse_metric(metric_s);
    DistanceOptions opts;
    opts.seed = seed;
    opts.tol = tol;
    std::vector<io::CsvRow> rows;
    bool any_nonconverged = false;
    for (size_t i = 0; i < subs.size(); ++i)
        for (size_t j = i + 1; j < subs.size(); ++j) {
            StarSubalgebra a = resolve_sub(ctx, subs[i]);
            StarSubalgebra b = resolve_sub(ctx, subs[j]);
            DistanceResult r = compute_distance(metric, a, b, opts);
            any_nonconverged = any_nonconverged || !r.converged;
            rows.push_back({subs[i], subs[j], r});
        }
    if (format == "csv") {
        emit(out_path, io::distances_to_csv(rows));
    } else {
        json j;
        j["schema"] = 1;
        j["tool"] = std::string("opalg ") + kToolVersion;
        j["seed"] = seed;
        json results = json::array();
        for (const auto& row : rows) {
            json r = io::distance_to_json(row.result);
            r["sub_a"] = row.a;
            r["sub_b"] = row.b;
            results.push_back(r);
        }
        j["results"] = results;
        emit(out_path, j.dump(2) + "\n");
    }
    return any_nonconverged ? 2 : 0;
}

// ---- verify suites ----

struct SuiteResult {
    json checks = json::array();
    bool all_pass = true;

    void record(const std::string& name, bool pass, double residual = 0.0) {
        checks.push_back({{"name", name}, {"pass", pass}, {"residual", residual}});
        all_pass = all_pass && pass;
    }
};

void suite_inequalities(const Context& ctx, std::uint64_t seed, SuiteResult& out) {
    AlgebraPtr a = ctx.algebra;
    Rng rng(seed);
    const int samples = 200;
    bool norm_equiv = true, ag_ineq = true, ce_ineq = true, cstar = true, gh = true;
    double worst = 0;
    Subgroup triv = trivial_subgroup(a->group);
    auto subgroups = all_subgroups(a->group);
    for (int t = 0; t < samples; ++t) {
        AlgElement x(a, rng.cgaussian_vec(a->dim));
        double nr = norm_operator(x);
        double eta = norm_eta(x, triv);
        if (!(eta <= nr + 1e-9 && nr <= a->group->order * eta + 1e-9)) norm_equiv = false;
        // coefficient bound ‖a_g‖² ≤ ‖E(x*x)‖_r
        AlgElement xx = adjoint(x) * x;
        double exx = norm_operator(truncate_to_subgroup(xx, triv));
        for (int g = 0; g < a->group->order; ++g) {
            std::vector<Mat> ag = a->coeff_blocks(x.coeffs, g);
            double an = 0;
            for (const auto& m : ag) an = std::max(an, operator_norm(m));
            if (an * an > exx + 1e-9) ag_ineq = false;
        }
        double c2 = norm_operator(adjoint(x) * x);
        if (std::abs(c2 - nr * nr) > 1e-7 * std::max(1.0, nr * nr)) cstar = false;
        worst = std::max(worst, std::abs(c2 - nr * nr));
    }
    // scalar-coefficient bound over subgroups (group algebras only)
    if (a->coeff_dim == 1) {
        for (int t = 0; t < 50; ++t) {
            AlgElement x(a, rng.cgaussian_vec(a->dim));
            for (const auto& h : subgroups) {
                double lhs = norm_eta(x, h);
                double rhs = 0;
                for (int g = 0; g < a->group->order; ++g) {
                    double inner = 0;
                    for (int hh : h.elements)
                        inner += std::abs(x.coeffs(a->idx(a->group->mul(g, hh), 0, 0, 0)));
                    rhs += std::abs(x.coeffs(a->idx(g, 0, 0, 0))) * inner;
                }
                if (lhs * lhs > rhs + 1e-9) ce_ineq = false;
            }
        }
    }
    for (int g = 0; g < a->group->order && gh; ++g)
        for (int h = g + 1; h < a->group->order; ++h) {
            double n = norm_operator(group_element(a, g) - group_element(a, h));
            if (n < std::sqrt(2.0) - 1e-9) { gh = false; break; }
        }
    out.record("norm-equivalence", norm_equiv);
    out.record("coefficient-bound", ag_ineq);
    out.record("subgroup-eta-bound", ce_ineq);
    out.record("cstar-identity", cstar, worst);
    out.record("group-element-separation", gh);
}

void suite_expectations(const Context& ctx, std::uint64_t seed, SuiteResult& out) {
    AlgebraPtr a = ctx.algebra;
    Rng rng(seed);
    bool index_exact = true, recon = true, pp = true;
    double worst_recon = 0;
    for (const auto& h : all_subgroups(a->group)) {
        CondExp e = expectation_subgroup(a, h);
        auto qb = quasi_basis_solve(e);
        double idx_expected = (double)a->group->order / h.order();
        AlgElement diff = qb.second - idx_expected * one_element(a);
        if (diff.coeffs.norm() > 1e-9) index_exact = false;
        Mat phi = reconstruction_matrix(e, qb.first);
        double resid = (phi - Mat::Identity(a->dim, a->dim)).cwiseAbs().maxCoeff();
        worst_recon = std::max(worst_recon, resid);
        if (resid > 1e-9) recon = false;
        double c = pimsner_popa_constant(e, rng, 16);
        if (c < h.order() / (double)a->group->order - 1e-9) pp = false;
    }
    out.record("watatani-index-exact", index_exact);
    out.record("quasi-basis-reconstruction", recon, worst_recon);
    out.record("pimsner-popa-bound", pp);
}

void suite_basic_construction(const Context& ctx, std::uint64_t seed, SuiteResult& out) {
    AlgebraPtr a = ctx.algebra;
    Rng rng(seed);
    bool all_ok = true;
    double worst = 0;
    for (const auto& h : all_subgroups(a->group)) {
        CondExp e = expectation_subgroup(a, h);
        try {
            BasicConstruction bc = basic_construction(full_subalgebra(a), e);
            CondExp dual = dual_expectation(bc);
            verify_cond_exp(dual, rng);
            AlgElement e1el = matrix_to_element(bc.gns_algebra, bc.e1);
            AlgElement x0 = pushdown(bc, dual, e1el);
            double r = (x0 - one_element(a)).coeffs.norm();
            worst = std::max(worst, r);
            if (r > 1e-9) all_ok = false;
        } catch (const Error& ex) {
            all_ok = false;
        }
    }
    out.record("basic-construction-identities", all_ok, worst);
}

void suite_utheta(const Context& ctx, std::uint64_t /*seed*/, SuiteResult& out) {
    AlgebraPtr a = ctx.algebra;
    int invo = -1;
    for (int g = 0; g < a->group->order; ++g)
        if (g != a->group->identity && a->group->inv(g) == g) { invo = g; break; }
    if (invo < 0) {
        out.record("u-theta (no involution in group; vacuous)", true);
        return;
    }
    bool unitary_ok = true, bound_ok = true;
    AlgElement one = one_element(a);
    for (int i = 0; i < 1000; ++i) {
        double theta = (i + 0.5) * (2 * M_PI / 1000.0);
        AlgElement u = u_theta(a, theta, invo);
        if (!is_unitary(u, 1e-12)) unitary_ok = false;
        double n = norm_operator(u - one);
        if (n > std::abs(std::cos(theta) - 1) + std::abs(std::sin(theta)) + 1e-9)
            bound_ok = false;
    }
    out.record("u-theta-unitarity", unitary_ok);
    out.record("u-theta-norm-bound", bound_ok);
}

int cmd_verify(const std::string& group_path, const std::string& algebra_path,
               const std::string& suite, std::uint64_t seed,
               const std::string& out_path) {
    Context ctx = load_context(group_path, algebra_path);
    SuiteResult sr;
    bool known = false;
    if (suite == "inequalities" || suite == "all") {
        suite_inequalities(ctx, seed, sr);
        known = true;
    }
    if (suite == "expectations" || suite == "all") {
        suite_expectations(ctx, seed, sr);
        known = true;
    }
    if (suite == "basic-construction" || suite == "all") {
        suite_basic_construction(ctx, seed, sr);
        known = true;
    }
    if (suite == "u-theta" || suite == "all") {
        suite_utheta(ctx, seed, sr);
        known = true;
    }
    if (!known) throw UnknownSuite("unknown suite '" + suite + "'");
    json j;
    j["schema"] = 1;
    j["tool"] = std::string("opalg ") + kToolVersion;
    j["seed"] = seed;
    j["suite"] = suite;
    j["checks"] = sr.checks;
    j["all_pass"] = sr.all_pass;
    emit(out_path, j.dump(2) + "\n");
    return sr.all_pass ? 0 : 1;
}

int cmd_lattice(const std::string& group_path, const std::string& algebra_path,
                const std::string& base, const std::string& demo, int n,
                std::uint64_t seed, const std::string& out_path) {
    Context ctx = load_context(group_path, algebra_path);
    AlgebraPtr a = ctx.algebra;
    Rng rng(seed);
    json j;
    j["schema"] = 1;
    j["tool"] = std::string("opalg ") + kToolVersion;
    j["seed"] = seed;
    if (demo == "conjugate-family") {
        // the Δ ⊂ M_n demonstration: n conjugates of the diagonal, all IMS
        CondExp e = expectation_trace_preserving(a, scalar_subalgebra(a));
        StarSubalgebra delta = diagonal_subalgebra(a);
        CondExp f = expectation_trace_preserving(a, delta);
        std::vector<AlgElement> us;
        StarSubalgebra full = full_subalgebra(a);
        for (int i = 0; i < n; ++i) us.push_back(random_unitary(full, rng));
        ConjugateFamily fam = conjugate_family(e, delta, f, us, rng);
        j["demo"] = "conjugate-family";
        j["requested"] = n;
        j["distinct_ims_members"] = fam.distinct;
        emit(out_path, j.dump(2) + "\n");
        return 0;
    }
    // subgroup-lattice classification
    Subgroup base_sub = base == "trivial"
                            ? trivial_subgroup(a->group)
                            : [&] {
                                  auto it = a->group->named_subgroups.find(base);
                                  if (it == a->group->named_subgroups.end())
                                      throw SpecParse("unknown base subgroup '" + base + "'");
                                  return make_subgroup(a->group, it->second);
                              }();
    CondExp e = expectation_subgroup(a, base_sub);
    auto entries = as_entries(subgroup_candidates(a, base_sub), "subgroup");
    LatticeReport rep = ims_classify(e, std::move(entries), rng);
    json cands = json::array();
    for (const auto& entry : rep.entries)
        cands.push_back({{"name", entry.candidate.name},
                         {"provenance", entry.provenance},
                         {"dim", entry.dim},
                         {"ims", entry.ims},
                         {"in_f", entry.in_f},
                         {"in_i0", entry.in_i0},
                         {"in_i1", entry.in_i1}});
    j["base"] = base;
    j["candidates"] = cands;
    j["note"] = "classified, not exhaustive";
    emit(out_path, j.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("OPALG_THREADS"))
        Eigen::setNbThreads(std::max(1, std::atoi(threads)));

    CLI::App app{"distances between subalgebras of finite-dimensional *-algebras"};
    app.require_subcommand(1);

    std::string group_path, algebra_path, out_path, format = "json";
    std::uint64_t seed = 0;
    double tol = 1e-7;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--group", group_path, "group spec (JSON)");
        cmd->add_option("--algebra", algebra_path, "algebra spec (JSON)");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--tol", tol, "tolerance");
        cmd->add_option("--out", out_path, "output file (atomic write)");
    };

    auto* dist = app.add_subcommand("dist", "distance between named subalgebras");
    std::vector<std::string> subs;
    std::string metric = "kk";
    add_common(dist);
    dist->add_option("--sub", subs, "subalgebra name (repeat)")->expected(-1);
    dist->add_option("--metric", metric, "kk|c0|c|mt|l1kk");
    dist->add_option("--format", format, "json|csv");

    auto* verify = app.add_subcommand("verify", "run an invariant suite");
    std::string suite;
    add_common(verify);
    verify->add_option("--suite", suite, "suite name")->required();

    auto* lattice = app.add_subcommand("lattice", "intermediate-subalgebra report");
    std::string base = "trivial", demo;
    int demo_n = 25;
    add_common(lattice);
    lattice->add_option("--base", base, "base subalgebra (subgroup name or 'trivial')");
    lattice->add_option("--demo", demo, "demo name (conjugate-family)");
    lattice->add_option("--n", demo_n, "sample count for demos");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dist->parsed())
            return cmd_dist(group_path, algebra_path, subs, metric, seed, tol,
                            out_path, format);
        if (verify->parsed())
            return cmd_verify(group_path, algebra_path, suite, seed, out_path);
        if (lattice->parsed())
            return cmd_lattice(group_path, algebra_path, base, demo, demo_n, seed,
                               out_path);
    } catch (const Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
