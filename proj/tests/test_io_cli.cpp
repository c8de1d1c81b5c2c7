#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "opalg/corpus.hpp"
#include "opalg/io.hpp"

using namespace opalg;

namespace {

std::string data_path(const std::string& file) {
    return std::string(OPALG_DATA_DIR) + "/" + file;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(OPALG_CLI_BIN) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("group specs load with named subgroups") {
    GroupPtr s3 = io::load_group_file(data_path("s3.json"));
    REQUIRE(s3->order == 6);
    REQUIRE(s3->named_subgroups.at("A3").size() == 3);
    REQUIRE(s3->named_subgroups.at("C2").size() == 2);
    REQUIRE(s3->named_subgroups.at("G").size() == 6);
    REQUIRE(io::load_group_file(data_path("s4.json"))->order == 24);
    REQUIRE(io::load_group_file(data_path("d4.json"))->order == 8);
    REQUIRE(io::load_group_file(data_path("q8.json"))->order == 8);
    REQUIRE(io::load_group_file(data_path("z6.json"))->order == 6);
    REQUIRE(io::load_group_file(data_path("z2z2.json"))->order == 4);
}

TEST_CASE("table-form group specs round-trip through validation") {
    nlohmann::json j;
    j["table"] = {{0, 1}, {1, 0}};
    GroupPtr z2 = io::load_group(j);
    REQUIRE(z2->order == 2);
    REQUIRE(z2->inv(1) == 1);

    nlohmann::json bad;
    bad["table"] = {{0, 1}, {0, 1}};
    REQUIRE_THROWS_AS(io::load_group(bad), SpecParse);
}

TEST_CASE("unknown keys are rejected") {
    nlohmann::json j;
    j["generators"] = {{1, 0}};
    j["typo_field"] = 1;
    REQUIRE_THROWS_AS(io::load_group(j), SpecParse);
}

TEST_CASE("algebra specs load: matrix block sum and crossed product") {
    AlgebraPtr m2 = io::load_algebra_file(data_path("m2.json"));
    REQUIRE(m2->dim == 4);
    REQUIRE(m2->blocks == std::vector<int>{2});
    AlgebraPtr cp = io::load_algebra_file(data_path("c3xs3.json"));
    REQUIRE(cp->dim == 18);
    verify_representation(cp);
}

TEST_CASE("element JSON round trip") {
    AlgebraPtr m2 = io::load_algebra_file(data_path("m2.json"));
    AlgElement u = io::load_element(m2, io::load_json(data_path("u_rot.json")));
    REQUIRE(is_unitary(u, 1e-9));
    nlohmann::json j = io::element_to_json(u);
    AlgElement u2 = io::load_element(m2, j);
    REQUIRE((u - u2).coeffs.norm() < 1e-14);
}

TEST_CASE("csv output has header, dot decimals and full precision") {
    DistanceResult r;
    r.metric = Metric::kk;
    r.lower = 0.125;
    r.upper = 1.0;
    r.certificate = Certificate::numeric;
    std::string csv = io::distances_to_csv({{"A3", "C2", r}});
    REQUIRE(csv.rfind("sub_a,sub_b,metric,lower,upper,certificate,converged\n", 0) == 0);
    REQUIRE(csv.find("A3,C2,kk,0.125,1,numeric,true") != std::string::npos);
    REQUIRE(csv.find(',') != std::string::npos);
    REQUIRE(csv.find("0,125") == std::string::npos); // no locale comma decimals
}

TEST_CASE("atomic write leaves no temp file") {
    std::string path = "io_test_atomic.json";
    io::write_file_atomic(path, "{\"schema\":1}\n");
    REQUIRE(slurp(path) == "{\"schema\":1}\n");
    std::ifstream tmp(path + ".tmp");
    REQUIRE(!tmp.good());
    std::remove(path.c_str());
}

TEST_CASE("cli dist: subgroup pair certificate and exit codes") {
    std::string out = "cli_dist_out.json";
    int rc = run_cli("dist --group " + data_path("s3.json") +
                     " --metric kk --sub A3 --sub C2 --out " + out);
    REQUIRE(rc == 0);
    nlohmann::json j = io::load_json(out);
    REQUIRE(j["schema"] == 1);
    REQUIRE(j["results"].size() == 1);
    REQUIRE(j["results"][0]["lower"] == 1.0);
    REQUIRE(j["results"][0]["upper"] == 1.0);
    REQUIRE(j["results"][0]["certificate"] == "subgroup-pair");
    std::remove(out.c_str());

    // same subalgebra: distance 0
    rc = run_cli("dist --group " + data_path("s3.json") +
                 " --metric kk --sub A3 --sub A3 --out " + out);
    REQUIRE(rc == 0);
    j = io::load_json(out);
    REQUIRE(j["results"][0]["upper"] == 0.0);
    REQUIRE(j["results"][0]["certificate"] == "equality");
    std::remove(out.c_str());

    // bad input: exit 1
    REQUIRE(run_cli("dist --group " + data_path("s3.json") +
                    " --metric kk --sub A3 --sub NOPE") == 1);
    REQUIRE(run_cli("dist --group " + data_path("s3.json") +
                    " --metric bogus --sub A3 --sub C2") == 1);
}

TEST_CASE("cli dist: conjugated diagonal in M2 gives a numeric interval") {
    std::string out = "cli_dist_m2.json";
    int rc = run_cli("dist --algebra " + data_path("m2.json") +
                     " --metric c --sub delta --sub conj:delta:" +
                     data_path("u_rot.json") + " --seed 1 --out " + out);
    REQUIRE(rc == 0);
    nlohmann::json j = io::load_json(out);
    REQUIRE(j["results"][0]["certificate"] == "numeric");
    double lo = j["results"][0]["lower"], hi = j["results"][0]["upper"];
    REQUIRE(lo > 0.0);
    REQUIRE(lo <= hi);
    std::remove(out.c_str());
}

TEST_CASE("cli output is byte-identical for identical config and seed") {
    std::string o1 = "cli_det_1.json", o2 = "cli_det_2.json";
    std::string args = "dist --algebra " + data_path("m2.json") +
                       " --metric mt --sub delta --sub conj:delta:" +
                       data_path("u_rot.json") + " --seed 42 --out ";
    REQUIRE(run_cli(args + o1) == 0);
    REQUIRE(run_cli(args + o2) == 0);
    REQUIRE(slurp(o1) == slurp(o2));
    std::remove(o1.c_str());
    std::remove(o2.c_str());
}

TEST_CASE("cli verify: suites pass on small corpora") {
    REQUIRE(run_cli("verify --suite inequalities --group " + data_path("z6.json")) == 0);
    REQUIRE(run_cli("verify --suite basic-construction --group " +
                    data_path("z2.json")) == 0);
    REQUIRE(run_cli("verify --suite expectations --group " + data_path("z2z2.json")) == 0);
    REQUIRE(run_cli("verify --suite u-theta --group " + data_path("z2.json")) == 0);
    REQUIRE(run_cli("verify --suite no-such-suite --group " + data_path("z2.json")) == 1);
}

TEST_CASE("cli lattice: candidate report and conjugate-family demo") {
    std::string out = "cli_lattice.json";
    REQUIRE(run_cli("lattice --group " + data_path("s3.json") +
                    " --base trivial --out " + out) == 0);
    nlohmann::json j = io::load_json(out);
    REQUIRE(j["candidates"].size() == 6);
    std::remove(out.c_str());

    REQUIRE(run_cli("lattice --group " + data_path("s3.json") + " --base G --out " +
                    out) == 0);
    j = io::load_json(out);
    REQUIRE(j["candidates"].size() == 1);
    std::remove(out.c_str());

    REQUIRE(run_cli("lattice --algebra " + data_path("m2.json") +
                    " --demo conjugate-family --n 10 --out " + out) == 0);
    j = io::load_json(out);
    REQUIRE(j["distinct_ims_members"].get<int>() >= 8);
    std::remove(out.c_str());
}
