#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "roughsde/csv_io.hpp"
#include "roughsde/fbm.hpp"

using namespace roughsde;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(CLI_BIN) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -1;
}

std::string fresh_dir(const std::string& name) {
    fs::path p = fs::path("cli_tmp") / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::map<std::string, std::string> read_manifest(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "manifest.txt");
    REQUIRE(in.good());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::string slurp(const std::string& file) {
    std::ifstream in(file);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("bad invocations exit 2, help exits 0") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("gen-path --bogus 3") == 2);
    CHECK(run_cli("solve --n 64") == 2);  // --sigma is required
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("precondition failures exit 3") {
    std::string d = fresh_dir("pre");
    CHECK(run_cli("gen-path --H 1.5 --n 64 --out " + d) == 3);
    CHECK(run_cli("solve --sigma power:1.5 --n 64 --out " + d) == 3);
    CHECK(run_cli("solve --sigma nonsense:1 --n 64 --out " + d) == 3);
    CHECK(run_cli("check-variability --alpha 0.4 --n 64 --M 100 --out " + d) == 3);
}

TEST_CASE("gen-path is deterministic and round-trips at full precision") {
    std::string a = fresh_dir("gen_a"), b = fresh_dir("gen_b");
    REQUIRE(run_cli("gen-path --H 0.5 --n 4 --T 1 --seed 1 --out " + a) == 0);
    REQUIRE(run_cli("gen-path --H 0.5 --n 4 --T 1 --seed 1 --out " + b) == 0);

    auto ma = read_manifest(a), mb = read_manifest(b);
    REQUIRE(ma.count("csv") == 1);
    REQUIRE(mb.count("csv") == 1);
    CHECK(slurp((fs::path(a) / ma["csv"]).string()) ==
          slurp((fs::path(b) / mb["csv"]).string()));

    // file values equal the in-process sampler bit for bit
    GridPath disk = read_path_csv((fs::path(a) / ma["csv"]).string());
    GridPath mem = sample_fbm(0.5, Grid(1.0, 4), 1);
    REQUIRE(disk.values.size() == mem.values.size());
    for (std::size_t k = 0; k < mem.values.size(); ++k)
        CHECK(disk.values[k] == mem.values[k]);
}

TEST_CASE("solve writes path, exit times, and the identity defect") {
    std::string d = fresh_dir("solve");
    REQUIRE(run_cli("solve --sigma step:4,1.3333333333333333 --H 0.75 --n 128 --seed 3 "
                    "--eps-list 0.1,1.5 --out " + d) == 0);
    auto m = read_manifest(d);
    CHECK(std::stod(m.at("lambda_defect")) <= 1e-8);
    REQUIRE(m.count("csv") == 1);
    REQUIRE(m.count("csv_tau") == 1);

    CsvTable path = read_csv((fs::path(d) / m["csv"]).string());
    CHECK(path.header == std::vector<std::string>{"t", "Y", "X"});
    CHECK(path.rows.size() == 129);

    CsvTable tau = read_csv((fs::path(d) / m["csv_tau"]).string());
    CHECK(tau.header == std::vector<std::string>{"eps", "time", "reached", "node"});
    CHECK(tau.rows.size() == 2);
    CHECK(tau.rows[0][2] == "0");  // sigma >= 4/3 never drops to 0.1
}

TEST_CASE("transform table is monotone") {
    std::string d = fresh_dir("transform");
    REQUIRE(run_cli("transform --sigma step:4,1.3333333333333333 --n 64 --out " + d) == 0);
    auto m = read_manifest(d);
    CsvTable t = read_csv((fs::path(d) / m.at("csv")).string());
    CHECK(t.header == std::vector<std::string>{"x", "lambda"});
    REQUIRE(t.rows.size() == 65);
    double prev = -1e300;
    for (const auto& row : t.rows) {
        double y = std::stod(row[1]);
        CHECK(y > prev);
        prev = y;
    }
}

TEST_CASE("verify-ito residual medians fall with the mesh") {
    std::string d = fresh_dir("ito");
    REQUIRE(run_cli("verify-ito --F square --H 0.75 --n-list 256,1024 --seeds 5 --seed 2 "
                    "--out " + d) == 0);
    auto m = read_manifest(d);
    CHECK(m.at("decreasing") == "1");
    CsvTable t = read_csv((fs::path(d) / m.at("csv")).string());
    REQUIRE(t.rows.size() == 2);
    CHECK(std::stod(t.rows[1][1]) < std::stod(t.rows[0][1]));
}

TEST_CASE("verify-bound ensemble passes and records zero failures") {
    std::string d = fresh_dir("bound");
    REQUIRE(run_cli("verify-bound --sigma step:4,1.3333333333333333 --H 0.75 --n 256 "
                    "--seeds 10 --out " + d) == 0);
    auto m = read_manifest(d);
    CHECK(m.at("failures") == "0");
    CsvTable t = read_csv((fs::path(d) / m.at("csv")).string());
    REQUIRE(t.rows.size() == 10);
    for (const auto& row : t.rows) CHECK(row[3] == "1");
}

TEST_CASE("verify-mollifier reports domination and shrinking seminorms") {
    std::string d = fresh_dir("moll");
    REQUIRE(run_cli("verify-mollifier --sigma step:4,1.3333333333333333 --H 0.75 --n 128 "
                    "--seeds 3 --out " + d) == 0);
    auto m = read_manifest(d);
    CHECK(m.at("dominated") == "1");
    CsvTable t = read_csv((fs::path(d) / m.at("csv")).string());
    REQUIRE(t.rows.size() == 4);
    CHECK(std::stod(t.rows[3][1]) < std::stod(t.rows[0][1]));
}

TEST_CASE("check-variability emits the report summary") {
    std::string d = fresh_dir("var");
    REQUIRE(run_cli("check-variability --H 0.75 --n 128 --M 100 --seed 11 --out " + d) == 0);
    auto m = read_manifest(d);
    CHECK(std::stod(m.at("sup")) > 0.0);
    CHECK(m.count("stable") == 1);
    CHECK(std::stod(m.at("q")) == doctest::Approx(0.35 / 0.74));
    CsvTable t = read_csv((fs::path(d) / m.at("csv")).string());
    CHECK(t.header == std::vector<std::string>{"y", "mean_integral", "stderr"});
    REQUIRE(t.rows.size() == 42);  // 41 grid rows plus the sup footer
    CHECK(t.rows.back().at(0) == "sup");
    CHECK(t.rows.back().at(1) == m.at("sup"));
    CHECK((t.rows.back().at(2) == "stable" || t.rows.back().at(2) == "unstable"));
    CHECK((t.rows.back().at(2) == "stable") == (m.at("stable") == "1"));
}

TEST_CASE("experiment preset runs the full chain") {
    std::string d = fresh_dir("exp");
    REQUIRE(run_cli("experiment step --alpha 0.25 --H 0.75 --n 256 --seed 7 --seeds 3 "
                    "--out " + d) == 0);
    auto m = read_manifest(d);
    CHECK(std::stod(m.at("lambda_defect_sup")) <= 1e-8);
    CHECK(m.at("preset") == "step");
    CsvTable t = read_csv((fs::path(d) / m.at("csv")).string());
    CHECK(t.header ==
          std::vector<std::string>{"n", "median_sde_residual", "ratio_vs_prev"});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0][0] == "64");
    CHECK(t.rows[2][0] == "256");
}

TEST_CASE("worker count does not change the numbers") {
    std::string a = fresh_dir("thr_a"), b = fresh_dir("thr_b");
    std::string common = " solve --sigma step:4,1.3333333333333333 --H 0.75 --n 128"
                         " --seed 5 --theta 0.3 --out ";
    auto run_env = [&](const std::string& env, const std::string& dir) {
        std::string cmd = env + " " + std::string(CLI_BIN) + common + dir + " >/dev/null 2>&1";
        int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    REQUIRE(run_env("ROUGH_SDE_THREADS=1", a) == 0);
    REQUIRE(run_env("ROUGH_SDE_THREADS=3", b) == 0);
    auto ma = read_manifest(a), mb = read_manifest(b);
    CHECK(slurp((fs::path(a) / ma.at("csv")).string()) ==
          slurp((fs::path(b) / mb.at("csv")).string()));
    CHECK(ma.at("residual") == mb.at("residual"));
}
