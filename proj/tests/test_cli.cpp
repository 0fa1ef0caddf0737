#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

std::string bin_path() {
    const char* p = std::getenv("GWMAXDEG_BIN");
    REQUIRE_MESSAGE(p != nullptr, "GWMAXDEG_BIN must point at the CLI binary");
    return p;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + bin_path() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const std::string& body) {
    std::vector<std::string> out;
    std::stringstream ss(body);
    std::string line;
    bool past_header = false;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!past_header) {  // column header
            past_header = true;
            continue;
        }
        out.push_back(line);
    }
    return out;
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "gwmaxdeg_cli_tests";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("dist: row-count contract and stdout table") {
    const auto r = run("dist --family geometric:0.3333333 --target local --horizon 4 --rmax 50");
    CHECK(r.exit_code == 0);
    CHECK(data_lines(r.out).size() == 51);
}

TEST_CASE("dist: pmf-file input reproduces the enumeration value") {
    const auto dir = temp_dir();
    const auto pmf = dir / "binary.json";
    {
        std::ofstream f(pmf);
        f << "{\"p\": [0.5, 0, 0.5]}\n";
    }
    const auto r = run("dist --pmf-file " + pmf.string() + " --target generation --horizon 1 --rmax 2");
    CHECK(r.exit_code == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 3);
    // row r=1: cdf is G(G_1(1)) = 0.625
    CHECK(lines[1].substr(0, 2) == "1,");
    CHECK(lines[1].find("0.625") != std::string::npos);
}

TEST_CASE("dist: invalid parameters exit 2") {
    CHECK(run("dist --family poisson:-1 --target generation --horizon 1 --rmax 5").exit_code == 2);
    CHECK(run("dist --family nosuch:1 --target generation --rmax 5").exit_code == 2);
    CHECK(run("dist --target generation --rmax 5").exit_code == 2);  // no spec at all
    CHECK(run("dist --family poisson:1 --family-oops").exit_code == 2);
}

TEST_CASE("global: fixed points of the binary law and mass at infinity") {
    const auto r = run("global --family explicit:0.5,0,0.5 --rmax 2");
    CHECK(r.exit_code == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].find("0,0.5,") == 0);
    CHECK(lines[1].find("1,0.5,") == 0);
    CHECK(lines[2].substr(0, 4) == "2,1,");

    const auto sup = run("global --family explicit:0.25,0,0.75 --rmax 2");
    CHECK(sup.out.find("# limit_mass_at_infinity: 0\n") != std::string::npos);

    const auto pois = run("global --family poisson:1.5 --rmax 5");
    CHECK(pois.out.find("# limit_mass_at_infinity: 0.5828") != std::string::npos);
}

TEST_CASE("ratios: constants, bound gate, regime mismatch") {
    const auto r = run("ratios --family geometric:0.3333333333333333 --regime subcritical --rmax 40");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("# constant: 1-mu = 0.5") != std::string::npos);

    const auto crit = run("ratios --family power:3 --regime critical --rmax 200");
    CHECK(crit.exit_code == 0);  // the product bounds hold; exit 4 only on violation

    const auto mismatch = run("ratios --family explicit:0.5,0,0.5 --regime subcritical --rmax 10");
    CHECK(mismatch.exit_code == 2);
}

TEST_CASE("simulate: oracle agreement and deterministic replay") {
    const auto dir = temp_dir();
    const auto out = dir / "sim.csv";
    const std::string cmd = "simulate --family geometric:0.3333333 --trials 20000 --seed 42 "
                            "--target local --horizon 4 --compare --out " +
                            out.string();
    CHECK(run(cmd).exit_code == 0);
    const auto a = slurp(out);
    CHECK(run(cmd).exit_code == 0);
    CHECK(slurp(out) == a);

    // thread count must not change a single byte either
    CHECK(run(cmd, "GWMAXDEG_THREADS=1").exit_code == 0);
    CHECK(slurp(out) == a);
    CHECK(run(cmd, "GWMAXDEG_THREADS=4").exit_code == 0);
    CHECK(slurp(out) == a);
}

TEST_CASE("simulate: supercritical censor rate lands near 1 - q") {
    const auto r = run("simulate --family poisson:1.5 --trials 5000 --seed 1 --target global "
                       "--max-population 10000 --compare --format json");
    CHECK(r.exit_code == 0);
    const auto pos = r.out.find("\"censor_rate\": 0.58");
    CHECK(pos != std::string::npos);
}

TEST_CASE("simulate: width target emits the bound comparison") {
    const auto r = run("simulate --family geometric:0.3333333 --trials 20000 --seed 9 --target width");
    CHECK(r.exit_code == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0].rfind("width:ccdf,1,20000,1,0,", 0) == 0);  // P[W>=1] = 1 exactly
}

TEST_CASE("json format carries the manifest") {
    const auto r = run("dist --family poisson:0.8 --target generation --horizon 2 --rmax 6 "
                       "--format json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"artifact\": \"gwmaxdeg 1.0.0\"") != std::string::npos);
    CHECK(r.out.find("\"command\": \"dist\"") != std::string::npos);
    CHECK(r.out.find("\"dist\": \"poisson:0.8") != std::string::npos);
}

TEST_CASE("json replay is byte-identical too") {
    const auto dir = temp_dir();
    const auto out = dir / "law.json";
    const std::string cmd =
        "global --family geometric:0.45 --rmax 25 --format json --out " + out.string();
    CHECK(run(cmd).exit_code == 0);
    const auto a = slurp(out);
    CHECK(run(cmd, "GWMAXDEG_THREADS=3").exit_code == 0);
    CHECK(slurp(out) == a);
    CHECK(a.find("\"limit_mass_at_infinity\": 0.0") != std::string::npos);
}
