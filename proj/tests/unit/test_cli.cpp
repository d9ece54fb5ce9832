#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "adaptm/cli.hpp"

using namespace adaptm;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "adaptmreg");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("calibrate is byte deterministic") {
    const std::vector<std::string> args{"calibrate", "--mode", "zeta", "--runs", "2000", "--alpha", "1", "--r", "2",
                                        "--noise", "laplace", "--seed", "11"};
    const auto a = cli(args);
    const auto b = cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("[median-rr]") != std::string::npos);
    auto c = args;
    c.back() = "12";
    CHECK(cli(c).out != a.out);
}

TEST_CASE("bench writes one row per method") {
    const auto cal = tmp("adaptm_cli.cal");
    REQUIRE(cli({"calibrate", "--runs", "1000", "--seed", "11", "--out", cal}).code == 0);
    const auto csv = tmp("adaptm_cli.csv");
    const auto r = cli({"bench", "--example", "1", "--noise", "laplace", "--runs", "50", "--seed", "7", "--calib", cal,
                        "--out", csv});
    REQUIRE(r.code == 0);
    const auto text = slurp(csv);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
    CHECK(text.find("MeanLepski") != std::string::npos);
    CHECK(text.find("MedianOracle") != std::string::npos);
    const auto v = cli({"verify", "--calib", cal, "--seed", "3", "--runs", "1000"});
    CHECK(v.code == 0);
    CHECK(v.out.rfind("section,ratio,runs,seed\n", 0) == 0);
    std::filesystem::remove(cal);
    std::filesystem::remove(csv);
}

TEST_CASE("validation errors exit 1 with one line") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"bench", "--example", "1", "--calib", "x.cal"},
             {"calibrate", "--seed", "1", "--mode", "fancy"},
             {"calibrate", "--seed", "1", "--loss", "l7"},
             {"moments", "--seed", "1", "--N", "100"},
             {"frobnicate"},
             {}}) {
        const auto r = cli(args);
        CHECK(r.code == kExitValidation);
        CHECK(r.err.rfind("error: validation: ", 0) == 0);
        CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    }
}

TEST_CASE("runtime failures exit 2") {
    const auto r = cli({"calibrate", "--seed", "1", "--runs", "1000", "--loss", "median", "--rule", "rr", "--out",
                        "/nonexistent-dir/x.cal"});
    CHECK(r.code == kExitRuntime);
    CHECK(r.err.rfind("error: runtime: ", 0) == 0);
}

TEST_CASE("help exits 0") {
    const auto r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("denoise") != std::string::npos);
}

TEST_CASE("config file with flag override") {
    const auto cfg = tmp("adaptm_cli.ini");
    {
        std::ofstream(cfg) << "[simulate]\nseed = 3\nn = 5\n";
    }
    const auto a = cli({"--config", cfg, "simulate"});
    REQUIRE(a.code == 0);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 6);
    const auto b = cli({"--config", cfg, "simulate", "--n", "3"});
    CHECK(std::count(b.out.begin(), b.out.end(), '\n') == 4);
    {
        std::ofstream(cfg) << "[simulate]\nseed = 3\ncolour = red\n";
    }
    CHECK(cli({"--config", cfg, "simulate"}).code == kExitValidation);
    std::filesystem::remove(cfg);
}

TEST_CASE("denoise writes image and window map") {
    const auto cal = tmp("adaptm_cli_disc.cal");
    const auto in = tmp("adaptm_cli_in.pgm");
    const auto out = tmp("adaptm_cli_out.pgm");
    const auto khat = tmp("adaptm_cli_khat.pgm");
    REQUIRE(cli({"calibrate", "--geometry", "disc", "--runs", "1000", "--seed", "5", "--out", cal}).code == 0);
    REQUIRE(cli({"simulate", "--kind", "image", "--width", "40", "--height", "30", "--low", "60", "--high", "120",
                 "--noise-scale", "10", "--seed", "2", "--out", in})
                .code == 0);
    const auto r = cli({"denoise", "--in", in, "--calib", cal, "--sigma", "auto", "--out", out, "--khat", khat,
                        "--workers", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("sigma: ") != std::string::npos);
    CHECK(slurp(out).rfind("P5\n40 30\n255\n", 0) == 0);
    CHECK(slurp(khat).rfind("P5\n40 30\n12\n", 0) == 0);
    CHECK(cli({"denoise", "--in", in, "--calib", cal, "--sigma", "abc", "--out", out}).code == kExitValidation);
    for (const auto& p : {cal, in, out, khat}) std::filesystem::remove(p);
}

}
