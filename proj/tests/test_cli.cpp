// End-to-end checks of the command-line tool: report schema, aggregate rule,
// parallel evaluation, config layering and the stable error surface.
// Freestanding binary: takes --cli PATH and --workdir DIR.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "centervec/encoding.hpp"
#include "centervec/metrics.hpp"
#include "centervec/raster_io.hpp"
#include "centervec/synth.hpp"

namespace fs = std::filesystem;
using namespace cvec;

namespace {

int failures = 0;

#define REQUIRE(cond, msg)                                                     \
    do {                                                                       \
        if (!(cond)) {                                                         \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg \
                      << "\n";                                                 \
            ++failures;                                                        \
        }                                                                      \
    } while (0)

std::string cli_path;
fs::path workdir;

int run(const std::string& args, const fs::path& stdout_to = {},
        const fs::path& stderr_to = {}) {
    std::string cmd = "\"" + cli_path + "\" " + args;
    if (!stdout_to.empty()) cmd += " > " + stdout_to.string();
    if (!stderr_to.empty()) cmd += " 2> " + stderr_to.string();
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void test_eval_aggregate_is_the_mean() {
    const fs::path d = workdir / "agg";
    fs::create_directories(d);

    SynthParams params;
    params.seed = 404;
    params.shape = {96, 96};
    params.nucleus_count = 6;
    const LabelMap gt = generate_scene(params);
    write_raster(gt, d / "gt.cvr");

    // A degraded prediction: drop one instance entirely.
    LabelMap degraded = gt;
    for (std::int64_t i = 0; i < degraded.size(); ++i) {
        if (degraded[i] == 3) degraded[i] = 0;
    }
    write_raster(degraded, d / "pred_degraded.cvr");
    write_raster(gt, d / "pred_perfect.cvr");

    {
        std::ofstream pairs(d / "pairs.txt");
        pairs << (d / "gt.cvr").string() << " " << (d / "pred_perfect.cvr").string()
              << " perfect\n";
        pairs << (d / "gt.cvr").string() << " " << (d / "pred_degraded.cvr").string()
              << " degraded\n";
    }
    REQUIRE(run("eval --pairs " + (d / "pairs.txt").string(), d / "report.txt") == 0,
            "eval --pairs failed");

    const double degraded_aji = aji(gt, degraded, AjiMode::literal);
    const double expected_aggregate = (1.0 + degraded_aji) / 2.0;

    const std::string report = slurp(d / "report.txt");
    std::istringstream lines(report);
    std::string line;
    bool aggregate = false;
    double got = -1.0;
    int image_blocks = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("image=", 0) == 0) ++image_blocks;
        if (line == "# aggregate") aggregate = true;
        if (aggregate && line.rfind("aji=", 0) == 0) {
            got = std::stod(line.substr(4));
            break;
        }
    }
    REQUIRE(image_blocks == 2, "expected two per-image blocks");
    REQUIRE(std::abs(got - expected_aggregate) < 5e-7,
            "aggregate AJI is not the mean of the per-image values");

    // Parallel evaluation returns byte-identical reports.
    REQUIRE(run("eval --pairs " + (d / "pairs.txt").string() + " --parallel --jobs 3",
                d / "report_par.txt") == 0,
            "parallel eval failed");
    REQUIRE(slurp(d / "report_par.txt") == report, "parallel report differs from sequential");
}

void test_config_layering() {
    const fs::path d = workdir / "cfg";
    fs::create_directories(d);

    SynthParams params;
    params.seed = 7001;
    params.shape = {96, 96};
    params.nucleus_count = 5;
    const LabelMap gt = generate_scene(params);
    write_raster(gt, d / "gt.cvr");

    {
        std::ofstream cfg(d / "run.cfg");
        cfg << "encode.center_distance_threshold = 4.0\n";
    }

    // Config alone: threshold 4.
    REQUIRE(run("encode --gt " + (d / "gt.cvr").string() + " --config " +
                (d / "run.cfg").string() + " --out-dir " + d.string()) == 0,
            "encode with config failed");
    EncodeParams wide;
    wide.center_distance_threshold = 4.0;
    const BinaryMask expect_wide = make_center_mask(gt, wide).mask;
    REQUIRE(read_binary_mask(d / "center.cvr") == expect_wide,
            "config file threshold was not applied");

    // Flag overrides the config file.
    REQUIRE(run("encode --gt " + (d / "gt.cvr").string() + " --config " +
                (d / "run.cfg").string() + " --threshold 2.0 --out-dir " + d.string()) == 0,
            "encode with config+flag failed");
    const BinaryMask expect_default = make_center_mask(gt, EncodeParams{}).mask;
    REQUIRE(read_binary_mask(d / "center.cvr") == expect_default,
            "flag did not override the config file");
}

void test_empty_center_warning() {
    const fs::path d = workdir / "warn";
    fs::create_directories(d);
    LabelMap gt(16, 16, 0);
    gt.at(2, 2) = 1;  // singleton nucleus: erosion annihilates it
    for (int r = 8; r <= 14; ++r) {
        for (int c = 8; c <= 14; ++c) gt.at(r, c) = 2;
    }
    write_raster(gt, d / "gt.cvr");
    REQUIRE(run("encode --gt " + (d / "gt.cvr").string() + " --out-dir " + d.string(),
                d / "out.log", d / "err.log") == 0,
            "encode must succeed despite the vanished center");
    const std::string err = slurp(d / "err.log");
    REQUIRE(err.find("warning:") != std::string::npos &&
                err.find("empty center region") != std::string::npos,
            "missing empty-center warning on stderr");
}

void test_error_surface() {
    const fs::path d = workdir / "err";
    fs::create_directories(d);
    {
        std::ofstream bad(d / "bad.cvr", std::ios::binary);
        bad << "CVRAST01";  // header cut short
    }
    const int rc = run("eval --gt " + (d / "bad.cvr").string() + " --pred " +
                           (d / "bad.cvr").string(),
                       d / "out.log", d / "err.log");
    REQUIRE(rc != 0, "truncated input must fail");
    REQUIRE(WEXITSTATUS(rc) == 2, "data errors exit with 2");
    REQUIRE(slurp(d / "err.log").rfind("error: data:", 0) == 0,
            "data errors carry the stable prefix");
}

}  // namespace

int main(int argc, char** argv) {
    workdir = fs::temp_directory_path() / "centervec_cli_test";
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) cli_path = argv[++i];
        if (arg == "--workdir" && i + 1 < argc) workdir = argv[++i];
    }
    if (cli_path.empty()) {
        std::cerr << "test_cli: --cli PATH is required\n";
        return 2;
    }
    std::error_code ec;
    fs::remove_all(workdir, ec);
    fs::create_directories(workdir);

    test_eval_aggregate_is_the_mean();
    test_config_layering();
    test_empty_center_warning();
    test_error_surface();

    if (failures != 0) {
        std::cerr << failures << " CLI check(s) failed\n";
        return 1;
    }
    std::cout << "all CLI checks passed\n";
    return 0;
}
