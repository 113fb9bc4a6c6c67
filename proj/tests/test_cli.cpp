#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

#include "slowmf/errors.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace slowmf;
using namespace slowmf::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() /
               ("slowmf_cli_" + std::to_string(::getpid()) + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        ::unsetenv("SLOWMF_SEED");
        ::unsetenv("SLOWMF_OUT");
    }
    void TearDown() override {
        ::unsetenv("SLOWMF_SEED");
        ::unsetenv("SLOWMF_OUT");
        fs::remove_all(dir_);
    }

    fs::path write(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    int run(const std::string& command, const fs::path& config, const fs::path& out,
            std::vector<std::string> extra = {}) {
        std::vector<std::string> args{"slowmf", command, "--config", config.string(), "--out", out.string()};
        args.insert(args.end(), extra.begin(), extra.end());
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        return run_cli(static_cast<int>(argv.size()), argv.data());
    }

    fs::path dir_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_F(CliTest, TomlAndJsonConfigsParseToTheSameTree) {
    const auto t = load_config_file(write("a.toml", "seed = 4\n[paths]\nmu = [0.1, 0.01]\nT = 0.5\n"));
    const auto j = load_config_file(write("a.json", R"({"seed": 4, "paths": {"mu": [0.1, 0.01], "T": 0.5}})"));
    EXPECT_EQ(t, j);
    const auto fallback = load_config_file(write("b.conf", R"({"seed": 4})"));
    EXPECT_EQ(fallback["seed"], 4);
}

TEST_F(CliTest, UnknownKeysAreRejected) {
    EXPECT_THROW(load_config_file(write("a.toml", "sede = 4\n")), ConfigError);
    const fs::path cfg = write("b.toml", "[paths]\nmu = [0.1]\nn_seed = 3\n");
    EXPECT_EQ(run("paths", cfg, dir_ / "out"), ExitCode::usage);
    const fs::path model = write("c.toml", "[model]\nalpha = 1\n[paths]\nmu = [0.1]\n");
    EXPECT_EQ(run("paths", model, dir_ / "out2"), ExitCode::usage);
}

TEST_F(CliTest, SectionReadsTypedValues) {
    json root = json::parse(R"({"m": {"x": 1.5, "n": 3, "s": "hi", "v": [1, 2], "M": [[1, 0], [0, 2]], "bad": "x"}})");
    Section s(root, "m");
    EXPECT_EQ(s.number("x", 0.0), 1.5);
    EXPECT_EQ(s.integer("n", 0), 3);
    EXPECT_EQ(s.text("s", ""), "hi");
    EXPECT_EQ(s.numbers("v", {}), (std::vector<double>{1, 2}));
    EXPECT_EQ(s.matrix("M")(1, 1), 2.0);
    EXPECT_EQ(s.number("missing", 7.0), 7.0);
    EXPECT_THROW(s.finish(), ConfigError);
    EXPECT_THROW(s.number("bad", 0.0), ConfigError);
    s.finish();
}

TEST_F(CliTest, SeedAndOutputPrecedence) {
    const fs::path cfg = write("a.toml", "seed = 3\nout = \"from_file\"\n");
    RunConfig rc = make_run_config("paths", cfg, std::nullopt, std::nullopt);
    EXPECT_EQ(rc.seed, 3u);
    EXPECT_EQ(rc.out_dir, dir_ / "from_file");
    ::setenv("SLOWMF_SEED", "11", 1);
    ::setenv("SLOWMF_OUT", "/tmp/from_env", 1);
    rc = make_run_config("paths", cfg, std::nullopt, std::nullopt);
    EXPECT_EQ(rc.seed, 11u);
    EXPECT_EQ(rc.out_dir, fs::path("/tmp/from_env"));
    rc = make_run_config("paths", cfg, 12, std::string("/tmp/from_flag"));
    EXPECT_EQ(rc.seed, 12u);
    EXPECT_EQ(rc.out_dir, fs::path("/tmp/from_flag"));
    ::setenv("SLOWMF_SEED", "eleven", 1);
    EXPECT_THROW(make_run_config("paths", cfg, std::nullopt, std::nullopt), ConfigError);
}

TEST_F(CliTest, UsageErrors) {
    const fs::path cfg = write("a.toml", "[paths]\nmu = [0.1]\n");
    EXPECT_EQ(run("paths", dir_ / "missing.toml", dir_ / "out"), ExitCode::usage);
    EXPECT_EQ(run("plot", cfg, dir_ / "out"), ExitCode::usage);
    const char* no_config[] = {"slowmf", "paths"};
    EXPECT_EQ(run_cli(2, no_config), ExitCode::usage);
    EXPECT_EQ(run("paths", write("empty.toml", "[paths]\nmu = []\n"), dir_ / "out"), ExitCode::usage);
    EXPECT_EQ(run("paths", write("bad.toml", "[paths\nmu = 1\n"), dir_ / "out"), ExitCode::usage);
}

TEST_F(CliTest, ExitCodeMapping) {
    EXPECT_EQ(exit_code_for(ConfigError("x")), ExitCode::usage);
    EXPECT_EQ(exit_code_for(ResolutionError("x", 1e-3)), ExitCode::usage);
    EXPECT_EQ(exit_code_for(AssumptionError("x")), ExitCode::assumption);
    EXPECT_EQ(exit_code_for(DivergenceError("x", 1.0)), ExitCode::divergence);
    EXPECT_EQ(exit_code_for(ConvergenceError("x", 0.5)), ExitCode::divergence);
    EXPECT_EQ(exit_code_for(std::runtime_error("x")), ExitCode::failure);
}

TEST_F(CliTest, PathsWritesOneFilePerSampleAndReplaysByteIdentically) {
    const fs::path cfg = write("p.toml", "seed = 5\n[paths]\nmu = [0.1]\nn_seeds = 3\nT = 1.0\n");
    ASSERT_EQ(run("paths", cfg, dir_ / "a"), ExitCode::ok);
    ASSERT_EQ(run("paths", cfg, dir_ / "b"), ExitCode::ok);
    for (int s = 5; s < 8; ++s) {
        const fs::path f = dir_ / "a" / ("paths_mu0.1_seed" + std::to_string(s) + ".csv");
        ASSERT_TRUE(fs::exists(f)) << f;
        const auto rows = read_csv(f);
        EXPECT_EQ(rows.front(), (std::vector<std::string>{"t", "B", "z", "phi", "phi_minus_B"}));
        EXPECT_EQ(rows.size(), 1002u);
    }
    const json manifest = json::parse(slurp(dir_ / "a" / "manifest.json"));
    EXPECT_EQ(manifest["files"].size(), 5u);  // run.json, 3 paths, summary
    for (const auto& entry : manifest["files"]) {
        const std::string name = entry["file"];
        EXPECT_NE(name, "timing.json");
        EXPECT_EQ(entry["sha256"], sha256_hex(slurp(dir_ / "a" / name)));
        EXPECT_EQ(slurp(dir_ / "a" / name), slurp(dir_ / "b" / name)) << name;
    }
    EXPECT_EQ(slurp(dir_ / "a" / "manifest.json"), slurp(dir_ / "b" / "manifest.json"));
    EXPECT_TRUE(fs::exists(dir_ / "a" / "timing.json"));
}

TEST_F(CliTest, SeedFlagChangesTheSample) {
    const fs::path cfg = write("p.toml", "[paths]\nmu = [0.1]\nn_seeds = 1\n");
    ASSERT_EQ(run("paths", cfg, dir_ / "a", {"--seed", "1"}), ExitCode::ok);
    ASSERT_EQ(run("paths", cfg, dir_ / "b", {"--seed", "2"}), ExitCode::ok);
    EXPECT_NE(slurp(dir_ / "a" / "paths_summary.csv"), slurp(dir_ / "b" / "paths_summary.csv"));
}

TEST_F(CliTest, ManifoldIdentityCaseIsZero) {
    const fs::path cfg = write("m.toml",
                               "[model]\nsigma = 0.0\n[manifold]\nxi = [0.0]\nmu = [0.1, 0.01]\n"
                               "evolution_times = [0.0, 0.2]\n");
    ASSERT_EQ(run("manifold", cfg, dir_ / "out"), ExitCode::ok);
    const auto rows = read_csv(dir_ / "out" / "manifold_graph.csv");
    ASSERT_EQ(rows.front(), (std::vector<std::string>{"eps", "mu", "seed", "t", "xi", "h"}));
    EXPECT_EQ(rows.size(), 1u + 3u * 2u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][5]), 0.0);
}

TEST_F(CliTest, ManifoldAssumptionFailureExitsWithThree) {
    const fs::path cfg = write("m.toml",
                               "[model]\nnonlinearity = \"linear\"\nA = [[-1.0]]\nB = [[0.0]]\n"
                               "gamma1 = 1.0\ngamma2 = 0.01\nK = 0.7\nrho = 0.5\n[manifold]\nxi = [1.0]\n");
    EXPECT_EQ(run("manifold", cfg, dir_ / "out"), ExitCode::assumption);
}

TEST_F(CliTest, ManifoldIterationCapExitsWithFour) {
    const fs::path cfg = write("m.toml", "[manifold]\nxi = [3.0]\nmu = [0.1]\nmax_iter = 1\ntol = 1e-14\n");
    EXPECT_EQ(run("manifold", cfg, dir_ / "out"), ExitCode::divergence);
}

TEST_F(CliTest, ConvergeNeedsThreeSweepPointsAndReportsSlopes) {
    EXPECT_EQ(run("converge", write("c2.toml", "[converge]\nmu = [0.1, 0.01]\n"), dir_ / "bad"), ExitCode::usage);
    const fs::path cfg = write("c.toml",
                               "[converge]\neps = [0.1]\nmu = [0.1, 0.01, 0.001]\nxi = [-2.0, 2.0]\n"
                               "n_seeds = 3\nsource = \"expansion\"\nnoise_rate_seeds = 5\n");
    ASSERT_EQ(run("converge", cfg, dir_ / "out"), ExitCode::ok);
    const auto fit = read_csv(dir_ / "out" / "converge_fit.csv");
    ASSERT_EQ(fit.size(), 2u);
    EXPECT_EQ(fit[0], (std::vector<std::string>{"eps", "slope", "slope_stderr"}));
    EXPECT_TRUE(std::isfinite(std::stod(fit[1][1])));
    EXPECT_TRUE(fs::exists(dir_ / "out" / "noise_rate_fit.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "out" / "converge_eps_uniformity.csv"));
}

TEST_F(CliTest, TrackOnManifoldStartGivesFlatFloor) {
    const fs::path cfg = write("t.toml", "[model]\nsigma = 0.0\n[track]\nmu = [0.01]\nT = 0.5\noffset = 0.0\n");
    ASSERT_EQ(run("track", cfg, dir_ / "out"), ExitCode::ok);
    const auto gap = read_csv(dir_ / "out" / "track_gap_mu0.01_seed1.csv");
    const auto summary = read_csv(dir_ / "out" / "track_summary.csv");
    const double floor = std::stod(summary[1][4]);
    for (std::size_t i = 1; i < gap.size(); ++i) EXPECT_LE(std::stod(gap[i][1]), 3.0 * floor + 1e-15);
}

TEST_F(CliTest, TrackRateAboveThreshold) {
    const fs::path cfg = write("t.toml", "[track]\nmu = [0.01]\nT = 0.5\n");
    ASSERT_EQ(run("track", cfg, dir_ / "out"), ExitCode::ok);
    const auto summary = read_csv(dir_ / "out" / "track_summary.csv");
    EXPECT_GE(std::stod(summary[1][2]), std::stod(summary[1][7]));
}

TEST_F(CliTest, EstimateWritesResultSchema) {
    const fs::path cfg = write("e.toml", "[estimate]\nT = 2.0\nvariants = [\"wz_reduced\", \"white_reduced\"]\n");
    ASSERT_EQ(run("estimate", cfg, dir_ / "a"), ExitCode::ok);
    ASSERT_EQ(run("estimate", cfg, dir_ / "b"), ExitCode::ok);
    for (const std::string v : {"wz_reduced", "white_reduced"}) {
        const json r = json::parse(slurp(dir_ / "a" / ("estimate_" + v + ".json")));
        for (const char* key : {"a_hat", "objective", "iterations", "evaluations", "converged", "trace"}) {
            EXPECT_TRUE(r.contains(key)) << v << " " << key;
        }
        EXPECT_GE(r["a_hat"].get<double>(), 0.01);
        EXPECT_LE(r["a_hat"].get<double>(), 1.0);
        EXPECT_EQ(r["trace"].size(), r["iterations"].get<std::size_t>() + 1);
    }
    const json timing = json::parse(slurp(dir_ / "a" / "timing.json"));
    EXPECT_TRUE(timing["wz_reduced"].contains("wall_seconds"));
    EXPECT_EQ(slurp(dir_ / "a" / "manifest.json"), slurp(dir_ / "b" / "manifest.json"));
}

TEST_F(CliTest, EstimateReadsObservationFile) {
    const fs::path cfg = write("e.toml", "[estimate]\nT = 1.0\nvariants = [\"wz_reduced\"]\n");
    ASSERT_EQ(run("estimate", cfg, dir_ / "syn"), ExitCode::ok);
    const fs::path obs = dir_ / "syn" / "observation.csv";
    const fs::path cfg2 = write("e2.toml", "[estimate]\nT = 1.0\nvariants = [\"wz_reduced\"]\nobservation = \"" +
                                               obs.string() + "\"\n");
    ASSERT_EQ(run("estimate", cfg2, dir_ / "file"), ExitCode::ok);
    const json a = json::parse(slurp(dir_ / "syn" / "estimate_wz_reduced.json"));
    const json b = json::parse(slurp(dir_ / "file" / "estimate_wz_reduced.json"));
    EXPECT_NEAR(a["a_hat"].get<double>(), b["a_hat"].get<double>(), 1e-12);
    const fs::path cfg3 = write("e3.toml", "[estimate]\nobservation = \"/nonexistent.csv\"\n");
    EXPECT_EQ(run("estimate", cfg3, dir_ / "none"), ExitCode::usage);
}

TEST_F(CliTest, DiagnoseZeroNoiseAndEqualScales) {
    const fs::path zero = write("d.toml", "[diagnose]\nmu = 1e-3\nnoise = \"zero\"\n");
    ASSERT_EQ(run("diagnose", zero, dir_ / "zero"), ExitCode::ok);
    const auto rows = read_csv(dir_ / "zero" / "nonuniformity.csv");
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][1]), 0.0);
    const fs::path equal = write("e.toml", "[diagnose]\nmu = 1e-2\neps = [1e-1, 1e-2, 1e-3]\nn_seeds = 5\n");
    ASSERT_EQ(run("diagnose", equal, dir_ / "equal"), ExitCode::ok);
    const json fit = json::parse(slurp(dir_ / "equal" / "nonuniformity_fit.json"));
    EXPECT_TRUE(std::isfinite(fit["slope"].get<double>()));
}

TEST(Output, NumbersRoundTrip) {
    for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) EXPECT_EQ(std::stod(format_number(x)), x);
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
