#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "glucam/io.hpp"

using namespace glucam;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GLUCAM_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("glucam_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string str(const std::string& sub = "") const { return (path / sub).string(); }
};

}  // namespace

TEST_CASE("full chain: synth through evaluate and sweep") {
    TempDir dir;
    REQUIRE(run_cli("--seed 11 --out-dir " + dir.str("data") +
                    " synth --n 24 --glucose-noise 2 --duration 15") == 0);
    REQUIRE(fs::exists(dir.path / "data/manifest.json"));
    REQUIRE(fs::exists(dir.path / "data/trials/t0000.csv"));
    REQUIRE(fs::exists(dir.path / "data/trials/t0023.csv"));

    REQUIRE(run_cli("extract --in-dir " + dir.str("data/trials") + " --out-dir " +
                    dir.str("signals")) == 0);
    REQUIRE(run_cli("preprocess --in-dir " + dir.str("signals") + " --out-dir " +
                    dir.str("clean")) == 0);
    REQUIRE(run_cli("features --in-dir " + dir.str("clean") + " --labels " +
                    dir.str("data/manifest.json") + " --out " + dir.str("features.csv")) == 0);
    REQUIRE(run_cli("--seed 3 train --features " + dir.str("features.csv") + " --k 4 --model " +
                    dir.str("model.json") + " --split-out " + dir.str("split.json")) == 0);
    REQUIRE(run_cli("predict --features " + dir.str("features.csv") + " --model " +
                    dir.str("model.json") + " --split " + dir.str("split.json") +
                    " --subset test --out " + dir.str("pred.csv")) == 0);
    REQUIRE(run_cli("--seed 3 sweep --features " + dir.str("features.csv") + " --k-max 5 --out " +
                    dir.str("sweep.csv")) == 0);
    REQUIRE(run_cli("--out-dir " + dir.str("eval") + " evaluate --pred " + dir.str("pred.csv") +
                    " --sweep " + dir.str("sweep.csv")) == 0);

    for (const char* artifact : {"eval/report.json", "eval/clarke_scatter.csv",
                                 "eval/clarke_boundaries.csv", "eval/clarke.svg", "eval/sweep.svg"})
        CHECK(fs::exists(dir.path / artifact));

    const auto report = nlohmann::json::parse(read_file(dir.path / "eval/report.json"));
    CHECK(report.at("n").get<int>() == 6);  // 24 trials, quarter held out
    CHECK(report.at("sep").get<double>() >= 0.0);
    CHECK(report.at("zone_percentages").contains("A"));

    // signal CSV rows equal frame count
    std::istringstream frames_in(read_file(dir.path / "data/trials/t0000.csv"));
    const FrameStatsSeries series = parse_frame_stats(frames_in);
    std::istringstream signal_in(read_file(dir.path / "signals/t0000.csv"));
    const PpgSignal signal = parse_signal_csv(signal_in);
    CHECK(signal.samples.size() == series.frames.size());
}

TEST_CASE("missing input file exits 2") {
    TempDir dir;
    CHECK(run_cli("extract --in " + dir.str("absent.csv") + " --out " + dir.str("out.csv")) == 2);
}

TEST_CASE("parse failure exits 2 and leaves no partial output") {
    TempDir dir;
    std::ofstream bad(dir.str("bad.csv"));
    bad << "#fps=30,channel_max=255\n0,300,80,60\n";  // exceeds channel_max
    bad.close();
    CHECK(run_cli("extract --in " + dir.str("bad.csv") + " --out " + dir.str("out.csv")) == 2);
    CHECK_FALSE(fs::exists(dir.path / "out.csv"));
    CHECK_FALSE(fs::exists(dir.path / "out.csv.tmp"));
}

TEST_CASE("green channel extraction is flagged noisy in the header") {
    TempDir dir;
    {
        std::ofstream in(dir.str("frames.csv"));
        in << "#fps=30,channel_max=255\n";
        for (int i = 0; i < 10; ++i)
            in << i << ',' << 120 + (i % 3) << ',' << 80 + (i % 2) << ",60\n";
    }
    REQUIRE(run_cli("extract --channel green --in " + dir.str("frames.csv") + " --out " +
                    dir.str("green.csv")) == 0);
    const std::string text = read_file(dir.path / "green.csv");
    CHECK(text.find("channel=green") != std::string::npos);
    CHECK(text.find("noisy=1") != std::string::npos);
}

TEST_CASE("train with k beyond rank exits 3") {
    TempDir dir;
    {
        std::ofstream f(dir.str("features.csv"));
        f << "#schema_id=stats-v1\n";
        for (int i = 0; i < 6; ++i)
            f << "t" << i << ',' << 100 + i << ',' << i << ',' << 2 * i + 1 << ',' << i * i
              << ",,\n";
    }
    CHECK(run_cli("train --features " + dir.str("features.csv") + " --k 5 --no-split --model " +
                  dir.str("model.json")) == 3);
    CHECK_FALSE(fs::exists(dir.path / "model.json"));
}

TEST_CASE("invalid config exits 4") {
    TempDir dir;
    {
        std::ofstream cfg(dir.str("config.json"));
        cfg << "{\"als\": {\"p\": 1.5}}\n";
    }
    {
        std::ofstream sig(dir.str("signal.csv"));
        sig << "#fs=30,stage=raw\n";
        for (int i = 0; i < 16; ++i) sig << i << ',' << (i % 4) << "\n";
    }
    CHECK(run_cli("--config " + dir.str("config.json") + " preprocess --in " +
                  dir.str("signal.csv") + " --out " + dir.str("clean.csv")) == 4);
    CHECK(run_cli("--config " + dir.str("config.json") + " nonsense") == 4);
}

TEST_CASE("evaluate on perfect predictions reports zero SEP and pure zone A") {
    TempDir dir;
    {
        std::ofstream pred(dir.str("pred.csv"));
        pred << "trial_id,reference,predicted\n";
        for (int i = 0; i < 10; ++i)
            pred << 't' << i << ',' << 90 + 5 * i << ',' << 90 + 5 * i << "\n";
    }
    REQUIRE(run_cli("--out-dir " + dir.str("eval") + " evaluate --pred " + dir.str("pred.csv")) ==
            0);
    const auto report = nlohmann::json::parse(read_file(dir.path / "eval/report.json"));
    CHECK(report.at("sep").get<double>() == 0.0);
    CHECK(report.at("rmsep").get<double>() == 0.0);
    CHECK(report.at("zone_percentages").at("A").get<double>() == 100.0);
    CHECK(report.at("clinically_acceptable_fraction").get<double>() == 1.0);
}

TEST_CASE("schema mismatch between features and model exits 2") {
    TempDir dir;
    {
        std::ofstream f(dir.str("features.csv"));
        f << "#schema_id=stats-v1\n";
        for (int i = 0; i < 8; ++i)
            f << "t" << i << ',' << 100 + 3 * i << ',' << i << ',' << i % 3 << ",,\n";
    }
    REQUIRE(run_cli("train --features " + dir.str("features.csv") +
                    " --k 2 --no-split --model " + dir.str("model.json")) == 0);

    {
        std::ofstream f(dir.str("other.csv"));
        f << "#schema_id=resample-v1\n";
        for (int i = 0; i < 8; ++i)
            f << "t" << i << ',' << 100 + 3 * i << ',' << i << ',' << i % 3 << ",,\n";
    }
    CHECK(run_cli("predict --features " + dir.str("other.csv") + " --model " +
                  dir.str("model.json") + " --out " + dir.str("pred.csv")) == 2);
}
