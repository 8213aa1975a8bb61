#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "glucam/config.hpp"
#include "glucam/io.hpp"
#include "glucam/rng.hpp"

using namespace glucam;
namespace fs = std::filesystem;

TEST_CASE("format_float uses 12 significant digits") {
    CHECK(format_float(1.0) == "1");
    CHECK(format_float(0.5) == "0.5");
    CHECK(format_float(1.0 / 3.0) == "0.333333333333");
    CHECK(format_float(-2.5e-7) == "-2.5e-07");
}

TEST_CASE("frame stats round trip") {
    FrameStatsSeries series;
    series.fps = 30.0;
    series.channel_max = 255.0;
    Rng rng(1);
    for (int i = 0; i < 20; ++i)
        series.frames.push_back({i, rng.uniform(0, 255), rng.uniform(0, 255), rng.uniform(0, 255)});

    std::ostringstream out;
    write_frame_stats(out, series);
    std::istringstream in(out.str());
    const FrameStatsSeries back = parse_frame_stats(in);

    REQUIRE(back.frames.size() == series.frames.size());
    CHECK(back.fps == series.fps);
    for (std::size_t i = 0; i < series.frames.size(); ++i) {
        CHECK(back.frames[i].index == series.frames[i].index);
        CHECK(back.frames[i].red == Catch::Approx(series.frames[i].red).epsilon(1e-11));
    }
}

TEST_CASE("signal CSV round trip carries fs and stage") {
    PpgSignal signal;
    signal.fs = 29.97;
    signal.stage = Stage::preprocessed;
    Rng rng(2);
    for (int i = 0; i < 50; ++i) signal.samples.push_back(rng.normal(0.0, 2.0));

    std::ostringstream out;
    write_signal_csv(out, signal, {{"channel", "red"}});
    std::istringstream in(out.str());
    const PpgSignal back = parse_signal_csv(in);

    CHECK(back.fs == Catch::Approx(signal.fs).epsilon(1e-11));
    CHECK(back.stage == Stage::preprocessed);
    REQUIRE(back.samples.size() == signal.samples.size());
    for (std::size_t i = 0; i < signal.samples.size(); ++i)
        CHECK(back.samples[i] == Catch::Approx(signal.samples[i]).epsilon(1e-11));
}

TEST_CASE("feature CSV round trip with optional fields") {
    FeatureTable table;
    table.schema_id = "stats-v1";
    FeatureTable::Row a;
    a.trial_id = "t0000";
    a.features.values = {1.5, -2.25, 3.0};
    a.features.glucose_ref = 123.5;
    a.features.age = 41.0;
    a.features.stomach_state = "partial";
    FeatureTable::Row b;
    b.trial_id = "t0001";
    b.features.values = {0.25, 4.0, -1.0};
    table.rows = {a, b};

    std::ostringstream out;
    write_feature_csv(out, table);
    std::istringstream in(out.str());
    const FeatureTable back = parse_feature_csv(in);

    CHECK(back.schema_id == "stats-v1");
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0].features.values == a.features.values);
    CHECK(back.rows[0].features.glucose_ref == 123.5);
    CHECK(back.rows[0].features.age == 41.0);
    CHECK(back.rows[0].features.stomach_state == "partial");
    CHECK_FALSE(back.rows[1].features.glucose_ref.has_value());
    CHECK_FALSE(back.rows[1].features.age.has_value());
    CHECK_FALSE(back.rows[1].features.stomach_state.has_value());
}

TEST_CASE("feature table to dataset requires glucose everywhere") {
    FeatureTable table;
    table.schema_id = "stats-v1";
    FeatureTable::Row row;
    row.trial_id = "t0000";
    row.features.values = {1.0, 2.0};
    table.rows = {row, row};
    table.rows[1].trial_id = "t0001";
    CHECK_THROWS_AS(feature_table_to_dataset(table), Error);

    table.rows[0].features.glucose_ref = 100;
    table.rows[1].features.glucose_ref = 140;
    const Dataset ds = feature_table_to_dataset(table);
    CHECK(ds.n() == 2);
    CHECK(ds.p() == 2);
    CHECK(ds.y(1) == 140);
    CHECK(ds.schema_id == "stats-v1");
}

TEST_CASE("predictions CSV round trip") {
    std::vector<PredictionRow> rows{{"t0000", 120.0, 118.5}, {"t0001", std::nullopt, 99.0}};
    std::ostringstream out;
    write_predictions_csv(out, rows);
    std::istringstream in(out.str());
    const auto back = parse_predictions_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].reference == 120.0);
    CHECK(back[1].reference == std::nullopt);
    CHECK(back[1].predicted == 99.0);
}

TEST_CASE("sweep CSV round trip") {
    std::vector<SweepPoint> points{{1, 25.0, 26.0}, {2, 20.5, 21.0}};
    std::ostringstream out;
    write_sweep_csv(out, points);
    CHECK(out.str().rfind("k,sep,rmsep\n", 0) == 0);
    std::istringstream in(out.str());
    const auto back = parse_sweep_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[1].k == 2);
    CHECK(back[1].sep == 20.5);
}

TEST_CASE("labels CSV parses optional metadata") {
    std::istringstream in(
        "trial_id,glucose_ref,age,stomach_state\n"
        "t0000,132.5,48,full\n"
        "t0001,97,,\n");
    const auto labels = parse_labels_csv(in);
    REQUIRE(labels.size() == 2);
    CHECK(labels.at("t0000").glucose_ref == 132.5);
    CHECK(labels.at("t0000").age == 48.0);
    CHECK(labels.at("t0000").stomach_state == "full");
    CHECK_FALSE(labels.at("t0001").age.has_value());
}

TEST_CASE("model JSON round trip reproduces predictions exactly") {
    Rng rng(3);
    Dataset ds;
    ds.X.resize(20, 4);
    ds.y.resize(20);
    for (Eigen::Index i = 0; i < 20; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) ds.X(i, j) = rng.uniform(-2, 2);
        ds.y(i) = rng.uniform(70, 180);
        ds.trial_ids.push_back("t" + std::to_string(i));
    }
    ds.schema_id = "stats-v1";

    const PcrModel model = pcr_train(ds, 3);
    const PcrModel back = model_from_json(model_to_json(model));

    CHECK(back.schema_id == model.schema_id);
    CHECK(back.k == model.k);
    CHECK(back.mu == model.mu);
    CHECK(back.sigma == model.sigma);
    CHECK(back.loadings == model.loadings);
    CHECK(back.beta_pc == model.beta_pc);
    CHECK(back.intercept == model.intercept);

    const Eigen::VectorXd a = pcr_predict(model, ds.X);
    const Eigen::VectorXd b = pcr_predict(back, ds.X);
    CHECK(a == b);
}

TEST_CASE("model JSON rejects inconsistent arrays") {
    nlohmann::json j = model_to_json(PcrModel{
        Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3), Eigen::MatrixXd::Identity(3, 2),
        Eigen::VectorXd::Ones(2), 100.0, 2, "stats-v1"});
    j["sigma"] = std::vector<double>{1.0};
    CHECK_THROWS_AS(model_from_json(j), Error);
    nlohmann::json missing = j;
    missing.erase("mu");
    CHECK_THROWS_AS(model_from_json(missing), Error);
}

TEST_CASE("pipeline config JSON honors defaults and overrides") {
    const PipelineConfig defaults = config_from_json(nlohmann::json::object());
    CHECK(defaults.als.lambda == 1e6);
    CHECK(defaults.gauss.c == 0.068);
    CHECK(defaults.gauss.w == 0.0543);
    CHECK(defaults.k == 7);
    CHECK(defaults.split.train_frac == 0.75);
    CHECK(defaults.schema_id == "stats-v1");

    const nlohmann::json partial = {{"als", {{"lambda", 1e5}}}, {"k", 4}};
    const PipelineConfig cfg = config_from_json(partial);
    CHECK(cfg.als.lambda == 1e5);
    CHECK(cfg.als.p == 0.01);
    CHECK(cfg.k == 4);

    const PipelineConfig round = config_from_json(config_to_json(cfg));
    CHECK(round.als.lambda == cfg.als.lambda);
    CHECK(round.peak.min_separation == cfg.peak.min_separation);

    try {
        config_from_json({{"als", {{"p", 1.5}}}});
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
    }
}

TEST_CASE("atomic_write_file leaves no temp file behind") {
    const fs::path dir = fs::temp_directory_path() / "glucam_io_test";
    fs::create_directories(dir);
    const fs::path target = dir / "artifact.txt";
    atomic_write_file(target, "payload\n");
    CHECK(read_file(target) == "payload\n");
    CHECK_FALSE(fs::exists(target.string() + ".tmp"));
    fs::remove_all(dir);
}

TEST_CASE("evaluation report JSON has the declared fields") {
    EvaluationReport report;
    report.sep = 12.5;
    report.rmsep = 13.0;
    report.zone_percentages = {82.6, 17.4, 0.0, 0.0, 0.0};
    report.clinically_acceptable_fraction = 0.95;
    report.n = 23;
    const nlohmann::json j = report_to_json(report);
    CHECK(j.at("sep") == 12.5);
    CHECK(j.at("zone_percentages").at("A") == 82.6);
    CHECK(j.at("zone_percentages").at("E") == 0.0);
    CHECK(j.at("clinically_acceptable_fraction") == 0.95);
    CHECK(j.at("n") == 23);
}
