#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "glucam/core.hpp"
#include "glucam/features.hpp"
#include "glucam/preprocess.hpp"
#include "glucam/regression.hpp"

namespace glucam {

/// Split parameters shared by train and sweep.
struct SplitConfig {
    double train_frac = 0.75;
    std::uint64_t seed = 1;
    SplitBy by = SplitBy::trial;

    void validate() const {
        if (!(train_frac > 0.0 && train_frac < 1.0))
            fail(ErrorKind::config, "split.train_frac must be in (0, 1)");
    }
};

/// Aggregated stage parameters, loadable from a JSON config file. Every
/// field has a default; file entries and command-line flags override it.
struct PipelineConfig {
    AlsConfig als;
    GaussianConfig gauss;
    PeakConfig peak;
    std::string schema_id = "stats-v1";
    int k = 7;
    SplitConfig split;

    void validate() const {
        als.validate();
        gauss.validate();
        try {
            peak.validate();
        } catch (const Error& e) {
            fail(ErrorKind::config, e.what());
        }
        if (k < 1) fail(ErrorKind::config, "k must be >= 1");
        FeatureSchema::from_id(schema_id);
        split.validate();
    }

    FeatureSchema schema() const {
        FeatureSchema s = FeatureSchema::from_id(schema_id);
        s.peak = peak;
        return s;
    }
};

namespace detail {

template <typename T>
void maybe_get(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    try {
        if (j.contains("als")) {
            const auto& a = j.at("als");
            detail::maybe_get(a, "lambda", cfg.als.lambda);
            detail::maybe_get(a, "p", cfg.als.p);
            detail::maybe_get(a, "max_iters", cfg.als.max_iters);
            detail::maybe_get(a, "tol", cfg.als.tol);
        }
        if (j.contains("gauss")) {
            const auto& g = j.at("gauss");
            detail::maybe_get(g, "c", cfg.gauss.c);
            detail::maybe_get(g, "w", cfg.gauss.w);
        }
        if (j.contains("peak")) {
            const auto& p = j.at("peak");
            detail::maybe_get(p, "min_separation", cfg.peak.min_separation);
            detail::maybe_get(p, "prominence_frac", cfg.peak.prominence_frac);
        }
        detail::maybe_get(j, "schema_id", cfg.schema_id);
        detail::maybe_get(j, "k", cfg.k);
        if (j.contains("split")) {
            const auto& s = j.at("split");
            detail::maybe_get(s, "train_frac", cfg.split.train_frac);
            detail::maybe_get(s, "seed", cfg.split.seed);
            std::string by = split_by_name(cfg.split.by);
            detail::maybe_get(s, "by", by);
            cfg.split.by = split_by_from_name(by);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, std::string("malformed config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline nlohmann::json config_to_json(const PipelineConfig& cfg) {
    return {
        {"als",
         {{"lambda", cfg.als.lambda},
          {"p", cfg.als.p},
          {"max_iters", cfg.als.max_iters},
          {"tol", cfg.als.tol}}},
        {"gauss", {{"c", cfg.gauss.c}, {"w", cfg.gauss.w}}},
        {"peak",
         {{"min_separation", cfg.peak.min_separation},
          {"prominence_frac", cfg.peak.prominence_frac}}},
        {"schema_id", cfg.schema_id},
        {"k", cfg.k},
        {"split",
         {{"train_frac", cfg.split.train_frac},
          {"seed", cfg.split.seed},
          {"by", split_by_name(cfg.split.by)}}},
    };
}

}  // namespace glucam
