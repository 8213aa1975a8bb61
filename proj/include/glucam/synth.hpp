#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "glucam/core.hpp"
#include "glucam/rng.hpp"

namespace glucam {

/// Baseline wander added to the clean pulse template: a linear trend plus
/// a slow sinusoid.
struct DriftSpec {
    double slope = 0.0;    // a.u. per second
    double sin_amp = 0.0;  // a.u.
    double sin_freq = 0.0; // Hz
};

/// Parameters of one synthetic trial. The pulse template is a pair of
/// Gaussians per cycle, which makes systolic and diastolic ground truth
/// exact by construction.
struct SynthParams {
    double heart_rate = 60.0;     // bpm
    double systolic_amp = 1.0;    // a.u.
    double diastolic_amp = 0.5;   // a.u.
    double diastolic_lag = 0.3;   // seconds after the systolic peak
    double pulse_width = 0.05;    // Gaussian sigma, seconds
    DriftSpec drift;
    double noise_sigma = 0.0;     // a.u.
    double duration = 30.0;       // seconds
    double fs = 30.0;             // Hz
    std::uint64_t seed = 1;

    double period() const { return 60.0 / heart_rate; }

    void validate() const {
        if (!(heart_rate >= 30.0 && heart_rate <= 220.0))
            fail(ErrorKind::param, "heart_rate must be in [30, 220] bpm");
        if (systolic_amp < 0.0 || diastolic_amp < 0.0)
            fail(ErrorKind::param, "pulse amplitudes must be >= 0");
        if (!(diastolic_lag >= 0.0 && diastolic_lag < period()))
            fail(ErrorKind::param, "diastolic_lag must be in [0, cycle period)");
        if (!(pulse_width > 0.0)) fail(ErrorKind::param, "pulse_width must be > 0");
        if (!(noise_sigma >= 0.0)) fail(ErrorKind::param, "noise_sigma must be >= 0");
        if (!(duration > 0.0)) fail(ErrorKind::param, "duration must be > 0");
        // at least four samples per pulse harmonic band
        if (!(fs >= 2.0 * (heart_rate / 60.0) * 4.0))
            fail(ErrorKind::param, "fs too low for the requested heart rate");
    }
};

struct GroundTruth {
    std::vector<double> systolic_times;   // seconds
    std::vector<double> diastolic_times;  // seconds
    std::vector<double> template_samples; // clean pulse train, no drift/noise
};

struct SynthTrial {
    PpgSignal signal;
    GroundTruth ground_truth;
    std::optional<double> glucose_ref;  // mg/dL, set by dataset generation
    SynthParams params;
    std::string id;
};

namespace detail {

// Systolic peaks sit at this fraction of the period past the cycle start,
// so the first pulse does not straddle t = 0.
inline constexpr double kRiseFraction = 0.2;

inline double gaussian_pulse(double t, double center, double sigma) {
    const double d = t - center;
    return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

}  // namespace detail

/// Renders the clean template, adds drift and seeded white noise, and
/// reports exact pulse event times. Output is a raw-stage signal.
inline SynthTrial synth_ppg(const SynthParams& params) {
    params.validate();

    const double period = params.period();
    const double rise = detail::kRiseFraction * period;
    const std::size_t n = static_cast<std::size_t>(std::llround(params.duration * params.fs));
    if (n < 2) fail(ErrorKind::param, "duration * fs must give at least 2 samples");

    SynthTrial trial;
    trial.params = params;

    std::vector<double>& tmpl = trial.ground_truth.template_samples;
    tmpl.assign(n, 0.0);
    for (std::size_t c = 0;; ++c) {
        const double cycle_start = static_cast<double>(c) * period;
        if (cycle_start >= params.duration) break;
        const double sys_t = cycle_start + rise;
        const double dia_t = sys_t + params.diastolic_lag;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / params.fs;
            tmpl[i] += params.systolic_amp * detail::gaussian_pulse(t, sys_t, params.pulse_width) +
                       params.diastolic_amp * detail::gaussian_pulse(t, dia_t, params.pulse_width);
        }
        if (sys_t < params.duration) trial.ground_truth.systolic_times.push_back(sys_t);
        if (dia_t < params.duration) trial.ground_truth.diastolic_times.push_back(dia_t);
    }

    Rng rng(params.seed);
    trial.signal.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / params.fs;
        const double drift = params.drift.slope * t +
                             params.drift.sin_amp *
                                 std::sin(2.0 * std::numbers::pi * params.drift.sin_freq * t);
        const double noise = params.noise_sigma > 0.0 ? rng.normal(0.0, params.noise_sigma) : 0.0;
        trial.signal.samples[i] = tmpl[i] + drift + noise;
    }
    trial.signal.fs = params.fs;
    trial.signal.stage = Stage::raw;
    return trial;
}

/// Affine map from pulse-shape parameters to a synthetic reference glucose.
/// Purely a test harness; it gives the regression something recoverable.
struct GlucoseMap {
    double intercept = 40.0;        // mg/dL
    double lag_coeff = 60.0;        // mg/dL per second of diastolic lag
    double ratio_coeff = 40.0;      // mg/dL per unit diastolic/systolic ratio
    double heart_rate_coeff = 1.2;  // mg/dL per bpm
    double noise_sigma = 0.0;       // mg/dL

    double clean_value(const SynthParams& p) const {
        const double ratio = p.systolic_amp > 0.0 ? p.diastolic_amp / p.systolic_amp : 0.0;
        return intercept + lag_coeff * p.diastolic_lag + ratio_coeff * ratio +
               heart_rate_coeff * p.heart_rate;
    }
};

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// Sampling ranges for dataset trials. Defaults give pronounced drift and
/// noise so raw signals genuinely need the preprocessing stages. Drift
/// sinusoids stay below ~0.05 Hz, the band the baseline correction can
/// follow at these settings.
struct DatasetProfile {
    ParamRange heart_rate{50.0, 90.0};
    ParamRange systolic_amp{0.8, 1.2};
    ParamRange diastolic_ratio{0.35, 0.7};
    ParamRange diastolic_lag{0.2, 0.35};
    ParamRange pulse_width{0.045, 0.065};
    ParamRange drift_slope{-0.3, 0.3};
    ParamRange drift_sin_amp{0.8, 2.0};
    ParamRange drift_sin_freq{0.02, 0.05};
    ParamRange noise_sigma{0.03, 0.1};
    double duration = 20.0;  // seconds
    double fs = 30.0;        // Hz
};

struct SynthDataset {
    std::vector<SynthTrial> trials;
    std::uint64_t seed = 0;
    GlucoseMap glucose_map;
    DatasetProfile profile;
};

namespace detail {

inline double draw(Rng& rng, const ParamRange& r) { return rng.uniform(r.lo, r.hi); }

}  // namespace detail

/// Generates n trials with parameters drawn from the profile ranges and
/// glucose references from the affine map. Per-trial seeds derive from the
/// dataset seed by the declared integer hash, so trials are reproducible
/// independently of generation order.
inline SynthDataset synth_dataset(std::size_t n, const GlucoseMap& map, std::uint64_t seed,
                                  const DatasetProfile& profile = {}) {
    if (n < 4) fail(ErrorKind::param, "synth_dataset needs n >= 4");

    SynthDataset ds;
    ds.seed = seed;
    ds.glucose_map = map;
    ds.profile = profile;
    ds.trials.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t trial_seed = mix_seed(seed, i);
        Rng draw_rng(mix_seed(trial_seed, 0));

        SynthParams p;
        p.heart_rate = detail::draw(draw_rng, profile.heart_rate);
        p.systolic_amp = detail::draw(draw_rng, profile.systolic_amp);
        p.diastolic_amp = p.systolic_amp * detail::draw(draw_rng, profile.diastolic_ratio);
        p.diastolic_lag = detail::draw(draw_rng, profile.diastolic_lag);
        p.pulse_width = detail::draw(draw_rng, profile.pulse_width);
        p.drift.slope = detail::draw(draw_rng, profile.drift_slope);
        p.drift.sin_amp = detail::draw(draw_rng, profile.drift_sin_amp);
        p.drift.sin_freq = detail::draw(draw_rng, profile.drift_sin_freq);
        p.noise_sigma = detail::draw(draw_rng, profile.noise_sigma);
        p.duration = profile.duration;
        p.fs = profile.fs;
        p.seed = mix_seed(trial_seed, 1);

        SynthTrial trial = synth_ppg(p);
        Rng glucose_rng(mix_seed(trial_seed, 2));
        double glucose = map.clean_value(p);
        if (map.noise_sigma > 0.0) glucose += glucose_rng.normal(0.0, map.noise_sigma);
        trial.glucose_ref = glucose;

        char id[32];
        std::snprintf(id, sizeof(id), "t%04zu", i);
        trial.id = id;
        ds.trials.push_back(std::move(trial));
    }
    return ds;
}

}  // namespace glucam
