#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "glucam/core.hpp"

namespace glucam {

/// Peak-detection rule parameters. Separation is a time, so the sample
/// threshold scales with the sampling rate; prominence is relative to the
/// p95-p5 span, which makes detection invariant to amplitude scaling.
struct PeakConfig {
    double min_separation = 0.35;  // seconds between kept peaks
    double prominence_frac = 0.25;

    void validate() const {
        if (!(min_separation > 0.0)) fail(ErrorKind::param, "min_separation must be > 0");
        if (!(prominence_frac > 0.0 && prominence_frac <= 1.0))
            fail(ErrorKind::param, "prominence_frac must be in (0, 1]");
    }
};

/// One cardiac cycle between consecutive dominant peaks. `diastolic` is
/// absent when no secondary maximum exists after the systolic peak.
struct Cycle {
    std::size_t begin = 0;  // inclusive
    std::size_t end = 0;    // exclusive
    std::size_t systolic = 0;
    std::optional<std::size_t> diastolic;
};

struct PeakSet {
    std::vector<Cycle> cycles;

    std::vector<std::size_t> systolic_indices() const {
        std::vector<std::size_t> out;
        out.reserve(cycles.size());
        for (const Cycle& c : cycles) out.push_back(c.systolic);
        return out;
    }

    std::vector<std::size_t> diastolic_indices() const {
        std::vector<std::size_t> out;
        for (const Cycle& c : cycles)
            if (c.diastolic) out.push_back(*c.diastolic);
        return out;
    }

    std::size_t flagged_count() const {
        std::size_t n = 0;
        for (const Cycle& c : cycles) n += c.diastolic ? 0 : 1;
        return n;
    }
};

/// Fixed-length numeric features for one trial.
struct FeatureVector {
    std::vector<double> values;
    std::string schema_id;
    std::optional<double> glucose_ref;  // mg/dL
    std::optional<double> age;          // years
    std::optional<std::string> stomach_state;  // full | empty | partial
};

enum class SchemaKind { stats_v1, resample_v1 };

/// Versioned recipe turning a signal into a feature vector.
struct FeatureSchema {
    SchemaKind kind = SchemaKind::stats_v1;
    PeakConfig peak;
    std::size_t resample_length = 128;  // resample-v1 only

    std::string id() const { return kind == SchemaKind::stats_v1 ? "stats-v1" : "resample-v1"; }

    std::size_t length() const {
        return kind == SchemaKind::stats_v1 ? 16 : resample_length;
    }

    static FeatureSchema from_id(const std::string& id) {
        FeatureSchema s;
        if (id == "stats-v1") {
            s.kind = SchemaKind::stats_v1;
        } else if (id == "resample-v1") {
            s.kind = SchemaKind::resample_v1;
        } else {
            fail(ErrorKind::schema, "unknown feature schema: " + id);
        }
        return s;
    }
};

/// Two-point central difference, d(j) = (a(j+1) - a(j-1)) / 2, evaluated at
/// interior points only; output is 2 samples shorter.
inline PpgSignal central_difference(const PpgSignal& signal) {
    signal.validate();
    const std::size_t n = signal.samples.size();
    if (n < 3) fail(ErrorKind::insufficient_data, "central_difference needs at least 3 samples");

    PpgSignal out;
    out.fs = signal.fs;
    out.samples.resize(n - 2);
    for (std::size_t j = 1; j + 1 < n; ++j)
        out.samples[j - 1] = (signal.samples[j + 1] - signal.samples[j - 1]) / 2.0;
    out.stage = (signal.stage == Stage::derivative1 || signal.stage == Stage::derivative2)
                    ? Stage::derivative2
                    : Stage::derivative1;
    return out;
}

/// Central difference applied twice; output is 4 samples shorter.
inline PpgSignal second_derivative(const PpgSignal& signal) {
    if (signal.samples.size() < 5)
        fail(ErrorKind::insufficient_data, "second_derivative needs at least 5 samples");
    return central_difference(central_difference(signal));
}

namespace detail {

/// Strict local maxima; a flat run higher than both sides reports its
/// leftmost index.
inline std::vector<std::size_t> local_maxima(const std::vector<double>& x) {
    std::vector<std::size_t> out;
    const std::size_t n = x.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (x[i] > x[i - 1]) {
            std::size_t j = i;
            while (j + 1 < n && x[j + 1] == x[i]) ++j;
            if (j + 1 < n && x[j + 1] < x[i]) out.push_back(i);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

/// Topographic prominence: height above the higher of the two valley
/// minima, where each valley runs to the nearest strictly higher point
/// (or the signal edge).
inline double prominence(const std::vector<double>& x, std::size_t peak) {
    const double h = x[peak];
    double left_min = h;
    for (std::size_t i = peak; i-- > 0;) {
        if (x[i] > h) break;
        left_min = std::min(left_min, x[i]);
    }
    double right_min = h;
    for (std::size_t i = peak + 1; i < x.size(); ++i) {
        if (x[i] > h) break;
        right_min = std::min(right_min, x[i]);
    }
    return h - std::max(left_min, right_min);
}

}  // namespace detail

/// Local maxima filtered by prominence and a minimum spacing in time.
/// When two candidates are closer than min_separation the higher one wins
/// (ties go to the earlier index). Returned indices are ascending.
inline std::vector<std::size_t> detect_peaks(const PpgSignal& signal, double min_separation,
                                             double prominence_frac) {
    PeakConfig cfg{min_separation, prominence_frac};
    cfg.validate();
    signal.validate();

    const std::vector<double>& x = signal.samples;
    std::vector<std::size_t> candidates = detail::local_maxima(x);
    if (candidates.empty()) return {};

    const double span = quantile(x, 0.95) - quantile(x, 0.05);
    const double threshold = prominence_frac * span;
    std::vector<std::size_t> prominent;
    for (std::size_t idx : candidates)
        if (detail::prominence(x, idx) >= threshold) prominent.push_back(idx);

    std::sort(prominent.begin(), prominent.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] > x[b];
        return a < b;
    });

    const double min_gap = min_separation * signal.fs;
    std::vector<std::size_t> kept;
    for (std::size_t idx : prominent) {
        bool ok = true;
        for (std::size_t other : kept) {
            const double gap = idx > other ? static_cast<double>(idx - other)
                                           : static_cast<double>(other - idx);
            if (gap < min_gap) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

/// Splits the signal into cycles delimited by consecutive dominant peaks.
/// The in-cycle global maximum is labeled systolic; the tallest remaining
/// local maximum strictly after it is labeled diastolic.
inline PeakSet segment_and_classify(const PpgSignal& signal, const std::vector<std::size_t>& peaks) {
    signal.validate();
    PeakSet out;
    if (peaks.size() < 2) return out;
    for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
        if (peaks[i] >= peaks[i + 1]) fail(ErrorKind::order, "peak indices must be sorted");
        if (peaks[i + 1] >= signal.samples.size())
            fail(ErrorKind::range, "peak index beyond signal length");
    }

    const std::vector<double>& x = signal.samples;
    for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
        Cycle cycle;
        cycle.begin = peaks[i];
        cycle.end = peaks[i + 1];

        cycle.systolic = cycle.begin;
        for (std::size_t j = cycle.begin; j < cycle.end; ++j)
            if (x[j] > x[cycle.systolic]) cycle.systolic = j;

        std::optional<std::size_t> best;
        for (std::size_t j = cycle.systolic + 1; j < cycle.end; ++j) {
            if (j + 1 >= x.size()) break;
            bool is_max = false;
            if (x[j] > x[j - 1]) {
                if (x[j] > x[j + 1]) {
                    is_max = true;
                } else if (x[j] == x[j + 1]) {
                    // leftmost index of a plateau that later falls
                    std::size_t k = j;
                    while (k + 1 < x.size() && x[k + 1] == x[j]) ++k;
                    is_max = k + 1 < x.size() && x[k + 1] < x[j];
                }
            }
            if (is_max && (!best || x[j] > x[*best])) best = j;
        }
        cycle.diastolic = best;
        out.cycles.push_back(cycle);
    }
    return out;
}

/// Systolic-to-diastolic interval per cycle, seconds. Cycles without a
/// diastolic label are skipped.
inline std::vector<double> compute_delt(const PeakSet& peaks, double fs) {
    if (!(fs > 0.0)) fail(ErrorKind::range, "fs must be > 0");
    std::vector<double> out;
    for (const Cycle& c : peaks.cycles) {
        if (!c.diastolic) continue;
        out.push_back(static_cast<double>(*c.diastolic - c.systolic) / fs);
    }
    return out;
}

namespace detail {

inline std::vector<double> values_at(const std::vector<double>& x,
                                     const std::vector<std::size_t>& idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(x[i]);
    return out;
}

inline std::vector<double> spacings_seconds(const std::vector<std::size_t>& idx, double fs) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < idx.size(); ++i)
        out.push_back(static_cast<double>(idx[i + 1] - idx[i]) / fs);
    return out;
}

/// Peaks of a derivative trace: detected on |d| so negative lobes count,
/// amplitudes reported with their sign. Separation shrinks to a quarter of
/// the base rule because differentiation multiplies the peak count.
struct DerivativePeaks {
    std::vector<double> amplitudes;  // signed
    std::vector<double> spacings;    // seconds
};

inline DerivativePeaks derivative_peaks(const PpgSignal& derivative, const PeakConfig& peak) {
    PpgSignal rectified = derivative;
    for (double& v : rectified.samples) v = std::abs(v);
    const std::vector<std::size_t> idx =
        detect_peaks(rectified, peak.min_separation / 4.0, peak.prominence_frac);
    DerivativePeaks out;
    out.amplitudes = values_at(derivative.samples, idx);
    out.spacings = spacings_seconds(idx, derivative.fs);
    return out;
}

inline void push_mean_std(std::vector<double>& values, const std::vector<double>& xs) {
    values.push_back(mean(xs));
    values.push_back(sample_std(xs));
}

inline std::vector<double> resample_linear(const std::vector<double>& x, std::size_t length) {
    std::vector<double> out(length);
    const std::size_t n = x.size();
    for (std::size_t j = 0; j < length; ++j) {
        const double pos = length == 1 ? 0.0
                                       : static_cast<double>(j) * static_cast<double>(n - 1) /
                                             static_cast<double>(length - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, n - 1);
        const double frac = pos - static_cast<double>(lo);
        out[j] = x[lo] * (1.0 - frac) + x[hi] * frac;
    }
    return out;
}

}  // namespace detail

/// stats-v1 layout: mean and sample std of eight per-cycle quantities, in
/// this order: systolic amplitude, diastolic amplitude, DelT, cycle period,
/// first-derivative peak amplitude, first-derivative peak spacing,
/// second-derivative peak amplitude, second-derivative peak spacing.
inline FeatureVector assemble_features(const PpgSignal& signal, const FeatureSchema& schema) {
    signal.validate();
    schema.peak.validate();

    FeatureVector out;
    out.schema_id = schema.id();

    if (schema.kind == SchemaKind::resample_v1) {
        if (schema.resample_length < 2) fail(ErrorKind::schema, "resample length must be >= 2");
        out.values = detail::resample_linear(signal.samples, schema.resample_length);
        return out;
    }

    const std::vector<std::size_t> peaks =
        detect_peaks(signal, schema.peak.min_separation, schema.peak.prominence_frac);
    const PeakSet set = segment_and_classify(signal, peaks);
    if (set.cycles.size() < 3)
        fail(ErrorKind::insufficient_cycles,
             "need at least 3 complete cycles, found " + std::to_string(set.cycles.size()) +
                 " (detected peaks: " + std::to_string(peaks.size()) + ")");

    const std::vector<double>& x = signal.samples;
    std::vector<double> sys_amp, dia_amp, periods;
    for (const Cycle& c : set.cycles) {
        sys_amp.push_back(x[c.systolic]);
        if (c.diastolic) dia_amp.push_back(x[*c.diastolic]);
        periods.push_back(static_cast<double>(c.end - c.begin) / signal.fs);
    }
    const std::vector<double> delt = compute_delt(set, signal.fs);

    const PpgSignal d1 = central_difference(signal);
    const PpgSignal d2 = central_difference(d1);
    const detail::DerivativePeaks p1 = detail::derivative_peaks(d1, schema.peak);
    const detail::DerivativePeaks p2 = detail::derivative_peaks(d2, schema.peak);

    out.values.reserve(16);
    detail::push_mean_std(out.values, sys_amp);
    detail::push_mean_std(out.values, dia_amp);
    detail::push_mean_std(out.values, delt);
    detail::push_mean_std(out.values, periods);
    detail::push_mean_std(out.values, p1.amplitudes);
    detail::push_mean_std(out.values, p1.spacings);
    detail::push_mean_std(out.values, p2.amplitudes);
    detail::push_mean_std(out.values, p2.spacings);
    return out;
}

}  // namespace glucam
