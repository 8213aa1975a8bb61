#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace glucam {

// Failure classes; the CLI maps these onto exit codes
// (input data -> 2, numeric -> 3, configuration -> 4).
enum class ErrorKind {
    parse,
    order,
    range,
    insufficient_data,
    insufficient_cycles,
    shape,
    schema,
    split,
    domain,
    io,
    rank,
    scale,
    config,
    param,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

/// Processing stage a waveform has reached.
enum class Stage {
    raw,
    als_corrected,
    gaussian_filtered,
    preprocessed,
    derivative1,
    derivative2,
};

inline const char* stage_name(Stage s) {
    switch (s) {
        case Stage::raw: return "raw";
        case Stage::als_corrected: return "als_corrected";
        case Stage::gaussian_filtered: return "gaussian_filtered";
        case Stage::preprocessed: return "preprocessed";
        case Stage::derivative1: return "derivative1";
        case Stage::derivative2: return "derivative2";
    }
    return "raw";
}

inline Stage stage_from_name(const std::string& name) {
    for (Stage s : {Stage::raw, Stage::als_corrected, Stage::gaussian_filtered,
                    Stage::preprocessed, Stage::derivative1, Stage::derivative2}) {
        if (name == stage_name(s)) return s;
    }
    fail(ErrorKind::parse, "unknown stage name: " + name);
}

/// Uniformly sampled waveform in arbitrary intensity units.
struct PpgSignal {
    std::vector<double> samples;
    double fs = 0.0;  // sampling rate, Hz
    Stage stage = Stage::raw;

    std::size_t size() const noexcept { return samples.size(); }

    void validate() const {
        if (!(fs > 0.0)) fail(ErrorKind::range, "signal sampling rate must be > 0");
        if (samples.size() < 2) fail(ErrorKind::insufficient_data, "signal shorter than 2 samples");
        for (double v : samples) {
            if (!std::isfinite(v)) fail(ErrorKind::range, "signal contains a non-finite sample");
        }
    }
};

// --- small numeric helpers shared across modules ---

inline bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Sample standard deviation (n-1 denominator); 0 for fewer than 2 values.
inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Linear-interpolation quantile, q in [0,1]. Input need not be sorted.
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) fail(ErrorKind::domain, "quantile of empty vector");
    q = std::clamp(q, 0.0, 1.0);
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        fail(ErrorKind::shape, "pearson requires two equal-length vectors of size >= 2");
    const double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace glucam
