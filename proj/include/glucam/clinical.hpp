#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "glucam/core.hpp"

namespace glucam {

enum class ClarkeZone { A, B, C, D, E };

inline char zone_letter(ClarkeZone z) {
    switch (z) {
        case ClarkeZone::A: return 'A';
        case ClarkeZone::B: return 'B';
        case ClarkeZone::C: return 'C';
        case ClarkeZone::D: return 'D';
        case ClarkeZone::E: return 'E';
    }
    return '?';
}

namespace detail {

inline void check_glucose_range(double value, const char* what) {
    if (!std::isfinite(value) || value < 0.0 || value > 600.0)
        fail(ErrorKind::range, std::string(what) + " must lie in [0, 600] mg/dL");
}

}  // namespace detail

/// Error-grid zone of a (reference, predicted) pair.
///
/// Regions follow the 1987 grid. Points exactly on a boundary go to the
/// more benign zone (A over B over C over D over E), which fixes the
/// strictness of each inequality below:
///   - A keeps every edge it touches, except the ref = 70 side of the
///     low-glucose square, which stays strict so that Zone A at
///     ref >= 70 always means agreement within 20%.
///   - Edges shared with B (pred = ref+110, pred = 1.4 ref - 182, the
///     ref = 240 / ref = 70 verticals, pred = 180 above the right box,
///     pred = 70 between the boxes) are strict on the C/D/E side.
///   - The pred = 180 top of the low-ref D strip and the pred = 70 floor
///     of the right D box stay closed against E; the ref = 180 line at
///     pred < 70 stays closed on the C side against E.
/// After the A test the remaining regions are pairwise disjoint, so the
/// test order does not matter; what is left is Zone B.
inline ClarkeZone clarke_zone(double reference, double predicted) {
    detail::check_glucose_range(reference, "reference");
    detail::check_glucose_range(predicted, "predicted");

    const double r = reference, p = predicted;

    if ((p >= 0.8 * r && p <= 1.2 * r) || (r < 70.0 && p <= 70.0)) return ClarkeZone::A;

    const bool c_upper = r >= 70.0 && r < 290.0 && p > r + 110.0;
    const bool c_lower = r <= 180.0 && p < 1.4 * r - 182.0;
    if (c_upper || c_lower) return ClarkeZone::C;

    const bool d_right = r > 240.0 && p >= 70.0 && p < 180.0;
    const bool d_left = r <= 175.0 / 3.0 && p >= 70.0 && p <= 180.0;
    const bool d_wedge = r >= 175.0 / 3.0 && r < 70.0 && p >= 1.2 * r && p <= 180.0;
    if (d_right || d_left || d_wedge) return ClarkeZone::D;

    const bool e_upper = r < 70.0 && p > 180.0;
    const bool e_lower = r > 180.0 && p < 70.0;
    if (e_upper || e_lower) return ClarkeZone::E;

    return ClarkeZone::B;
}

/// Per-zone counts and percentages over a set of pairs.
struct ClarkeSummary {
    std::array<std::size_t, 5> counts{};      // indexed by zone
    std::array<double, 5> percentages{};
    std::size_t n = 0;

    std::size_t count(ClarkeZone z) const { return counts[static_cast<std::size_t>(z)]; }
    double percentage(ClarkeZone z) const { return percentages[static_cast<std::size_t>(z)]; }
};

inline ClarkeSummary clarke_summary(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) fail(ErrorKind::domain, "clarke_summary of empty pair list");
    ClarkeSummary s;
    s.n = pairs.size();
    for (const auto& [reference, predicted] : pairs)
        ++s.counts[static_cast<std::size_t>(clarke_zone(reference, predicted))];
    for (std::size_t i = 0; i < 5; ++i)
        s.percentages[i] = 100.0 * static_cast<double>(s.counts[i]) / static_cast<double>(s.n);
    return s;
}

/// One named polyline of the grid drawing, in (reference, predicted)
/// coordinates.
struct ZoneBoundary {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// The classic boundary segments for a 0..400 mg/dL grid plot.
inline std::vector<ZoneBoundary> clarke_boundaries() {
    const double third = 175.0 / 3.0;
    return {
        {"diagonal", {{0, 0}, {400, 400}}},
        {"upper_a_flat", {{0, 70}, {third, 70}}},
        {"upper_a_slope", {{third, 70}, {400.0 / 1.2, 400}}},
        {"lower_a_flat", {{70, 0}, {70, 56}}},
        {"lower_a_slope", {{70, 56}, {400, 320}}},
        {"upper_c", {{70, 180}, {290, 400}}},
        {"lower_c", {{130, 0}, {180, 70}}},
        {"upper_d_left", {{0, 180}, {70, 180}}},
        {"upper_d_wall", {{70, 84}, {70, 180}}},
        {"lower_d_wall", {{180, 70}, {400, 70}}},
        {"lower_d_left", {{180, 0}, {180, 70}}},
        {"lower_d_box", {{240, 70}, {240, 180}}},
        {"lower_d_top", {{240, 180}, {400, 180}}},
    };
}

/// Acceptability rule: within +/-15 mg/dL below 75 mg/dL reference,
/// within +/-20% at or above it. Both bounds inclusive.
inline bool clinical_acceptability(double reference, double predicted) {
    detail::check_glucose_range(reference, "reference");
    detail::check_glucose_range(predicted, "predicted");
    const double err = std::abs(predicted - reference);
    if (reference < 75.0) return err <= 15.0;
    return err <= 0.20 * reference;
}

/// Evaluation summary serialized by the CLI.
struct EvaluationReport {
    double sep = 0.0;
    double rmsep = 0.0;
    std::array<double, 5> zone_percentages{};
    double clinically_acceptable_fraction = 0.0;
    std::size_t n = 0;
};

}  // namespace glucam
