#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "glucam/clinical.hpp"
#include "oracles.hpp"

using namespace glucam;

namespace {

ClarkeZone oracle_zone(double r, double p) { return oracles::clarke_zone(r, p); }

}  // namespace

TEST_CASE("clarke_zone basic placements") {
    CHECK(clarke_zone(100, 100) == ClarkeZone::A);
    CHECK(clarke_zone(50, 50) == ClarkeZone::A);
    CHECK(clarke_zone(60, 200) == ClarkeZone::E);
    CHECK(clarke_zone(200, 100) == ClarkeZone::B);
    CHECK(clarke_zone(150, 300) == ClarkeZone::C);
    CHECK(clarke_zone(170, 40) == ClarkeZone::C);
    CHECK(clarke_zone(300, 100) == ClarkeZone::D);
    CHECK(clarke_zone(40, 120) == ClarkeZone::D);
    CHECK(clarke_zone(65, 100) == ClarkeZone::D);
    CHECK(clarke_zone(300, 50) == ClarkeZone::E);
}

TEST_CASE("clarke_zone boundary ties go to the more benign zone") {
    CHECK(clarke_zone(70, 84) == ClarkeZone::A);    // on the 1.2x line
    CHECK(clarke_zone(70, 56) == ClarkeZone::A);    // on the 0.8x line
    CHECK(clarke_zone(60, 70) == ClarkeZone::A);    // top edge of the low box
    CHECK(clarke_zone(70, 100) == ClarkeZone::B);   // right edge of the D wedge
    CHECK(clarke_zone(70, 180) == ClarkeZone::B);   // four-zone corner
    CHECK(clarke_zone(70, 200) == ClarkeZone::C);   // E/C edge above the corner
    CHECK(clarke_zone(150, 260) == ClarkeZone::B);  // on pred = ref + 110
    CHECK(clarke_zone(180, 50) == ClarkeZone::C);   // E/C edge at low pred
    CHECK(clarke_zone(180, 70) == ClarkeZone::B);   // corner of C/E/B
    CHECK(clarke_zone(240, 70) == ClarkeZone::B);   // corner of D box against E
    CHECK(clarke_zone(241, 70) == ClarkeZone::D);   // floor of the D box against E
    CHECK(clarke_zone(240, 100) == ClarkeZone::B);  // left edge of the D box
    CHECK(clarke_zone(300, 180) == ClarkeZone::B);  // top edge of the D box
    CHECK(clarke_zone(50, 180) == ClarkeZone::D);   // top of the left D strip against E
    CHECK(clarke_zone(60, 180) == ClarkeZone::D);
    CHECK(clarke_zone(0, 180) == ClarkeZone::D);
    CHECK(clarke_zone(130, 0) == ClarkeZone::B);    // degenerate tip of lower C
    CHECK(clarke_zone(135, 5) == ClarkeZone::C);
    CHECK(clarke_zone(290, 400) == ClarkeZone::B);  // right edge of upper C
    CHECK(clarke_zone(289, 400) == ClarkeZone::C);
}

TEST_CASE("the diagonal is always zone A") {
    for (int x = 0; x <= 600; x += 3) CHECK(clarke_zone(x, x) == ClarkeZone::A);
}

TEST_CASE("zone A at reference >= 70 always means within 20 percent") {
    for (int r = 0; r <= 400; r += 1) {
        for (int p = 0; p <= 400; p += 5) {
            if (clarke_zone(r, p) == ClarkeZone::A && r >= 70)
                CHECK(std::abs(static_cast<double>(p - r)) <= 0.2 * r + 1e-12);
        }
    }
}

TEST_CASE("clarke_zone agrees with the halfplane oracle on a coarse grid") {
    // full-resolution enumeration lives in the acceptance suite
    for (int r = 0; r <= 400; r += 1) {
        for (int p = 0; p <= 400; p += 7) {
            INFO("ref " << r << " pred " << p);
            CHECK(clarke_zone(r, p) == oracle_zone(r, p));
        }
    }
}

TEST_CASE("clarke_zone validates its input range") {
    CHECK_THROWS_AS(clarke_zone(-1, 100), Error);
    CHECK_THROWS_AS(clarke_zone(100, 601), Error);
    CHECK_THROWS_AS(clarke_zone(std::nan(""), 100), Error);
}

TEST_CASE("clarke_summary counts and percentages") {
    std::vector<std::pair<double, double>> diag;
    for (int i = 0; i < 10; ++i) diag.emplace_back(80.0 + i, 80.0 + i);
    const ClarkeSummary all_a = clarke_summary(diag);
    CHECK(all_a.percentage(ClarkeZone::A) == 100.0);
    CHECK(all_a.count(ClarkeZone::A) == 10);

    const std::vector<std::pair<double, double>> mixed{
        {100, 100}, {100, 125}, {60, 200}, {300, 100}, {170, 40},
        {50, 50},   {200, 350}, {65, 100}, {120, 138}, {240, 70},
    };
    const ClarkeSummary s = clarke_summary(mixed);
    std::array<std::size_t, 5> expected{};
    for (const auto& [r, p] : mixed) ++expected[static_cast<std::size_t>(oracle_zone(r, p))];
    for (std::size_t z = 0; z < 5; ++z) CHECK(s.counts[z] == expected[z]);

    double total = 0.0;
    for (double pct : s.percentages) total += pct;
    CHECK(total == Catch::Approx(100.0).margin(1e-9));

    const ClarkeSummary single = clarke_summary({{60, 200}});
    CHECK(single.percentage(ClarkeZone::E) == 100.0);

    CHECK_THROWS_AS(clarke_summary({}), Error);
}

TEST_CASE("clarke boundary polylines cover the standard figure") {
    const auto boundaries = clarke_boundaries();
    CHECK(boundaries.size() == 13);
    for (const auto& b : boundaries) {
        CHECK(!b.name.empty());
        CHECK(b.points.size() >= 2);
    }
}

TEST_CASE("clinical_acceptability rule") {
    CHECK(clinical_acceptability(70, 84));     // |14| <= 15
    CHECK_FALSE(clinical_acceptability(100, 121));
    CHECK(clinical_acceptability(100, 120));   // exactly 20 percent
    CHECK(clinical_acceptability(74, 89));     // |15| <= 15 under the low rule
    CHECK_FALSE(clinical_acceptability(74, 90));
    CHECK(clinical_acceptability(75, 90));     // reference 75 uses the percentage rule
    CHECK_FALSE(clinical_acceptability(75, 90.1));

    for (double x : {0.0, 20.0, 74.9, 75.0, 150.0, 600.0}) CHECK(clinical_acceptability(x, x));

    CHECK_THROWS_AS(clinical_acceptability(-2, 50), Error);
    CHECK_THROWS_AS(clinical_acceptability(50, 700), Error);
}
