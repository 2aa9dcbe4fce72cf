#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cohortlab/gompertz.hpp"
#include "support.hpp"

using namespace cohortlab;

namespace {

const GompertzParams kDefault{0.11, 0.082, 0.0};

// Independent recursion oracle: one starting age, annual steps.
std::vector<double> brute_force_deaths(double g0, double a, int age, double count,
                                       int years) {
    std::vector<double> deaths;
    double n = count;
    for (int t = 0; t < years; ++t) {
        const double m = n * g0 * std::exp(a * (age + t)) / 1000.0;
        deaths.push_back(m);
        n -= m;
    }
    return deaths;
}

// The four placebo-arm bins expanded uniformly by hand (no cohort module).
AgeRoster lipid_placebo_roster() {
    AgeRoster roster;
    const struct {
        int lo, hi;
        double count;
    } bins[] = {{31, 54, 1021.0}, {55, 64, 1708.0}, {65, 69, 1087.0}, {70, 75, 686.0}};
    for (const auto& bin : bins) {
        const int width = bin.hi - bin.lo + 1;
        for (int age = bin.lo; age <= bin.hi; ++age) {
            roster.add(age, bin.count / width);
        }
    }
    return roster;
}

}  // namespace

TEST_CASE("hazard evaluates the exponential law") {
    CHECK(hazard(kDefault, 0.0) == 0.11);
    // 0.11 * exp(0.082 * 70)
    CHECK(hazard(kDefault, 70.0) == doctest::Approx(34.217085207953225).epsilon(1e-12));
    // ratio across the 45-year span quoted as "about 40 times"
    const double ratio = hazard(kDefault, 82.0) / hazard(kDefault, 37.0);
    CHECK(ratio == doctest::Approx(40.04484695728672).epsilon(1e-12));
    CHECK(std::abs(ratio - 40.2) < 0.5);
    // fractional ages are allowed in direct evaluation
    CHECK(hazard(kDefault, 61.5) > hazard(kDefault, 61.0));
}

TEST_CASE("hazard rejects bad input") {
    CHECK_THROWS_AS(hazard(kDefault, -1.0), std::domain_error);
    CHECK_THROWS_AS(hazard(GompertzParams{0.0, 0.082, 0.0}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(hazard(GompertzParams{0.11, -0.1, 0.0}, 10.0), std::invalid_argument);
}

TEST_CASE("nonzero makeham term is rejected as unsupported") {
    const GompertzParams with_makeham{0.11, 0.082, 0.01};
    CHECK_THROWS_WITH_AS(with_makeham.validate(),
                         doctest::Contains("unsupported"), std::invalid_argument);
}

TEST_CASE("doubling time") {
    CHECK(doubling_time(kDefault) == doctest::Approx(8.453014397072502).epsilon(1e-12));
    CHECK(std::abs(doubling_time(kDefault) - 8.45) < 0.01);
    CHECK(doubling_time(GompertzParams{0.11, std::log(2.0) / 10.0, 0.0}) == 10.0);
    CHECK(doubling_time(GompertzParams{0.11, 0.164, 0.0}) ==
          doctest::Approx(4.226507198536251).epsilon(1e-12));
}

TEST_CASE("hazard doubles every ln2/a years") {
    auto rng = testsupport::property_rng(41);
    std::uniform_real_distribution<double> age_dist(0.0, 90.0);
    const double step = std::log(2.0) / kDefault.a;
    for (int i = 0; i < 200; ++i) {
        const double age = age_dist(rng);
        const double lhs = hazard(kDefault, age + step);
        const double rhs = 2.0 * hazard(kDefault, age);
        CHECK(testsupport::close_rel(lhs, rhs, 1e-12));
    }
}

TEST_CASE("single-age one-year projection matches one recursion step") {
    AgeRoster roster;
    roster.add(61, 1000.0);
    const DeathProjection projection = project(kDefault, roster, 1);
    CHECK(projection.grand_total ==
          doctest::Approx(16.358131068959143).epsilon(1e-12));
    CHECK(projection.cell(0, 0) == projection.grand_total);
}

TEST_CASE("projection matches the brute-force recursion oracle") {
    auto rng = testsupport::property_rng(42);
    std::uniform_int_distribution<int> age_dist(20, 90);
    std::uniform_int_distribution<int> years_dist(1, 10);
    std::uniform_real_distribution<double> count_dist(0.5, 5000.0);
    for (int i = 0; i < 100; ++i) {
        const int age = age_dist(rng);
        const int years = years_dist(rng);
        const double count = count_dist(rng);
        AgeRoster roster;
        roster.add(age, count);
        const DeathProjection projection = project(kDefault, roster, years);
        const auto expected =
            brute_force_deaths(kDefault.g0, kDefault.a, age, count, years);
        REQUIRE(projection.years == years);
        for (int t = 0; t < years; ++t) {
            CHECK(testsupport::close_rel(projection.cell(0, t),
                                         expected[static_cast<std::size_t>(t)], 1e-12));
        }
    }
}

TEST_CASE("placebo-arm projection reproduces the published expectation") {
    const AgeRoster roster = lipid_placebo_roster();
    const DeathProjection projection = project(kDefault, roster, 6);

    CHECK(std::abs(projection.total_for_age_range(31, 54) - 31.0) < 2.0);
    CHECK(std::abs(projection.total_for_age_range(55, 64) - 180.0) < 2.0);
    CHECK(std::abs(projection.total_for_age_range(65, 69) - 200.0) < 2.0);
    CHECK(std::abs(projection.total_for_age_range(70, 75) - 190.0) < 2.0);
    CHECK(std::abs(projection.grand_total - 601.0) < 3.0);
    // tight pin on the computed value to catch silent drift
    CHECK(projection.grand_total == doctest::Approx(601.0644451857887).epsilon(1e-10));
}

TEST_CASE("vanishing g0 kills nobody") {
    const AgeRoster roster = lipid_placebo_roster();
    double previous = project(GompertzParams{1e-3, 0.082, 0.0}, roster, 6).grand_total;
    for (double g0 : {1e-6, 1e-9, 1e-12}) {
        const double total =
            project(GompertzParams{g0, 0.082, 0.0}, roster, 6).grand_total;
        CHECK(total < previous);
        previous = total;
    }
    CHECK(previous < 1e-6);
}

TEST_CASE("projection structure invariants") {
    const AgeRoster roster = lipid_placebo_roster();
    const DeathProjection projection = project(kDefault, roster, 6);

    double cell_sum = 0.0;
    for (double cell : projection.cells) {
        CHECK(cell >= 0.0);
        cell_sum += cell;
    }
    CHECK(testsupport::close_rel(cell_sum, projection.grand_total, 1e-9));
    CHECK(projection.grand_total <= roster.total());

    double year_sum = 0.0;
    for (double y : projection.per_year_totals) {
        year_sum += y;
    }
    CHECK(testsupport::close_rel(year_sum, projection.grand_total, 1e-9));
}

TEST_CASE("head-count conservation per starting age") {
    auto rng = testsupport::property_rng(43);
    std::uniform_int_distribution<int> age_dist(20, 95);
    std::uniform_real_distribution<double> count_dist(0.0, 300.0);
    for (int trial = 0; trial < 50; ++trial) {
        AgeRoster roster;
        for (int k = 0; k < 12; ++k) {
            roster.add(age_dist(rng), count_dist(rng));
        }
        if (roster.total() <= 0.0) {
            continue;
        }
        const DeathProjection projection = project(kDefault, roster, 8);
        for (std::size_t i = 0; i < projection.start_ages.size(); ++i) {
            const double start = roster.entries()[i].count;
            double cumulative = 0.0;
            for (int t = 0; t < projection.years; ++t) {
                cumulative += projection.cell(i, t);
                CHECK(start - cumulative >= -1e-12 * std::max(start, 1.0));
            }
        }
    }
}

TEST_CASE("moving mass to a higher starting age strictly increases deaths") {
    auto rng = testsupport::property_rng(44);
    std::uniform_int_distribution<int> age_dist(20, 80);
    std::uniform_int_distribution<int> bump_dist(1, 15);
    std::uniform_real_distribution<double> count_dist(1.0, 500.0);
    for (int trial = 0; trial < 50; ++trial) {
        AgeRoster base;
        const int mover_age = age_dist(rng);
        const double mover_count = count_dist(rng);
        base.add(mover_age, mover_count);
        for (int k = 0; k < 6; ++k) {
            base.add(age_dist(rng), count_dist(rng));
        }

        AgeRoster shifted;
        const int higher_age = mover_age + bump_dist(rng);
        for (const auto& entry : base.entries()) {
            if (entry.age == mover_age) {
                shifted.add(entry.age, entry.count - mover_count);
            } else {
                shifted.add(entry.age, entry.count);
            }
        }
        shifted.add(higher_age, mover_count);

        const double before = project(kDefault, base, 6).grand_total;
        const double after = project(kDefault, shifted, 6).grand_total;
        CHECK(after > before);
    }
}

TEST_CASE("projection is linear in head-count") {
    auto rng = testsupport::property_rng(45);
    std::uniform_int_distribution<int> age_dist(20, 90);
    std::uniform_real_distribution<double> count_dist(0.5, 400.0);
    std::uniform_real_distribution<double> scale_dist(0.1, 7.0);
    for (int trial = 0; trial < 30; ++trial) {
        AgeRoster base;
        for (int k = 0; k < 8; ++k) {
            base.add(age_dist(rng), count_dist(rng));
        }
        const double k = scale_dist(rng);
        AgeRoster scaled;
        for (const auto& entry : base.entries()) {
            scaled.add(entry.age, entry.count * k);
        }
        const DeathProjection p1 = project(kDefault, base, 6);
        const DeathProjection p2 = project(kDefault, scaled, 6);
        REQUIRE(p1.cells.size() == p2.cells.size());
        for (std::size_t i = 0; i < p1.cells.size(); ++i) {
            CHECK(testsupport::close_rel(p2.cells[i], k * p1.cells[i], 1e-12));
        }
    }
}

TEST_CASE("projection rejects bad input") {
    CHECK_THROWS_AS(project(kDefault, AgeRoster{}, 6), std::domain_error);
    AgeRoster zero;
    zero.add(50, 0.0);
    CHECK_THROWS_AS(project(kDefault, zero, 6), std::domain_error);
    AgeRoster ok;
    ok.add(50, 10.0);
    CHECK_THROWS_AS(project(kDefault, ok, 0), std::domain_error);
}

TEST_CASE("calibration reproduces the published renormalization factor") {
    const AgeRoster roster = lipid_placebo_roster();
    const CalibrationResult cal = calibrate(kDefault, roster, 6, 633.0);
    CHECK(std::abs(cal.factor - 1.053) < 0.005);
    CHECK(cal.factor == doctest::Approx(1.053131665115111).epsilon(1e-10));
    CHECK(cal.params.g0 == doctest::Approx(0.11 * cal.factor).epsilon(1e-15));
    CHECK(cal.params.a == kDefault.a);
}

TEST_CASE("calibration fixed point and scaling behaviour") {
    const AgeRoster roster = lipid_placebo_roster();
    const double projected = project(kDefault, roster, 6).grand_total;

    const CalibrationResult identity = calibrate(kDefault, roster, 6, projected);
    CHECK(identity.factor == 1.0);
    CHECK(identity.params.g0 == kDefault.g0);

    // Doubling the target doubles g0; depletion makes the re-projection only
    // approximately double, but it must land within 5% of the target.
    const CalibrationResult doubled = calibrate(kDefault, roster, 6, 2.0 * projected);
    CHECK(doubled.params.g0 == doctest::Approx(2.0 * kDefault.g0).epsilon(1e-12));
    const double reprojected = project(doubled.params, roster, 6).grand_total;
    CHECK(std::abs(reprojected - 2.0 * projected) / (2.0 * projected) < 0.05);
}

TEST_CASE("calibration rejects bad input") {
    const AgeRoster roster = lipid_placebo_roster();
    CHECK_THROWS_AS(calibrate(kDefault, roster, 6, 0.0), std::domain_error);
    CHECK_THROWS_AS(calibrate(kDefault, roster, 6, -5.0), std::domain_error);
    CHECK_THROWS_AS(calibrate(kDefault, AgeRoster{}, 6, 100.0), std::domain_error);
}

TEST_CASE("roster accumulates duplicate ages and validates entries") {
    AgeRoster roster;
    roster.add(60, 1.5);
    roster.add(60, 2.5);
    REQUIRE(roster.size() == 1);
    CHECK(roster.entries().front().count == 4.0);
    CHECK_THROWS_AS(roster.add(-1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(roster.add(10, -1.0), std::invalid_argument);
}
