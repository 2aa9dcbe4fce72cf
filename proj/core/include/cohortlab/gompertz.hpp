#pragma once

#include <cstddef>
#include <vector>

namespace cohortlab {

/// Exponential hazard law: rate(age) = g0 * exp(a * age), in deaths per
/// 1,000 person-years. The optional age-independent additive term is a
/// configuration hook only; any nonzero value is rejected as unsupported.
struct GompertzParams {
    double g0 = 0.11;      ///< baseline rate per 1,000 per year at age zero
    double a = 0.082;      ///< exponential growth per year of age
    double makeham = 0.0;  ///< must stay zero; kept so callers get a clear error

    /// Throws std::invalid_argument when g0 <= 0, a <= 0, a value is not
    /// finite, or makeham != 0.
    void validate() const;
};

/// Death rate per 1,000 per year at the given (possibly fractional) age.
/// Throws std::domain_error for negative age.
double hazard(const GompertzParams& params, double age);

/// Age span over which the hazard doubles: ln(2) / a.
double doubling_time(const GompertzParams& params);

struct AgeCount {
    int age = 0;
    double count = 0.0;
};

/// Expected head-count by integer age. Ages are kept distinct and ascending;
/// adding to an existing age accumulates. Counts are real-valued expectations,
/// never rounded.
class AgeRoster {
  public:
    AgeRoster() = default;
    /// Builds from (age, count) pairs; duplicate ages accumulate.
    /// Throws std::invalid_argument on negative age or negative count.
    explicit AgeRoster(const std::vector<AgeCount>& entries);

    void add(int age, double count);

    const std::vector<AgeCount>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }
    double total() const noexcept;

  private:
    std::vector<AgeCount> entries_;  // ascending by age, ages distinct
};

/// Expected deaths by (starting age, trial year). Cells are expectations from
/// the annual survival recursion; grand_total is their sum.
struct DeathProjection {
    std::vector<int> start_ages;        ///< row labels, ascending
    int years = 0;                      ///< number of columns
    std::vector<double> cells;          ///< row-major [age_index * years + year]
    std::vector<double> per_age_totals; ///< parallel to start_ages
    std::vector<double> per_year_totals;
    double grand_total = 0.0;

    double cell(std::size_t age_index, int year) const {
        return cells[age_index * static_cast<std::size_t>(years) +
                     static_cast<std::size_t>(year)];
    }
    /// Sum of per-age totals over starting ages in [lo, hi].
    double total_for_age_range(int lo, int hi) const;
};

/// Projects expected deaths over `years` annual steps. Within each year the
/// hazard is evaluated at the age held at the start of the year:
///   deaths_t = survivors_t * rate(age + t) / 1000
///   survivors_{t+1} = survivors_t - deaths_t
/// Throws std::domain_error for an empty roster or years < 1.
DeathProjection project(const GompertzParams& params, const AgeRoster& roster,
                        int years);

struct CalibrationResult {
    GompertzParams params;  ///< input params with g0 rescaled
    double factor = 1.0;    ///< observed / projected
};

/// Rescales g0 so the projection reproduces an observed death count:
/// factor = observed / projected grand total. Throws std::domain_error when
/// observed <= 0 or the projected total is zero.
CalibrationResult calibrate(const GompertzParams& params,
                            const AgeRoster& roster, int years,
                            double observed_deaths);

}  // namespace cohortlab
