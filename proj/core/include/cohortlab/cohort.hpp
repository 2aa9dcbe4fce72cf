#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "cohortlab/gompertz.hpp"

namespace cohortlab {

/// One reported age bracket. Endpoints are inclusive integer years, so
/// 31-54 spans 24 ages and 70-75 spans 6.
struct AgeBin {
    int lo = 0;
    int hi = 0;
    double count = 0.0;
};

/// Spread the bin count evenly over every integer age in [lo, hi].
struct Uniform {};

/// Place the whole bin count at a single age inside the bin.
struct PointMass {
    int age = 0;
};

/// One weight per integer age in [lo, hi]; weights are nonnegative and sum
/// to 1 (tolerance 1e-9).
struct ExplicitWeights {
    std::vector<double> weights;
};

using WithinBinPolicy = std::variant<Uniform, PointMass, ExplicitWeights>;

/// A binned study-group age structure plus a within-bin distribution policy
/// per bin (default Uniform). Bins are kept ascending and pairwise disjoint.
class CohortSpec {
  public:
    CohortSpec() = default;
    /// All bins get the Uniform policy. Throws std::invalid_argument when a
    /// bin is malformed or bins overlap.
    explicit CohortSpec(std::vector<AgeBin> bins);
    CohortSpec(std::vector<AgeBin> bins, std::vector<WithinBinPolicy> policies);

    const std::vector<AgeBin>& bins() const noexcept { return bins_; }
    const WithinBinPolicy& policy(std::size_t bin_index) const;
    /// Replaces one bin's policy; the policy is validated against the bin.
    void set_policy(std::size_t bin_index, WithinBinPolicy policy);

    std::size_t size() const noexcept { return bins_.size(); }
    bool empty() const noexcept { return bins_.empty(); }
    double total() const noexcept;

  private:
    void validate() const;

    std::vector<AgeBin> bins_;                 // ascending by lo, disjoint
    std::vector<WithinBinPolicy> policies_;    // parallel to bins_
};

/// Realizes one bin as a roster under the given policy. Head count is
/// preserved exactly.
AgeRoster expand_bin(const AgeBin& bin, const WithinBinPolicy& policy);

/// Realizes the whole spec as a single roster.
AgeRoster expand(const CohortSpec& spec);

/// Weighted median age of a roster. Each integer age x is treated as uniform
/// mass on the unit cell [x-0.5, x+0.5); the median is the midpoint of the
/// level set where the piecewise-linear cumulative count reaches half the
/// total. A single point mass at x therefore yields exactly x, and two equal
/// masses at 40 and 60 yield 50. Throws std::domain_error on an empty roster.
double median_age(const AgeRoster& roster);
double median_age(const CohortSpec& spec);

/// Head count with age >= threshold divided by the total. Bins straddling
/// the threshold are apportioned by their policy (Uniform gives the linear
/// share). Throws std::domain_error when the total count is zero.
double fraction_over(const CohortSpec& spec, int age_threshold);

struct SensitivityBounds {
    double min_deaths = 0.0;      ///< whole bin at its youngest age
    double uniform_deaths = 0.0;  ///< uniform within-bin distribution
    double max_deaths = 0.0;      ///< whole bin at its oldest age
};

/// Projects the selected bin alone under PointMass(lo), Uniform and
/// PointMass(hi). With a strictly increasing hazard the three results are
/// ordered min <= uniform <= max (strictly when lo < hi and count > 0).
/// Throws std::out_of_range for a bad bin index.
SensitivityBounds sensitivity_bounds(const GompertzParams& params,
                                     const CohortSpec& spec,
                                     std::size_t bin_index, int years);

/// Difference in projected deaths (Uniform policy) for one bin between two
/// specs that share that bin's boundaries: deaths(a) - deaths(b).
/// Throws std::invalid_argument when the boundaries differ.
double bin_count_delta_deaths(const GompertzParams& params,
                              const CohortSpec& spec_a, const CohortSpec& spec_b,
                              std::size_t bin_index, int years);

}  // namespace cohortlab
