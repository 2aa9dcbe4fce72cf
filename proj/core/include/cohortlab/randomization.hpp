#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cohortlab/bertillon.hpp"
#include "cohortlab/regression.hpp"

namespace cohortlab {

struct Subject {
    int age = 0;
    Sex sex = Sex::male;
    MaritalStatus status = MaritalStatus::married;
};

/// PRNG algorithm identifier emitted with every dispersion report. Results
/// are reproducible across runs of the same build; bit-exact reproducibility
/// across implementations is not promised.
inline constexpr const char* kRngAlgorithm = "splitmix64+mt19937_64";

/// Per-replication seed derivation: replication i of a run with seed s draws
/// its randomness from splitmix64 mixing of (s, i). Replications are thereby
/// independent of execution order.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t index);

struct SplitResult {
    std::vector<Subject> p;
    std::vector<Subject> d;
};

/// Uniformly random 1:1 partition (unstratified). Odd sizes give P the extra
/// subject. Deterministic for a given seed. Throws std::invalid_argument for
/// fewer than two subjects.
SplitResult split(std::span<const Subject> population, std::uint64_t seed);

struct MedianAgeMetric {};
struct FractionOverMetric {
    int threshold = 65;
};
struct CellShareMetric {
    Sex sex = Sex::male;
    MaritalStatus status = MaritalStatus::married;
};

using BalanceMetric =
    std::variant<MedianAgeMetric, FractionOverMetric, CellShareMetric>;

/// Label used in reports: "median_age", "f65" (or "f<threshold>"),
/// "cell_share(male,widowed)".
std::string metric_label(const BalanceMetric& metric);

/// Value of the metric on one group; nullopt when the metric is undefined
/// there (empty group).
std::optional<double> evaluate_metric(const BalanceMetric& metric,
                                      std::span<const Subject> group);

/// Mean, standard deviation and coefficient of variation of a metric across
/// replications. sd uses the population (divide-by-n) convention so that
/// cv = sd/mean matches CV = sigma/m. cv is NaN when the mean is zero.
struct DispersionReport {
    std::string metric;
    double mean = 0.0;
    double sd = 0.0;
    double cv = 0.0;
    std::size_t replications = 0;  ///< replications that produced a value
    std::size_t missing = 0;       ///< replications recorded as undefined
};

/// Splits the population `replications` times (replication i seeded by
/// replication_seed(seed, i)), evaluates the metric on group P of each split,
/// and reports the dispersion. Undefined replications are recorded in
/// `missing`, never silently dropped. Throws std::invalid_argument when
/// replications < 2 or the population cannot be split.
DispersionReport replicate_dispersion(std::span<const Subject> population,
                                      const BalanceMetric& metric,
                                      int replications, std::uint64_t seed);

enum class CountyField { median_age, f65 };

/// CV of one field across analysis units. Throws std::invalid_argument for
/// fewer than two units.
DispersionReport cross_unit_cv(std::span<const CountyRecord> units,
                               CountyField field);

}  // namespace cohortlab
