#include "cohortlab/randomization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "cohortlab/cohort.hpp"

namespace cohortlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Moments {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double sd = std::numeric_limits<double>::quiet_NaN();
};

// Population (divide-by-n) standard deviation, so cv = sd/mean is sigma/m.
Moments population_moments(std::span<const double> values) {
    Moments m;
    if (values.empty()) {
        return m;
    }
    const double n = static_cast<double>(values.size());
    m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) {
        const double d = v - m.mean;
        ss += d * d;
    }
    m.sd = std::sqrt(ss / n);
    return m;
}

DispersionReport make_report(std::string label, std::span<const double> values,
                             std::size_t missing) {
    DispersionReport report;
    report.metric = std::move(label);
    const Moments m = population_moments(values);
    report.mean = m.mean;
    report.sd = m.sd;
    report.cv = (m.mean != 0.0) ? m.sd / m.mean
                                : std::numeric_limits<double>::quiet_NaN();
    report.replications = values.size();
    report.missing = missing;
    return report;
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index));
}

SplitResult split(std::span<const Subject> population, std::uint64_t seed) {
    if (population.size() < 2) {
        throw std::invalid_argument("cannot split a population of fewer than 2 subjects");
    }
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const std::size_t p_size = (population.size() + 1) / 2;  // odd -> P gets the extra
    SplitResult result;
    result.p.reserve(p_size);
    result.d.reserve(population.size() - p_size);
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < p_size ? result.p : result.d).push_back(population[order[i]]);
    }
    return result;
}

std::string metric_label(const BalanceMetric& metric) {
    if (std::holds_alternative<MedianAgeMetric>(metric)) {
        return "median_age";
    }
    if (const auto* f = std::get_if<FractionOverMetric>(&metric)) {
        return "f" + std::to_string(f->threshold);
    }
    const auto& cell = std::get<CellShareMetric>(metric);
    return "cell_share(" + std::string(to_string(cell.sex)) + "," +
           std::string(to_string(cell.status)) + ")";
}

std::optional<double> evaluate_metric(const BalanceMetric& metric,
                                      std::span<const Subject> group) {
    if (group.empty()) {
        return std::nullopt;
    }
    if (std::holds_alternative<MedianAgeMetric>(metric)) {
        AgeRoster roster;
        for (const auto& s : group) {
            roster.add(s.age, 1.0);
        }
        return median_age(roster);
    }
    if (const auto* f = std::get_if<FractionOverMetric>(&metric)) {
        const auto over = std::count_if(group.begin(), group.end(), [&](const Subject& s) {
            return s.age >= f->threshold;
        });
        return static_cast<double>(over) / static_cast<double>(group.size());
    }
    const auto& cell = std::get<CellShareMetric>(metric);
    const auto hits = std::count_if(group.begin(), group.end(), [&](const Subject& s) {
        return s.sex == cell.sex && s.status == cell.status;
    });
    return static_cast<double>(hits) / static_cast<double>(group.size());
}

DispersionReport replicate_dispersion(std::span<const Subject> population,
                                      const BalanceMetric& metric,
                                      int replications, std::uint64_t seed) {
    if (replications < 2) {
        throw std::invalid_argument("need at least 2 replications, got " +
                                    std::to_string(replications));
    }
    if (population.size() < 2) {
        throw std::invalid_argument("cannot split a population of fewer than 2 subjects");
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(replications));
    std::size_t missing = 0;
    for (int i = 0; i < replications; ++i) {
        const SplitResult groups =
            split(population, replication_seed(seed, static_cast<std::uint64_t>(i)));
        if (const auto value = evaluate_metric(metric, groups.p)) {
            values.push_back(*value);
        } else {
            ++missing;
        }
    }
    return make_report(metric_label(metric), values, missing);
}

DispersionReport cross_unit_cv(std::span<const CountyRecord> units,
                               CountyField field) {
    if (units.size() < 2) {
        throw std::invalid_argument("need at least 2 units, got " +
                                    std::to_string(units.size()));
    }
    std::vector<double> values;
    values.reserve(units.size());
    for (const auto& unit : units) {
        values.push_back(field == CountyField::median_age ? unit.median_age
                                                          : unit.f65);
    }
    return make_report(field == CountyField::median_age ? "median_age" : "f65",
                       values, 0);
}

}  // namespace cohortlab
