#include "cohortlab/gompertz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cohortlab {

void GompertzParams::validate() const {
    if (!std::isfinite(g0) || g0 <= 0.0) {
        throw std::invalid_argument("hazard baseline g0 must be finite and > 0, got " +
                                    std::to_string(g0));
    }
    if (!std::isfinite(a) || a <= 0.0) {
        throw std::invalid_argument("hazard growth rate a must be finite and > 0, got " +
                                    std::to_string(a));
    }
    if (makeham != 0.0) {
        throw std::invalid_argument(
            "age-independent makeham term is unsupported; the hazard model "
            "implements the pure exponential law only (set makeham to 0)");
    }
}

double hazard(const GompertzParams& params, double age) {
    params.validate();
    if (!(age >= 0.0)) {
        throw std::domain_error("age must be >= 0, got " + std::to_string(age));
    }
    return params.g0 * std::exp(params.a * age);
}

double doubling_time(const GompertzParams& params) {
    params.validate();
    return std::log(2.0) / params.a;
}

AgeRoster::AgeRoster(const std::vector<AgeCount>& entries) {
    for (const auto& e : entries) {
        add(e.age, e.count);
    }
}

void AgeRoster::add(int age, double count) {
    if (age < 0) {
        throw std::invalid_argument("roster age must be >= 0, got " +
                                    std::to_string(age));
    }
    if (!std::isfinite(count) || count < 0.0) {
        throw std::invalid_argument("roster count must be finite and >= 0, got " +
                                    std::to_string(count));
    }
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), age,
        [](const AgeCount& e, int value) { return e.age < value; });
    if (it != entries_.end() && it->age == age) {
        it->count += count;
    } else {
        entries_.insert(it, AgeCount{age, count});
    }
}

double AgeRoster::total() const noexcept {
    return std::accumulate(entries_.begin(), entries_.end(), 0.0,
                           [](double acc, const AgeCount& e) { return acc + e.count; });
}

double DeathProjection::total_for_age_range(int lo, int hi) const {
    double total = 0.0;
    for (std::size_t i = 0; i < start_ages.size(); ++i) {
        if (start_ages[i] >= lo && start_ages[i] <= hi) {
            total += per_age_totals[i];
        }
    }
    return total;
}

DeathProjection project(const GompertzParams& params, const AgeRoster& roster,
                        int years) {
    params.validate();
    if (roster.empty()) {
        throw std::domain_error("cannot project an empty roster");
    }
    if (roster.total() <= 0.0) {
        throw std::domain_error("cannot project a roster with zero head-count");
    }
    if (years < 1) {
        throw std::domain_error("projection horizon must be >= 1 year, got " +
                                std::to_string(years));
    }

    DeathProjection out;
    out.years = years;
    out.start_ages.reserve(roster.size());
    out.cells.resize(roster.size() * static_cast<std::size_t>(years), 0.0);
    out.per_age_totals.assign(roster.size(), 0.0);
    out.per_year_totals.assign(static_cast<std::size_t>(years), 0.0);

    std::size_t row = 0;
    for (const auto& entry : roster.entries()) {
        out.start_ages.push_back(entry.age);
        double survivors = entry.count;
        for (int t = 0; t < years; ++t) {
            // Hazard held at the age at the start of the year; rate is per 1,000.
            const double rate = hazard(params, static_cast<double>(entry.age + t));
            const double deaths = survivors * rate / 1000.0;
            survivors -= deaths;
            out.cells[row * static_cast<std::size_t>(years) +
                      static_cast<std::size_t>(t)] = deaths;
            out.per_age_totals[row] += deaths;
            out.per_year_totals[static_cast<std::size_t>(t)] += deaths;
        }
        out.grand_total += out.per_age_totals[row];
        ++row;
    }
    return out;
}

CalibrationResult calibrate(const GompertzParams& params, const AgeRoster& roster,
                            int years, double observed_deaths) {
    if (!std::isfinite(observed_deaths) || observed_deaths <= 0.0) {
        throw std::domain_error("observed death count must be finite and > 0, got " +
                                std::to_string(observed_deaths));
    }
    const double projected = project(params, roster, years).grand_total;
    if (projected <= 0.0) {
        throw std::domain_error("projected death total is zero; nothing to calibrate");
    }
    CalibrationResult result;
    result.factor = observed_deaths / projected;
    result.params = params;
    result.params.g0 *= result.factor;
    return result;
}

}  // namespace cohortlab
