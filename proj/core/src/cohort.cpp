#include "cohortlab/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cohortlab {

namespace {

std::string bin_label(const AgeBin& bin) {
    return std::to_string(bin.lo) + "-" + std::to_string(bin.hi);
}

void validate_bin(const AgeBin& bin) {
    if (bin.lo < 0) {
        throw std::invalid_argument("bin " + bin_label(bin) + ": ages must be >= 0");
    }
    if (bin.lo > bin.hi) {
        throw std::invalid_argument("bin " + bin_label(bin) +
                                    ": lower endpoint exceeds upper endpoint");
    }
    if (!std::isfinite(bin.count) || bin.count < 0.0) {
        throw std::invalid_argument("bin " + bin_label(bin) +
                                    ": count must be finite and >= 0");
    }
}

void validate_policy(const AgeBin& bin, const WithinBinPolicy& policy) {
    const int width = bin.hi - bin.lo + 1;
    if (const auto* pm = std::get_if<PointMass>(&policy)) {
        if (pm->age < bin.lo || pm->age > bin.hi) {
            throw std::invalid_argument("point-mass age " + std::to_string(pm->age) +
                                        " lies outside bin " + bin_label(bin));
        }
    } else if (const auto* ex = std::get_if<ExplicitWeights>(&policy)) {
        if (ex->weights.size() != static_cast<std::size_t>(width)) {
            throw std::invalid_argument(
                "explicit weights for bin " + bin_label(bin) + " need " +
                std::to_string(width) + " entries, got " +
                std::to_string(ex->weights.size()));
        }
        double sum = 0.0;
        for (double w : ex->weights) {
            if (!std::isfinite(w) || w < 0.0) {
                throw std::invalid_argument("explicit weights for bin " +
                                            bin_label(bin) + " must be >= 0");
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("explicit weights for bin " + bin_label(bin) +
                                        " sum to " + std::to_string(sum) +
                                        ", expected 1");
        }
    }
}

}  // namespace

CohortSpec::CohortSpec(std::vector<AgeBin> bins)
    : CohortSpec(std::move(bins), {}) {}

CohortSpec::CohortSpec(std::vector<AgeBin> bins,
                       std::vector<WithinBinPolicy> policies)
    : bins_(std::move(bins)), policies_(std::move(policies)) {
    if (policies_.empty()) {
        policies_.assign(bins_.size(), Uniform{});
    }
    if (policies_.size() != bins_.size()) {
        throw std::invalid_argument("need one within-bin policy per bin");
    }
    // Normalize to ascending order, carrying policies along.
    std::vector<std::size_t> order(bins_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [this](std::size_t l, std::size_t r) {
        return bins_[l].lo < bins_[r].lo;
    });
    std::vector<AgeBin> sorted_bins;
    std::vector<WithinBinPolicy> sorted_policies;
    sorted_bins.reserve(bins_.size());
    sorted_policies.reserve(bins_.size());
    for (std::size_t i : order) {
        sorted_bins.push_back(bins_[i]);
        sorted_policies.push_back(std::move(policies_[i]));
    }
    bins_ = std::move(sorted_bins);
    policies_ = std::move(sorted_policies);
    validate();
}

void CohortSpec::validate() const {
    for (std::size_t i = 0; i < bins_.size(); ++i) {
        validate_bin(bins_[i]);
        validate_policy(bins_[i], policies_[i]);
        if (i > 0 && bins_[i].lo <= bins_[i - 1].hi) {
            throw std::invalid_argument("bins " + bin_label(bins_[i - 1]) + " and " +
                                        bin_label(bins_[i]) + " overlap");
        }
    }
}

const WithinBinPolicy& CohortSpec::policy(std::size_t bin_index) const {
    if (bin_index >= bins_.size()) {
        throw std::out_of_range("bin index " + std::to_string(bin_index) +
                                " out of range (cohort has " +
                                std::to_string(bins_.size()) + " bins)");
    }
    return policies_[bin_index];
}

void CohortSpec::set_policy(std::size_t bin_index, WithinBinPolicy policy) {
    if (bin_index >= bins_.size()) {
        throw std::out_of_range("bin index " + std::to_string(bin_index) +
                                " out of range (cohort has " +
                                std::to_string(bins_.size()) + " bins)");
    }
    validate_policy(bins_[bin_index], policy);
    policies_[bin_index] = std::move(policy);
}

double CohortSpec::total() const noexcept {
    return std::accumulate(bins_.begin(), bins_.end(), 0.0,
                           [](double acc, const AgeBin& b) { return acc + b.count; });
}

AgeRoster expand_bin(const AgeBin& bin, const WithinBinPolicy& policy) {
    validate_bin(bin);
    validate_policy(bin, policy);
    AgeRoster roster;
    const int width = bin.hi - bin.lo + 1;
    if (std::holds_alternative<Uniform>(policy)) {
        const double share = bin.count / width;
        for (int age = bin.lo; age <= bin.hi; ++age) {
            roster.add(age, share);
        }
    } else if (const auto* pm = std::get_if<PointMass>(&policy)) {
        roster.add(pm->age, bin.count);
    } else {
        const auto& weights = std::get<ExplicitWeights>(policy).weights;
        for (int i = 0; i < width; ++i) {
            roster.add(bin.lo + i, bin.count * weights[static_cast<std::size_t>(i)]);
        }
    }
    return roster;
}

AgeRoster expand(const CohortSpec& spec) {
    AgeRoster roster;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const AgeRoster bin_roster = expand_bin(spec.bins()[i], spec.policy(i));
        for (const auto& entry : bin_roster.entries()) {
            roster.add(entry.age, entry.count);
        }
    }
    return roster;
}

double median_age(const AgeRoster& roster) {
    const double total = roster.total();
    if (roster.empty() || total <= 0.0) {
        throw std::domain_error("median age is undefined for an empty cohort");
    }
    // Each integer age x carries uniform mass on [x-0.5, x+0.5). The median is
    // the midpoint of the level set where the cumulative count equals total/2:
    // a point inside the crossing cell in the generic case, the centre of the
    // gap when the half-count is hit exactly on a cell boundary.
    const double half = total / 2.0;
    const auto& entries = roster.entries();
    double cum = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].count == 0.0) {
            continue;
        }
        const double cum_after = cum + entries[i].count;
        if (cum_after > half) {
            return (entries[i].age - 0.5) + (half - cum) / entries[i].count;
        }
        if (cum_after == half) {
            for (std::size_t j = i + 1; j < entries.size(); ++j) {
                if (entries[j].count > 0.0) {
                    return ((entries[i].age + 0.5) + (entries[j].age - 0.5)) / 2.0;
                }
            }
            return entries[i].age + 0.5;
        }
        cum = cum_after;
    }
    return entries.back().age + 0.5;  // unreachable for positive totals
}

double median_age(const CohortSpec& spec) { return median_age(expand(spec)); }

double fraction_over(const CohortSpec& spec, int age_threshold) {
    const double total = spec.total();
    if (spec.empty() || total <= 0.0) {
        throw std::domain_error("fraction is undefined for an empty cohort");
    }
    double over = 0.0;
    for (const auto& entry : expand(spec).entries()) {
        if (entry.age >= age_threshold) {
            over += entry.count;
        }
    }
    return over / total;
}

SensitivityBounds sensitivity_bounds(const GompertzParams& params,
                                     const CohortSpec& spec,
                                     std::size_t bin_index, int years) {
    if (bin_index >= spec.size()) {
        throw std::out_of_range("bin index " + std::to_string(bin_index) +
                                " out of range (cohort has " +
                                std::to_string(spec.size()) + " bins)");
    }
    const AgeBin& bin = spec.bins()[bin_index];
    SensitivityBounds bounds;
    bounds.min_deaths =
        project(params, expand_bin(bin, PointMass{bin.lo}), years).grand_total;
    bounds.uniform_deaths =
        project(params, expand_bin(bin, Uniform{}), years).grand_total;
    bounds.max_deaths =
        project(params, expand_bin(bin, PointMass{bin.hi}), years).grand_total;
    return bounds;
}

double bin_count_delta_deaths(const GompertzParams& params,
                              const CohortSpec& spec_a, const CohortSpec& spec_b,
                              std::size_t bin_index, int years) {
    if (bin_index >= spec_a.size() || bin_index >= spec_b.size()) {
        throw std::out_of_range("bin index " + std::to_string(bin_index) +
                                " out of range");
    }
    const AgeBin& bin_a = spec_a.bins()[bin_index];
    const AgeBin& bin_b = spec_b.bins()[bin_index];
    if (bin_a.lo != bin_b.lo || bin_a.hi != bin_b.hi) {
        throw std::invalid_argument("bin boundaries differ between cohorts: " +
                                    bin_label(bin_a) + " vs " + bin_label(bin_b));
    }
    const double deaths_a =
        project(params, expand_bin(bin_a, Uniform{}), years).grand_total;
    const double deaths_b =
        project(params, expand_bin(bin_b, Uniform{}), years).grand_total;
    return deaths_a - deaths_b;
}

}  // namespace cohortlab
