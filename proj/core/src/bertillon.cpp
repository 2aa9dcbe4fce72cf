#include "cohortlab/bertillon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cohortlab {

namespace {

std::size_t status_index(MaritalStatus status) {
    return static_cast<std::size_t>(status);
}

std::string key_label(Sex sex, const std::string& cause) {
    return std::string(to_string(sex)) + "/" + cause;
}

}  // namespace

std::string_view to_string(Sex sex) {
    return sex == Sex::male ? "male" : "female";
}

std::string_view to_string(MaritalStatus status) {
    switch (status) {
        case MaritalStatus::single: return "single";
        case MaritalStatus::married: return "married";
        case MaritalStatus::partner: return "partner";
        case MaritalStatus::divorced: return "divorced";
        case MaritalStatus::widowed: return "widowed";
    }
    return "unknown";
}

Sex sex_from_string(std::string_view label) {
    if (label == "male" || label == "m") return Sex::male;
    if (label == "female" || label == "f") return Sex::female;
    throw std::invalid_argument("unknown sex label: " + std::string(label));
}

MaritalStatus marital_status_from_string(std::string_view label) {
    for (MaritalStatus status : kMaritalStatuses) {
        if (label == to_string(status)) {
            return status;
        }
    }
    throw std::invalid_argument("unknown marital status label: " + std::string(label));
}

void RelativeRiskTable::set(Sex sex, const std::string& cause, int anchor_age,
                            MaritalStatus status, double multiplier) {
    if (!std::isfinite(multiplier) || multiplier <= 0.0) {
        throw std::invalid_argument("risk multiplier for " + key_label(sex, cause) +
                                    " must be finite and > 0");
    }
    if (status == MaritalStatus::married && multiplier != 1.0) {
        throw std::invalid_argument(
            "married is the reference category; its multiplier must be exactly 1.0");
    }
    auto& anchors = by_sex_[static_cast<std::size_t>(sex)][cause];
    auto it = std::lower_bound(anchors.begin(), anchors.end(), anchor_age,
                               [](const Anchor& a, int age) { return a.age < age; });
    if (it == anchors.end() || it->age != anchor_age) {
        it = anchors.insert(it, Anchor{anchor_age, {}});
        it->mult.fill(1.0);
    }
    it->mult[status_index(status)] = multiplier;
}

bool RelativeRiskTable::has(Sex sex, const std::string& cause) const {
    return find(sex, cause) != nullptr;
}

const std::vector<RelativeRiskTable::Anchor>* RelativeRiskTable::find(
    Sex sex, const std::string& cause) const {
    const auto& causes = by_sex_[static_cast<std::size_t>(sex)];
    auto it = causes.find(cause);
    return it == causes.end() ? nullptr : &it->second;
}

double RelativeRiskTable::relative_rate(Sex sex, const std::string& cause,
                                        MaritalStatus status, double age) const {
    const auto* anchors = find(sex, cause);
    if (anchors == nullptr || anchors->empty()) {
        throw std::out_of_range("no risk entries for " + key_label(sex, cause) +
                                (sex == Sex::female
                                     ? " (no female table ships; supply one)"
                                     : ""));
    }
    if (status == MaritalStatus::married) {
        return 1.0;
    }
    const std::size_t idx = status_index(status);
    if (age <= anchors->front().age) {
        return anchors->front().mult[idx];
    }
    if (age >= anchors->back().age) {
        return anchors->back().mult[idx];
    }
    // Linear interpolation between the bracketing anchors.
    auto upper = std::lower_bound(anchors->begin(), anchors->end(), age,
                                  [](const Anchor& a, double v) { return a.age < v; });
    auto lower = std::prev(upper);
    const double span = static_cast<double>(upper->age - lower->age);
    const double t = (age - lower->age) / span;
    return lower->mult[idx] + t * (upper->mult[idx] - lower->mult[idx]);
}

std::vector<int> RelativeRiskTable::anchor_ages(Sex sex,
                                                const std::string& cause) const {
    const auto* anchors = find(sex, cause);
    if (anchors == nullptr) {
        throw std::out_of_range("no risk entries for " + key_label(sex, cause));
    }
    std::vector<int> ages;
    ages.reserve(anchors->size());
    for (const auto& a : *anchors) {
        ages.push_back(a.age);
    }
    return ages;
}

std::vector<std::string> RelativeRiskTable::causes(Sex sex) const {
    std::vector<std::string> out;
    for (const auto& [cause, anchors] : by_sex_[static_cast<std::size_t>(sex)]) {
        (void)anchors;
        out.push_back(cause);
    }
    return out;
}

RelativeRiskTable RelativeRiskTable::builtin_male_us1980() {
    RelativeRiskTable table;
    struct Row {
        const char* cause;
        int age;
        double single, widowed;
    };
    // Single/married and widowed/married death-rate ratios, US males 1980;
    // divorced carries the widowed value (the source lumps the two).
    constexpr Row rows[] = {
        {"heart", 40, 2.3, 2.7},
        {"heart", 50, 1.9, 2.2},
        {"cancer", 40, 1.8, 2.1},
        {"cancer", 50, 1.6, 1.9},
    };
    for (const auto& row : rows) {
        table.set(Sex::male, row.cause, row.age, MaritalStatus::single, row.single);
        table.set(Sex::male, row.cause, row.age, MaritalStatus::widowed, row.widowed);
        table.set(Sex::male, row.cause, row.age, MaritalStatus::divorced, row.widowed);
        table.set(Sex::male, row.cause, row.age, MaritalStatus::partner, 1.0);
        table.set(Sex::male, row.cause, row.age, MaritalStatus::married, 1.0);
    }
    return table;
}

MaritalComposition::MaritalComposition(const std::array<double, 5>& shares)
    : shares_(shares) {
    double sum = 0.0;
    for (std::size_t i = 0; i < shares_.size(); ++i) {
        if (!std::isfinite(shares_[i]) || shares_[i] < 0.0) {
            throw std::invalid_argument(
                "composition share for " +
                std::string(to_string(static_cast<MaritalStatus>(i))) +
                " must be finite and >= 0");
        }
        sum += shares_[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("composition shares sum to " +
                                    std::to_string(sum) + ", expected 1");
    }
}

MaritalComposition MaritalComposition::all(MaritalStatus status) {
    std::array<double, 5> shares{0.0, 0.0, 0.0, 0.0, 0.0};
    shares[status_index(status)] = 1.0;
    return MaritalComposition(shares);
}

double MaritalComposition::share(MaritalStatus status) const {
    return shares_[status_index(status)];
}

double composition_adjustment(const MaritalComposition& comp,
                              const RelativeRiskTable& table, Sex sex,
                              const std::string& cause, double age) {
    double adjustment = 0.0;
    for (MaritalStatus status : kMaritalStatuses) {
        const double share = comp.share(status);
        if (share > 0.0) {
            adjustment += share * table.relative_rate(sex, cause, status, age);
        }
    }
    return adjustment;
}

double composition_adjusted_rate(double base_married_rate,
                                 const MaritalComposition& comp,
                                 const RelativeRiskTable& table, Sex sex,
                                 const std::string& cause, double age) {
    if (!std::isfinite(base_married_rate) || base_married_rate < 0.0) {
        throw std::domain_error("base married rate must be finite and >= 0");
    }
    return base_married_rate * composition_adjustment(comp, table, sex, cause, age);
}

double imbalance_excess_deaths(double base_deaths,
                               const MaritalComposition& comp_p,
                               const MaritalComposition& comp_d,
                               const RelativeRiskTable& table, Sex sex,
                               const std::string& cause, double age) {
    if (!std::isfinite(base_deaths) || base_deaths < 0.0) {
        throw std::domain_error("base death count must be finite and >= 0");
    }
    const double adj_p = composition_adjustment(comp_p, table, sex, cause, age);
    const double adj_d = composition_adjustment(comp_d, table, sex, cause, age);
    return base_deaths * (adj_p - adj_d) / adj_d;
}

}  // namespace cohortlab
