#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cohortlab {

enum class Sex { male, female };

enum class MaritalStatus { single, married, partner, divorced, widowed };

inline constexpr std::array<MaritalStatus, 5> kMaritalStatuses = {
    MaritalStatus::single, MaritalStatus::married, MaritalStatus::partner,
    MaritalStatus::divorced, MaritalStatus::widowed};

std::string_view to_string(Sex sex);
std::string_view to_string(MaritalStatus status);
/// Throws std::invalid_argument on an unknown label.
Sex sex_from_string(std::string_view label);
MaritalStatus marital_status_from_string(std::string_view label);

/// Death-rate multipliers by marital status relative to married, keyed by
/// (sex, cause-of-death label) with one or more integer anchor ages per key.
/// Married is the reference category and is pinned to 1.0 at every anchor.
class RelativeRiskTable {
  public:
    /// Sets one multiplier. Throws std::invalid_argument for a non-positive
    /// multiplier or a married multiplier different from 1.0.
    void set(Sex sex, const std::string& cause, int anchor_age,
             MaritalStatus status, double multiplier);

    bool has(Sex sex, const std::string& cause) const;

    /// Multiplier for the given status at the given age. Married returns 1.0
    /// always. Other statuses are linearly interpolated in age between anchor
    /// ages and clamped outside the anchor range. Throws std::out_of_range
    /// for an unknown (sex, cause).
    double relative_rate(Sex sex, const std::string& cause,
                         MaritalStatus status, double age) const;

    /// Anchor ages available for a (sex, cause), ascending.
    std::vector<int> anchor_ages(Sex sex, const std::string& cause) const;
    /// Cause labels present for one sex, sorted.
    std::vector<std::string> causes(Sex sex) const;

    /// Built-in table for US males, 1980 (heart disease and cancer, anchor
    /// ages 40 and 50). Widowed and divorced carry the same lumped ratio, a
    /// limitation of the source figure; callers may override via set().
    /// Non-married partners default to the married reference, 1.0.
    /// No female table ships; female lookups need a user-supplied table.
    static RelativeRiskTable builtin_male_us1980();

  private:
    struct Anchor {
        int age = 0;
        // multipliers indexed by MaritalStatus enum value; unset -> 1.0
        std::array<double, 5> mult{1.0, 1.0, 1.0, 1.0, 1.0};
    };
    using CauseMap = std::map<std::string, std::vector<Anchor>>;

    const std::vector<Anchor>* find(Sex sex, const std::string& cause) const;

    std::array<CauseMap, 2> by_sex_;  // indexed by Sex enum value
};

/// Proportions by marital status; nonnegative and summing to 1 (tolerance
/// 1e-9 at construction; loaders renormalize exactly).
class MaritalComposition {
  public:
    MaritalComposition() = default;
    /// Shares indexed by MaritalStatus enum value.
    /// Throws std::invalid_argument on negative share or sum != 1 +/- 1e-9.
    explicit MaritalComposition(const std::array<double, 5>& shares);

    /// Composition that is 100% one status.
    static MaritalComposition all(MaritalStatus status);

    double share(MaritalStatus status) const;
    const std::array<double, 5>& shares() const noexcept { return shares_; }

  private:
    std::array<double, 5> shares_{0.0, 1.0, 0.0, 0.0, 0.0};  // default: married
};

/// Composition-weighted mean multiplier: sum over statuses of
/// share(status) * relative_rate(status). Equals 1 for an all-married group.
double composition_adjustment(const MaritalComposition& comp,
                              const RelativeRiskTable& table, Sex sex,
                              const std::string& cause, double age);

/// base_married_rate scaled by the composition adjustment, per 1,000.
double composition_adjusted_rate(double base_married_rate,
                                 const MaritalComposition& comp,
                                 const RelativeRiskTable& table, Sex sex,
                                 const std::string& cause, double age);

/// Extra deaths attributable to the P group's marital mix relative to the
/// D group's, taking the D group as the baseline:
///   base_deaths * (adjustment(P) - adjustment(D)) / adjustment(D)
/// Positive when the P mix carries more non-married (higher-risk) weight.
/// Swapping the groups changes sign but not magnitude-normalization; the
/// division by the D-group adjustment is this library's convention.
double imbalance_excess_deaths(double base_deaths,
                               const MaritalComposition& comp_p,
                               const MaritalComposition& comp_d,
                               const RelativeRiskTable& table, Sex sex,
                               const std::string& cause, double age);

}  // namespace cohortlab
