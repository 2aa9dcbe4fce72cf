#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cohortlab {

/// One analysis unit for the county-level death-rate fits. f65 is stored in
/// percentage points (0-100), not as a fraction: the fitted slope is "death
/// rate per 1,000 per percentage point", and a fraction-scale regressor
/// would change it by a factor of 100.
struct CountyRecord {
    std::string id;
    double median_age = 0.0;  ///< years
    double f65 = 0.0;         ///< percent of population aged 65+, 0-100
    double death_rate = 0.0;  ///< deaths per 1,000 per year
};

enum class FitStatus {
    ok,
    degenerate_x,  ///< regressor has zero variance; no line exists
    degenerate_y,  ///< response has zero variance; r^2 undefined
};

/// Simple least-squares line y = slope*x + intercept. The slope/intercept
/// standard errors use residual variance with n-2 degrees of freedom and are
/// NaN when n < 3. On a degenerate fit the numeric fields are NaN and
/// `status` says which variance collapsed.
struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double intercept_se = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
    FitStatus status = FitStatus::ok;

    bool ok() const noexcept { return status == FitStatus::ok; }
};

struct DataPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Closed-form simple OLS. Requires n >= 2 and non-constant x; throws
/// std::invalid_argument on fewer than two points and std::domain_error on a
/// constant regressor. A constant response is returned flagged
/// (FitStatus::degenerate_y), not thrown, so batch runs survive odd units.
FitResult ols_fit(std::span<const DataPoint> points);

/// Same computation but degenerate inputs are flagged instead of thrown.
FitResult ols_fit_flagged(std::span<const DataPoint> points) noexcept;

struct PredictorContrast {
    FitResult vs_f65;
    FitResult vs_median_age;
};

/// Fits death_rate against f65 and against median_age over the same units.
/// Degenerate cases come back flagged. Throws std::invalid_argument for
/// fewer than three units.
PredictorContrast predictor_contrast(std::span<const CountyRecord> units);

}  // namespace cohortlab
