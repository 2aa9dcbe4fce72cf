#include "cohortlab/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cohortlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

FitResult degenerate(FitStatus status, std::size_t n) {
    FitResult fit;
    fit.slope = fit.intercept = fit.slope_se = fit.intercept_se = fit.r_squared = kNaN;
    fit.n = n;
    fit.status = status;
    return fit;
}

}  // namespace

FitResult ols_fit_flagged(std::span<const DataPoint> points) noexcept {
    const std::size_t n = points.size();
    if (n < 2) {
        return degenerate(FitStatus::degenerate_x, n);
    }
    double x_mean = 0.0;
    double y_mean = 0.0;
    for (const auto& p : points) {
        x_mean += p.x;
        y_mean += p.y;
    }
    x_mean /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);

    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (const auto& p : points) {
        const double dx = p.x - x_mean;
        const double dy = p.y - y_mean;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0) {
        return degenerate(FitStatus::degenerate_x, n);
    }
    if (syy == 0.0) {
        return degenerate(FitStatus::degenerate_y, n);
    }

    FitResult fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = y_mean - fit.slope * x_mean;

    double ssr = 0.0;
    for (const auto& p : points) {
        const double r = p.y - (fit.slope * p.x + fit.intercept);
        ssr += r * r;
    }
    fit.r_squared = 1.0 - ssr / syy;
    // Accumulation noise can push an exact fit a hair past [0, 1]; clamp.
    fit.r_squared = std::min(1.0, std::max(0.0, fit.r_squared));

    if (n >= 3) {
        const double residual_var = ssr / static_cast<double>(n - 2);
        fit.slope_se = std::sqrt(residual_var / sxx);
        fit.intercept_se = std::sqrt(
            residual_var * (1.0 / static_cast<double>(n) + x_mean * x_mean / sxx));
    } else {
        fit.slope_se = kNaN;
        fit.intercept_se = kNaN;
    }
    return fit;
}

FitResult ols_fit(std::span<const DataPoint> points) {
    if (points.size() < 2) {
        throw std::invalid_argument("least-squares fit needs at least 2 points, got " +
                                    std::to_string(points.size()));
    }
    FitResult fit = ols_fit_flagged(points);
    if (fit.status == FitStatus::degenerate_x) {
        throw std::domain_error("regressor is constant; the fitted line is singular");
    }
    return fit;
}

PredictorContrast predictor_contrast(std::span<const CountyRecord> units) {
    if (units.size() < 3) {
        throw std::invalid_argument("predictor contrast needs at least 3 units, got " +
                                    std::to_string(units.size()));
    }
    std::vector<DataPoint> vs_f65;
    std::vector<DataPoint> vs_ma;
    vs_f65.reserve(units.size());
    vs_ma.reserve(units.size());
    for (const auto& unit : units) {
        vs_f65.push_back({unit.f65, unit.death_rate});
        vs_ma.push_back({unit.median_age, unit.death_rate});
    }
    return PredictorContrast{ols_fit_flagged(vs_f65), ols_fit_flagged(vs_ma)};
}

}  // namespace cohortlab
