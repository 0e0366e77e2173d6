#pragma once

#include <span>
#include <string>
#include <vector>

#include "fxres/dates.hpp"
#include "fxres/panel.hpp"

namespace fxres {

enum class VolVariable { VolCF, VolFX };
enum class VolEstimator { RollingSD, ArimaResidSD };

const char* vol_variable_name(VolVariable v);

struct VolPoint {
    Date date;
    double vol = 0.0;
};

struct VolSeries {
    std::string country;
    VolVariable variable = VolVariable::VolCF;
    Frequency frequency = Frequency::Weekly;
    VolEstimator estimator = VolEstimator::RollingSD;
    std::vector<VolPoint> values;
};

// Rolling sample SD (divisor n-1) over a trailing window; the first value
// is emitted once the window is complete.
VolSeries rolling_sd(const std::string& country, VolVariable variable,
                     std::span<const std::pair<Date, double>> series, int window = 4);

// One sample SD per calendar quarter over that quarter's weekly
// observations; emitted at the quarter-end date.
VolSeries quarterly_sd(const std::string& country, VolVariable variable,
                       std::span<const std::pair<Date, double>> series);

// AR(1) fit on first differences by conditional least squares:
//   dx_t = c + phi * dx_{t-1} + e_t
struct Ar1DiffFit {
    double intercept = 0.0;
    double phi = 0.0;
    std::vector<double> residuals; // aligned with input index 2..n-1
};

Ar1DiffFit fit_ar1_diff(std::span<const double> levels);

// Volatility of the AR(1)-in-differences residuals over a rolling window.
VolSeries arima_resid_vol(const std::string& country, VolVariable variable,
                          std::span<const std::pair<Date, double>> series, int window = 4);

} // namespace fxres
