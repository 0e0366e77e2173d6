#include "fxres/volatility.hpp"

#include <cmath>
#include <map>

#include "fxres/errors.hpp"
#include "fxres/kernels.hpp"
#include "fxres/stats.hpp"

namespace fxres {

const char* vol_variable_name(VolVariable v) {
    return v == VolVariable::VolCF ? "VolCF" : "VolFX";
}

VolSeries rolling_sd(const std::string& country, VolVariable variable,
                     std::span<const std::pair<Date, double>> series, int window) {
    if (window < 2) throw InvalidConfig("rolling window must be >= 2");
    if (series.size() < static_cast<size_t>(window)) {
        throw SeriesTooShort(country + "/" + vol_variable_name(variable) + ": " +
                             std::to_string(series.size()) + " observations < window " +
                             std::to_string(window));
    }
    std::vector<double> vals(series.size());
    for (size_t i = 0; i < series.size(); ++i) vals[i] = series[i].second;

    VolSeries out;
    out.country = country;
    out.variable = variable;
    out.frequency = Frequency::Weekly;
    out.estimator = VolEstimator::RollingSD;
    const size_t w = static_cast<size_t>(window);
    for (size_t t = w - 1; t < vals.size(); ++t) {
        const std::span<const double> win(vals.data() + (t - w + 1), w);
        out.values.push_back({series[t].first, sample_sd(win)});
    }
    return out;
}

VolSeries quarterly_sd(const std::string& country, VolVariable variable,
                       std::span<const std::pair<Date, double>> series) {
    std::map<int, std::vector<double>> buckets;
    std::map<int, Date> bucket_end;
    for (const auto& [d, v] : series) {
        const int q = quarter_index(d);
        buckets[q].push_back(v);
        bucket_end[q] = quarter_end_of(d);
    }
    VolSeries out;
    out.country = country;
    out.variable = variable;
    out.frequency = Frequency::Quarterly;
    out.estimator = VolEstimator::RollingSD;
    for (const auto& [q, vals] : buckets) {
        if (vals.size() < 2) {
            throw SparseQuarter(country + "/" + vol_variable_name(variable) + ": quarter " +
                                quarter_label(bucket_end[q]) + " has " +
                                std::to_string(vals.size()) + " observation(s), need >= 2");
        }
        out.values.push_back({bucket_end[q], sample_sd(vals)});
    }
    return out;
}

Ar1DiffFit fit_ar1_diff(std::span<const double> levels) {
    if (levels.size() < 20) {
        throw SeriesTooShort("AR(1)-in-differences fit needs >= 20 observations, got " +
                             std::to_string(levels.size()));
    }
    std::vector<double> dx(levels.size() - 1);
    for (size_t i = 1; i < levels.size(); ++i) dx[i - 1] = levels[i] - levels[i - 1];

    // regression pairs (dx_{t-1}, dx_t), t = 1..m-1
    const size_t m = dx.size();
    const std::span<const double> x(dx.data(), m - 1);
    const std::span<const double> y(dx.data() + 1, m - 1);
    const double n = static_cast<double>(m - 1);
    const double mx = mean(x);
    const double my = mean(y);
    const double sxx = kernels::sumsq_dev(x, mx);
    if (sxx == 0.0) {
        throw DegenerateFit("differenced series has zero variance");
    }
    const double sxy = kernels::dot(x, y) - n * mx * my;

    Ar1DiffFit fit;
    fit.phi = sxy / sxx;
    fit.intercept = my - fit.phi * mx;
    fit.residuals.resize(m - 1);
    for (size_t t = 0; t < m - 1; ++t) {
        fit.residuals[t] = y[t] - fit.intercept - fit.phi * x[t];
    }
    return fit;
}

VolSeries arima_resid_vol(const std::string& country, VolVariable variable,
                          std::span<const std::pair<Date, double>> series, int window) {
    std::vector<double> levels(series.size());
    for (size_t i = 0; i < series.size(); ++i) levels[i] = series[i].second;
    const Ar1DiffFit fit = fit_ar1_diff(levels);

    // residual t corresponds to level index t+2
    std::vector<std::pair<Date, double>> resid(fit.residuals.size());
    for (size_t t = 0; t < fit.residuals.size(); ++t) {
        resid[t] = {series[t + 2].first, fit.residuals[t]};
    }
    VolSeries out = rolling_sd(country, variable, resid, window);
    out.estimator = VolEstimator::ArimaResidSD;
    return out;
}

} // namespace fxres
