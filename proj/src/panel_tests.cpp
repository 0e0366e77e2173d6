#include "fxres/panel_tests.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fxres/errors.hpp"
#include "fxres/stats.hpp"

namespace fxres {

namespace {

void check_balanced(const SeriesPanel& panel, size_t min_t, const char* what) {
    if (panel.empty()) throw TooShort(std::string(what) + ": empty panel");
    const size_t t = panel.begin()->second.size();
    for (const auto& [country, series] : panel) {
        if (series.size() != t) {
            throw UnbalancedPanel(std::string(what) + ": series length for '" + country +
                                  "' differs (" + std::to_string(series.size()) + " vs " +
                                  std::to_string(t) + ")");
        }
    }
    if (t < min_t) {
        throw TooShort(std::string(what) + ": T=" + std::to_string(t) + " below minimum " +
                       std::to_string(min_t));
    }
}

// OLS residuals of y on X (X assumed full rank).
Eigen::VectorXd ols_residuals(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < x.cols()) {
        throw TooShort("degenerate regressor matrix (zero-variance column?)");
    }
    return y - x * qr.solve(y);
}

// Mean/variance adjustment moments for the adjusted t statistic in the
// intercept specification, indexed by the effective sample length
// (Levin-Lin-Chu 2002, table of asymptotic adjustment parameters).
struct LlcMoments {
    double mu_star;
    double sigma_star;
};

LlcMoments llc_moments(double t_tilde) {
    struct Row {
        double t;
        double mu;
        double sigma;
    };
    static constexpr Row table[] = {
        {25.0, -0.554, 0.919},  {30.0, -0.546, 0.889},  {35.0, -0.541, 0.867},
        {40.0, -0.537, 0.850},  {45.0, -0.533, 0.837},  {50.0, -0.531, 0.826},
        {60.0, -0.527, 0.810},  {70.0, -0.524, 0.798},  {80.0, -0.521, 0.789},
        {90.0, -0.520, 0.782},  {100.0, -0.518, 0.776}, {250.0, -0.509, 0.742},
    };
    static constexpr Row asymptotic = {0.0, -0.500, 0.707};

    if (t_tilde <= table[0].t) return {table[0].mu, table[0].sigma};
    for (size_t i = 1; i < std::size(table); ++i) {
        if (t_tilde <= table[i].t) {
            const double w = (t_tilde - table[i - 1].t) / (table[i].t - table[i - 1].t);
            return {table[i - 1].mu + w * (table[i].mu - table[i - 1].mu),
                    table[i - 1].sigma + w * (table[i].sigma - table[i - 1].sigma)};
        }
    }
    // beyond the tabulated range: interpolate toward the limit in 1/T
    const double w = (1.0 / table[std::size(table) - 1].t - 1.0 / t_tilde) /
                     (1.0 / table[std::size(table) - 1].t);
    const Row& last = table[std::size(table) - 1];
    return {last.mu + w * (asymptotic.mu - last.mu),
            last.sigma + w * (asymptotic.sigma - last.sigma)};
}

// Bartlett-kernel long-run variance of a demeaned series.
double long_run_variance(const std::vector<double>& x) {
    const size_t n = x.size();
    const double m = mean(x);
    std::vector<double> d(n);
    for (size_t i = 0; i < n; ++i) d[i] = x[i] - m;

    const int k_bar = static_cast<int>(std::floor(3.21 * std::cbrt(static_cast<double>(n))));
    double lrv = 0.0;
    for (size_t i = 0; i < n; ++i) lrv += d[i] * d[i];
    lrv /= static_cast<double>(n);
    for (int lag = 1; lag <= k_bar && lag < static_cast<int>(n); ++lag) {
        double acov = 0.0;
        for (size_t t = static_cast<size_t>(lag); t < n; ++t) {
            acov += d[t] * d[t - static_cast<size_t>(lag)];
        }
        acov /= static_cast<double>(n);
        const double w = 1.0 - static_cast<double>(lag) / (static_cast<double>(k_bar) + 1.0);
        lrv += 2.0 * w * acov;
    }
    return lrv;
}

} // namespace

TestOutcome llc_unit_root_single(const SeriesPanel& panel, int lag) {
    check_balanced(panel, static_cast<size_t>(std::max(25, lag + 10)), "llc_unit_root");
    const int n = static_cast<int>(panel.size());
    const int t_total = static_cast<int>(panel.begin()->second.size());
    const int t_use = t_total - lag - 1;
    if (t_use <= lag + 3) {
        throw TooShort("llc_unit_root: effective sample too short for lag " +
                       std::to_string(lag));
    }

    double sum_ev = 0.0;     // sum of e~ * v~
    double sum_vv = 0.0;     // sum of v~^2
    double sum_s = 0.0;      // sum of long-run/short-run SD ratios
    size_t total_obs = 0;

    std::vector<std::pair<std::vector<double>, std::vector<double>>> normalized;
    normalized.reserve(static_cast<size_t>(n));

    for (const auto& [country, y] : panel) {
        std::vector<double> dy(y.size() - 1);
        for (size_t i = 1; i < y.size(); ++i) dy[i - 1] = y[i] - y[i - 1];

        // usable rows: level index t = lag+1 .. t_total-1 (0-based)
        const int rows = t_use;
        Eigen::MatrixXd deterministic(rows, lag + 1); // dy lags + intercept
        Eigen::VectorXd dy_t(rows);
        Eigen::VectorXd y_lag(rows);
        for (int r = 0; r < rows; ++r) {
            const int t = lag + 1 + r; // level index of the regression row
            dy_t(r) = dy[static_cast<size_t>(t - 1)];
            y_lag(r) = y[static_cast<size_t>(t - 1)];
            for (int j = 1; j <= lag; ++j) {
                deterministic(r, j - 1) = dy[static_cast<size_t>(t - 1 - j)];
            }
            deterministic(r, lag) = 1.0;
        }

        const Eigen::VectorXd e_hat = ols_residuals(deterministic, dy_t);
        const Eigen::VectorXd v_hat = ols_residuals(deterministic, y_lag);

        // per-country ADF slope and innovation variance
        const double vv = v_hat.squaredNorm();
        if (vv <= 0.0) throw TooShort("llc_unit_root: zero-variance regressor for '" + country + "'");
        const double delta_i = e_hat.dot(v_hat) / vv;
        const Eigen::VectorXd resid = e_hat - delta_i * v_hat;
        const double sigma2_e = resid.squaredNorm() / static_cast<double>(t_use);
        if (sigma2_e <= 0.0) {
            throw TooShort("llc_unit_root: degenerate innovation variance for '" + country + "'");
        }
        const double sigma_e = std::sqrt(sigma2_e);

        std::vector<double> e_norm(static_cast<size_t>(rows)), v_norm(static_cast<size_t>(rows));
        for (int r = 0; r < rows; ++r) {
            e_norm[static_cast<size_t>(r)] = e_hat(r) / sigma_e;
            v_norm[static_cast<size_t>(r)] = v_hat(r) / sigma_e;
        }
        normalized.emplace_back(std::move(e_norm), std::move(v_norm));

        const double lrv = long_run_variance(dy);
        sum_s += std::sqrt(std::max(lrv, 0.0)) / sigma_e;
        total_obs += static_cast<size_t>(rows);
    }

    for (const auto& [e_norm, v_norm] : normalized) {
        for (size_t r = 0; r < e_norm.size(); ++r) {
            sum_ev += e_norm[r] * v_norm[r];
            sum_vv += v_norm[r] * v_norm[r];
        }
    }

    const double delta = sum_ev / sum_vv;
    double rss = 0.0;
    for (const auto& [e_norm, v_norm] : normalized) {
        for (size_t r = 0; r < e_norm.size(); ++r) {
            const double resid = e_norm[r] - delta * v_norm[r];
            rss += resid * resid;
        }
    }
    const double t_tilde = static_cast<double>(t_use);
    const double sigma2_pooled = rss / static_cast<double>(total_obs);
    const double se_delta = std::sqrt(sigma2_pooled / sum_vv);
    const double t_delta = delta / se_delta;

    const double s_bar = sum_s / static_cast<double>(n);
    const LlcMoments m = llc_moments(t_tilde);
    const double adjustment = static_cast<double>(n) * t_tilde * s_bar / sigma2_pooled *
                              se_delta * m.mu_star;
    const double t_star = (t_delta - adjustment) / m.sigma_star;

    TestOutcome out;
    out.statistic = t_star;
    out.p_value = normal_cdf(t_star);
    out.lags = lag;
    out.n_countries = n;
    out.n_periods = t_total;
    out.reject_5pct = out.p_value < 0.05;
    return out;
}

std::vector<TestOutcome> llc_unit_root(const SeriesPanel& panel, int max_lag) {
    std::vector<TestOutcome> out;
    out.reserve(static_cast<size_t>(max_lag) + 1);
    for (int lag = 0; lag <= max_lag; ++lag) {
        out.push_back(llc_unit_root_single(panel, lag));
    }
    return out;
}

std::map<std::string, double> dh_granger_wald(const SeriesPanel& x, const SeriesPanel& y,
                                              int lag) {
    if (lag < 1) throw InvalidConfig("dh_granger lag must be >= 1");
    check_balanced(y, static_cast<size_t>(5 + 2 * lag + 1), "dh_granger");
    check_balanced(x, static_cast<size_t>(5 + 2 * lag + 1), "dh_granger");
    if (x.size() != y.size()) {
        throw UnbalancedPanel("dh_granger: cause and effect panels list different countries");
    }

    std::map<std::string, double> wald;
    for (const auto& [country, ys] : y) {
        auto xit = x.find(country);
        if (xit == x.end()) {
            throw UnbalancedPanel("dh_granger: missing cause series for '" + country + "'");
        }
        const auto& xs = xit->second;
        if (xs.size() != ys.size()) {
            throw UnbalancedPanel("dh_granger: series lengths differ for '" + country + "'");
        }
        const int t_total = static_cast<int>(ys.size());
        const int rows = t_total - lag;
        const int k = 1 + 2 * lag;
        if (rows <= k) throw TooShort("dh_granger: too few observations for '" + country + "'");

        Eigen::MatrixXd design(rows, k);
        Eigen::VectorXd resp(rows);
        for (int r = 0; r < rows; ++r) {
            const int t = lag + r;
            resp(r) = ys[static_cast<size_t>(t)];
            design(r, 0) = 1.0;
            for (int j = 1; j <= lag; ++j) {
                design(r, j) = ys[static_cast<size_t>(t - j)];
                design(r, lag + j) = xs[static_cast<size_t>(t - j)];
            }
        }
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() < k) {
            throw TooShort("dh_granger: rank-deficient regression for '" + country + "'");
        }
        const Eigen::VectorXd beta = qr.solve(resp);
        const Eigen::VectorXd resid = resp - design * beta;
        const double sigma2 = resid.squaredNorm() / static_cast<double>(rows - k);

        const Eigen::MatrixXd xtx_inv =
            (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
        const Eigen::VectorXd gamma = beta.segment(1 + lag, lag);
        const Eigen::MatrixXd v_gamma = sigma2 * xtx_inv.block(1 + lag, 1 + lag, lag, lag);
        if (sigma2 <= 0.0) {
            // perfect fit: the exclusion restriction is violated with
            // probability one, report a divergent Wald statistic
            wald[country] = 1e12;
            continue;
        }
        wald[country] = gamma.dot(v_gamma.ldlt().solve(gamma));
    }
    return wald;
}

TestOutcome dh_granger(const SeriesPanel& x, const SeriesPanel& y, int lag) {
    const auto wald = dh_granger_wald(x, y, lag);
    const int n = static_cast<int>(wald.size());
    double w_bar = 0.0;
    for (const auto& [country, w] : wald) w_bar += w;
    w_bar /= static_cast<double>(n);

    const double z_bar =
        std::sqrt(static_cast<double>(n) / (2.0 * static_cast<double>(lag))) *
        (w_bar - static_cast<double>(lag));

    TestOutcome out;
    out.statistic = z_bar;
    out.p_value = 2.0 * (1.0 - normal_cdf(std::fabs(z_bar)));
    out.lags = lag;
    out.n_countries = n;
    out.n_periods = static_cast<int>(y.begin()->second.size());
    out.reject_5pct = out.p_value < 0.05;
    return out;
}

} // namespace fxres
