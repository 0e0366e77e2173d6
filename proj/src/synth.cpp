#include "fxres/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "fxres/errors.hpp"

namespace fxres {

Eigen::MatrixXd simulate_var(const std::vector<Eigen::Matrix2d>& lag_coefs,
                             const Eigen::Matrix2d& b0, const Eigen::Vector2d& intercept,
                             const Eigen::MatrixXd& exog, const Eigen::MatrixXd& exog_coefs,
                             int t, Rng& rng, int burn_in) {
    const int p = static_cast<int>(lag_coefs.size());
    const int total = t + burn_in;
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(total, 2);
    for (int s = p; s < total; ++s) {
        Eigen::Vector2d mean = intercept;
        for (int j = 1; j <= p; ++j) {
            mean += lag_coefs[static_cast<size_t>(j - 1)] * y.row(s - j).transpose();
        }
        if (exog.size() > 0 && s >= burn_in) {
            mean += exog_coefs * exog.row(s - burn_in).transpose();
        }
        Eigen::Vector2d shock;
        shock << rng.normal(), rng.normal();
        y.row(s) = (mean + b0 * shock).transpose();
    }
    return y.bottomRows(t);
}

std::vector<CountryVarData> simulate_factor_panel(const FactorPanelSpec& spec, uint64_t seed) {
    const int p = spec.p;
    if (static_cast<int>(spec.lag_coefs.size()) != p) {
        throw InvalidSpec("factor panel: lag coefficient count must equal p");
    }
    std::vector<double> loadings = spec.loadings;
    if (loadings.empty()) loadings.assign(static_cast<size_t>(spec.n_countries), 1.0);
    if (static_cast<int>(loadings.size()) != spec.n_countries) {
        throw InvalidSpec("factor panel: one loading per country required");
    }

    const int burn_in = 200;
    const int total = spec.t + burn_in;

    // common structural shocks
    Rng grng(subseed(seed, "factor.common"));
    Eigen::MatrixXd g(total, 2);
    for (int s = 0; s < total; ++s) {
        g(s, 0) = grng.normal();
        g(s, 1) = grng.normal();
    }

    std::vector<CountryVarData> panel;
    panel.reserve(static_cast<size_t>(spec.n_countries));
    for (int i = 0; i < spec.n_countries; ++i) {
        Rng rng(subseed(seed, "factor.country", static_cast<uint64_t>(i)));
        const double lambda = loadings[static_cast<size_t>(i)];

        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(total, 2);
        for (int s = p; s < total; ++s) {
            Eigen::Vector2d mean = Eigen::Vector2d::Zero();
            for (int j = 1; j <= p; ++j) {
                mean += spec.lag_coefs[static_cast<size_t>(j - 1)] * y.row(s - j).transpose();
            }
            Eigen::Vector2d shock;
            shock << lambda * g(s, 0) + spec.idio_sd * rng.normal(),
                lambda * g(s, 1) + spec.idio_sd * rng.normal();
            y.row(s) = (mean + spec.b0 * shock).transpose();
        }

        CountryVarData c;
        char name[16];
        std::snprintf(name, sizeof(name), "C%02d", i + 1);
        c.country = name;
        c.endo = y.bottomRows(spec.t);
        c.exog = Eigen::MatrixXd::Zero(spec.t, spec.n_exog);
        if (spec.n_exog > 0) {
            Rng xrng(subseed(seed, "factor.exog", static_cast<uint64_t>(i)));
            for (int s = 0; s < spec.t; ++s) {
                for (int e = 0; e < spec.n_exog; ++e) c.exog(s, e) = xrng.normal();
            }
        }
        panel.push_back(std::move(c));
    }
    return panel;
}

namespace {

std::vector<Date> quarterly_dates(int start_year, int n_quarters) {
    std::vector<Date> dates;
    dates.reserve(static_cast<size_t>(n_quarters));
    int y = start_year;
    int q = 0;
    for (int i = 0; i < n_quarters; ++i) {
        static constexpr int month[] = {3, 6, 9, 12};
        static constexpr int day[] = {31, 30, 30, 31};
        dates.push_back(make_date(y, month[q], day[q]));
        if (++q == 4) {
            q = 0;
            ++y;
        }
    }
    return dates;
}

std::string country_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "C%02d", i + 1);
    return buf;
}

// Cholesky factor of the heteroskedastic equicorrelated covariance used
// for the cross-sectional innovations.
Eigen::MatrixXd cs_covariance_chol(int n, double base_sd, double corr) {
    Eigen::VectorXd sd(n);
    for (int i = 0; i < n; ++i) {
        sd(i) = base_sd * (0.5 + static_cast<double>(i) / std::max(1, n - 1));
    }
    Eigen::MatrixXd sigma(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            sigma(i, j) = (i == j ? 1.0 : corr) * sd(i) * sd(j);
        }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw InvalidSpec("cross-sectional covariance is not positive definite");
    }
    return llt.matrixL();
}

} // namespace

RegressionDgpData make_regression_panel(const RegressionDgpSpec& spec, uint64_t seed) {
    const int n = spec.n_countries;
    const int t = spec.n_quarters;
    if (n < 2 || t < 8) throw InvalidSpec("regression DGP needs n>=2, t>=8");
    if (std::fabs(spec.rho) >= 1.0) throw InvalidSpec("regression DGP needs |rho| < 1");

    const auto dates = quarterly_dates(spec.start_year, t);
    const Eigen::MatrixXd chol = cs_covariance_chol(n, spec.noise_sd, spec.cs_corr);

    Rng rng(subseed(seed, "regdgp"));

    // fixed effects
    std::vector<double> mu(static_cast<size_t>(t)), eta(static_cast<size_t>(n));
    for (auto& v : mu) v = rng.normal(0.0, spec.fe_sd);
    for (auto& v : eta) v = rng.normal(0.0, spec.fe_sd);

    // regressors
    Eigen::MatrixXd vc(n, t), mf(n, t);
    for (int i = 0; i < n; ++i) {
        for (int s = 0; s < t; ++s) {
            vc(i, s) = std::fabs(rng.normal(spec.volcf_mean, spec.volcf_sd));
            mf(i, s) = rng.normal(spec.mf_mean, spec.mf_sd);
        }
    }
    if (spec.center_mf) {
        const double shift = spec.mf_mean - mf.mean();
        mf.array() += shift;
    }

    // AR(1) errors with cross-sectional correlation, stationary start
    Eigen::MatrixXd eps(n, t);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    eps.col(0) = chol * z / std::sqrt(1.0 - spec.rho * spec.rho);
    for (int s = 1; s < t; ++s) {
        for (int i = 0; i < n; ++i) z(i) = rng.normal();
        eps.col(s) = spec.rho * eps.col(s - 1) + chol * z;
    }

    std::vector<Observation> obs;
    obs.reserve(static_cast<size_t>(3 * n * t));
    for (int i = 0; i < n; ++i) {
        const std::string country = country_name(i);
        for (int s = 0; s < t; ++s) {
            const double y = spec.gamma0 + spec.gamma1 * vc(i, s) +
                             spec.gamma2 * vc(i, s) * mf(i, s) + mu[static_cast<size_t>(s)] +
                             eta[static_cast<size_t>(i)] + eps(i, s);
            obs.push_back({country, dates[static_cast<size_t>(s)], "VolFX", y});
            obs.push_back({country, dates[static_cast<size_t>(s)], "VolCF", vc(i, s)});
            obs.push_back({country, dates[static_cast<size_t>(s)], spec.mf_name, mf(i, s)});
        }
    }

    RegressionDgpData out;
    out.panel = PanelTable::from_observations(std::move(obs), Frequency::Quarterly);
    out.spec = spec;
    return out;
}

SynthResult synth_panel(const SynthSpec& spec, uint64_t seed) {
    const int n = spec.n_countries;
    const int nq = spec.n_quarters;
    if (n < 6) throw InvalidSpec("synth panel needs at least 6 countries");
    if (nq < 8) throw InvalidSpec("synth panel needs at least 8 quarters");
    if (std::fabs(spec.rho) >= 1.0 && !spec.allow_unstable) {
        throw InvalidSpec("requested error autocorrelation is non-stationary");
    }

    const auto qdates = quarterly_dates(spec.start_year, nq);

    // weekly grid: every Friday inside the quarterly sample span
    Date first_friday = make_date(spec.start_year, 1, 1);
    while (weekday(first_friday) != 5) first_friday.days += 1;
    std::vector<Date> wdates;
    std::vector<int> week_quarter; // index into qdates per week
    for (Date d = first_friday; d <= qdates.back(); d.days += 7) {
        const int q = quarter_index(d) - quarter_index(qdates.front());
        wdates.push_back(d);
        week_quarter.push_back(q);
    }
    const int weeks = static_cast<int>(wdates.size());

    // country typology: alternate regimes, and within each regime plant a
    // strong and a weak fundamentals group
    std::vector<CountryMeta> meta(static_cast<size_t>(n));
    std::vector<bool> strong(static_cast<size_t>(n));
    Rng meta_rng(subseed(seed, "synth.meta"));
    for (int i = 0; i < n; ++i) {
        auto& m = meta[static_cast<size_t>(i)];
        m.country = country_name(i);
        const bool free_float = i % 2 == 0;
        strong[static_cast<size_t>(i)] = (i / 2) % 2 == 0;
        m.fx_regime_index = free_float ? 6.0 : 1.0 + static_cast<double>(i % 5);
        if (!free_float && m.fx_regime_index >= 6.0) m.fx_regime_index = 5.0;
        m.economy_class = strong[static_cast<size_t>(i)] ? EconomyClass::AE : EconomyClass::EME;
        m.capital_control_index =
            std::clamp(meta_rng.uniform(0.0, 1.0) * (strong[static_cast<size_t>(i)] ? 0.4 : 1.0),
                       0.0, 1.0);
    }

    // --- weekly block ----------------------------------------------------
    std::vector<Observation> wobs;
    wobs.reserve(static_cast<size_t>(weeks) * static_cast<size_t>(n) * 5);

    // global series
    Rng grng(subseed(seed, "synth.global"));
    std::vector<double> vix(static_cast<size_t>(weeks));
    std::vector<double> commodity(static_cast<size_t>(weeks));
    std::vector<double> vol_factor(static_cast<size_t>(weeks)); // common log-vol factor
    double v = 20.0, h = 0.0;
    for (int w = 0; w < weeks; ++w) {
        v = 20.0 + 0.9 * (v - 20.0) + 1.5 * grng.normal();
        v = std::max(v, 5.0);
        vix[static_cast<size_t>(w)] = v;
        commodity[static_cast<size_t>(w)] = grng.normal(0.0, 1.5);
        h = 0.93 * h + 0.25 * grng.normal();
        vol_factor[static_cast<size_t>(w)] = h;
    }

    // per-country weekly series, kept for the quarterly aggregates below
    std::vector<std::vector<double>> flows(static_cast<size_t>(n));
    std::vector<std::vector<double>> equity(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::string country = country_name(i);
        Rng rng(subseed(seed, "synth.weekly", static_cast<uint64_t>(i)));
        const double vol_scale =
            spec.flow_vol_base +
            (strong[static_cast<size_t>(i)] ? 0.0 : spec.flow_vol_spread);
        const double beta_common = strong[static_cast<size_t>(i)] ? 0.4 : 0.9;

        auto& flow_series = flows[static_cast<size_t>(i)];
        auto& equity_series = equity[static_cast<size_t>(i)];
        flow_series.resize(static_cast<size_t>(weeks));
        equity_series.resize(static_cast<size_t>(weeks));

        double fx_level = 100.0 * std::exp(rng.normal(0.0, 0.05));
        for (int w = 0; w < weeks; ++w) {
            const Date d = wdates[static_cast<size_t>(w)];
            const double sigma =
                vol_scale * std::exp(0.5 * beta_common * vol_factor[static_cast<size_t>(w)]);
            const double flow = sigma * rng.normal();
            const double fx_ret =
                0.01 * spec.fx_vol_scale * sigma * rng.normal(); // vol passthrough
            fx_level *= std::exp(fx_ret);
            const double equity_ret = rng.normal(0.1, 2.0);
            flow_series[static_cast<size_t>(w)] = flow;
            equity_series[static_cast<size_t>(w)] = equity_ret;

            wobs.push_back({country, d, "CapitalFlow", flow});
            wobs.push_back({country, d, "FxIndex", fx_level});
            wobs.push_back({country, d, "EquityReturn", equity_ret});
            wobs.push_back({country, d, "VIX", vix[static_cast<size_t>(w)]});
            wobs.push_back({country, d, "CommodityReturn", commodity[static_cast<size_t>(w)]});
        }
    }

    // --- quarterly block -------------------------------------------------
    struct FactorLevels {
        const char* name;
        double weak;
        double strong;
        double wiggle;
    };
    static constexpr FactorLevels factor_levels[] = {
        {"RealGDPGrowth", 1.2, 0.6, 0.4},       {"TradeOpenness", 12.0, 40.0, 3.0},
        {"FXReserves", 0.3, 1.2, 0.15},         {"TFI", 0.5, 3.0, 0.5},
        {"CreditPrivate", 85.0, 170.0, 10.0},   {"ShortRate", 5.0, 1.0, 0.8},
        {"FiscalSurplus", -0.7, 0.4, 0.3},      {"FinancialDevelopment", 0.5, 0.9, 0.05},
    };

    std::vector<Observation> qobs;
    const Eigen::MatrixXd chol = cs_covariance_chol(n, spec.noise_sd, spec.cs_corr);
    for (int i = 0; i < n; ++i) {
        const std::string country = country_name(i);
        Rng rng(subseed(seed, "synth.quarterly", static_cast<uint64_t>(i)));
        const bool is_strong = strong[static_cast<size_t>(i)];
        for (const auto& f : factor_levels) {
            const double base = (is_strong ? f.strong : f.weak) * (1.0 + 0.1 * rng.normal());
            double level = base;
            for (int q = 0; q < nq; ++q) {
                level = base + 0.8 * (level - base) + f.wiggle * 0.3 * rng.normal();
                qobs.push_back({country, qdates[static_cast<size_t>(q)], f.name, level});
            }
        }
        const auto& m = meta[static_cast<size_t>(i)];
        for (int q = 0; q < nq; ++q) {
            qobs.push_back({country, qdates[static_cast<size_t>(q)], "FXRegime",
                            m.fx_regime_index});
            qobs.push_back({country, qdates[static_cast<size_t>(q)], "CapitalControl",
                            m.capital_control_index});
        }
    }

    // quarterly aggregates of the weekly series keep the two files coherent:
    // flows and equity returns sum within the quarter, VIX averages
    for (int i = 0; i < n; ++i) {
        const std::string country = country_name(i);
        std::vector<double> flow_sum(static_cast<size_t>(nq), 0.0);
        std::vector<double> equity_sum(static_cast<size_t>(nq), 0.0);
        std::vector<double> vix_sum(static_cast<size_t>(nq), 0.0);
        std::vector<int> week_count(static_cast<size_t>(nq), 0);
        for (int w = 0; w < weeks; ++w) {
            const auto q = static_cast<size_t>(week_quarter[static_cast<size_t>(w)]);
            flow_sum[q] += flows[static_cast<size_t>(i)][static_cast<size_t>(w)];
            equity_sum[q] += equity[static_cast<size_t>(i)][static_cast<size_t>(w)];
            vix_sum[q] += vix[static_cast<size_t>(w)];
            week_count[q] += 1;
        }
        for (int q = 0; q < nq; ++q) {
            const Date d = qdates[static_cast<size_t>(q)];
            qobs.push_back({country, d, "CapitalFlow", flow_sum[static_cast<size_t>(q)]});
            qobs.push_back({country, d, "EquityReturn", equity_sum[static_cast<size_t>(q)]});
            qobs.push_back({country, d, "VIX",
                            vix_sum[static_cast<size_t>(q)] /
                                static_cast<double>(week_count[static_cast<size_t>(q)])});
        }
    }

    SynthResult out;
    out.weekly = PanelTable::from_observations(std::move(wobs), Frequency::Weekly);
    out.quarterly = PanelTable::from_observations(std::move(qobs), Frequency::Quarterly);
    out.meta = meta;

    nlohmann::json truth;
    truth["n_countries"] = n;
    truth["n_quarters"] = nq;
    truth["weeks_per_quarter"] = spec.weeks_per_quarter;
    truth["gamma0"] = spec.gamma0;
    truth["gamma1"] = spec.gamma1;
    truth["gamma2"] = spec.gamma2;
    truth["rho"] = spec.rho;
    truth["cs_corr"] = spec.cs_corr;
    truth["noise_sd"] = spec.noise_sd;
    truth["flow_vol_base"] = spec.flow_vol_base;
    truth["flow_vol_spread"] = spec.flow_vol_spread;
    truth["fx_vol_scale"] = spec.fx_vol_scale;
    truth["strong_countries"] = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        if (strong[static_cast<size_t>(i)]) truth["strong_countries"].push_back(country_name(i));
    }
    out.truth_json = truth.dump(2) + "\n";
    return out;
}

} // namespace fxres
