#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fxres/panel.hpp"
#include "fxres/rng.hpp"
#include "fxres/spvar.hpp"

namespace fxres {

// --- generators shared by the validation suites ------------------------

// Simulate a bivariate VAR(p) with structural impact matrix b0 (shocks are
// iid standard normal) and optional exogenous regressors.
Eigen::MatrixXd simulate_var(const std::vector<Eigen::Matrix2d>& lag_coefs,
                             const Eigen::Matrix2d& b0, const Eigen::Vector2d& intercept,
                             const Eigen::MatrixXd& exog, const Eigen::MatrixXd& exog_coefs,
                             int t, Rng& rng, int burn_in = 100);

// Multi-country VAR panel with a planted one-factor shock structure:
// country shocks u_it = lambda_i * g_t + sqrt(1 - lambda_i^2 clip) * w_it.
struct FactorPanelSpec {
    int n_countries = 5;
    int t = 2000;
    int p = 1;
    std::vector<Eigen::Matrix2d> lag_coefs{Eigen::Matrix2d{{0.4, 0.1}, {0.1, 0.3}}};
    Eigen::Matrix2d b0 = Eigen::Matrix2d{{1.0, 0.0}, {0.4, 0.9}};
    std::vector<double> loadings{};   // per country; empty = all 1
    double idio_sd = 1.0;             // SD of the idiosyncratic shock component
    int n_exog = 0;
};

std::vector<CountryVarData> simulate_factor_panel(const FactorPanelSpec& spec, uint64_t seed);

// Quarterly interaction-regression DGP:
//   y_it = g0 + g1 vc_it + g2 vc_it mf_it + mu_t + eta_i + eps_it
//   eps_it = rho eps_{i,t-1} + u_it,  u_t ~ N(0, Sigma_cs)
// Sigma_cs has heteroskedastic diagonals and uniform correlation cs_corr.
struct RegressionDgpSpec {
    int n_countries = 20;
    int n_quarters = 72;
    int start_year = 2002;
    double gamma0 = 0.05;
    double gamma1 = 0.10;
    double gamma2 = -0.20;
    double rho = 0.5;
    double cs_corr = 0.3;
    double noise_sd = 0.05;
    double mf_mean = 1.0;
    double mf_sd = 0.5;
    double volcf_mean = 1.0;
    double volcf_sd = 0.4;
    double fe_sd = 0.02;
    bool center_mf = false; // force the pooled MF sample mean to mf_mean exactly
    std::string mf_name = "MF";
};

struct RegressionDgpData {
    PanelTable panel; // VolFX, VolCF and the moderating factor
    RegressionDgpSpec spec;
};

RegressionDgpData make_regression_panel(const RegressionDgpSpec& spec, uint64_t seed);

// --- full synthetic input files for the CLI pipeline --------------------

struct SynthSpec {
    int n_countries = 20;
    int n_quarters = 72;
    int start_year = 2002;
    int weeks_per_quarter = 13;

    // quarterly error/interaction structure, echoed to the truth sidecar
    double gamma0 = 0.05;
    double gamma1 = 0.10;
    double gamma2 = -0.20;
    double rho = 0.5;
    double cs_corr = 0.3;
    double noise_sd = 0.05;

    // weekly flow/FX dynamics
    double flow_vol_base = 1.0;   // baseline flow volatility scale
    double flow_vol_spread = 0.6; // weak-fundamental countries run hotter
    double fx_vol_scale = 0.8;

    bool allow_unstable = false;
};

struct SynthResult {
    PanelTable weekly;
    PanelTable quarterly;
    std::vector<CountryMeta> meta;
    std::string truth_json; // serialized ground-truth parameters
};

SynthResult synth_panel(const SynthSpec& spec, uint64_t seed);

} // namespace fxres
