#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "fxres/panel.hpp"
#include "fxres/panel_tests.hpp"

namespace fxres {

// Regression layout shared by the level and interaction specifications:
//   VolFX_it = g0 + g1 VolCF_it + g2 VolCF_it * MF_it + g3 (MFs, X) + mu_t + eta_i + e_it
struct RegressionSpec {
    std::string dependent = "VolFX";
    std::string vol_cf = "VolCF";
    std::vector<std::string> mfs;          // factor levels entering the design
    std::vector<std::string> interactions; // factors interacted with VolCF
    std::vector<std::string> controls;
    bool time_effects = true;
    bool country_effects = true;
};

struct DesignMatrix {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> column_names;
    std::vector<std::string> countries; // sorted, one block of n_periods rows each
    std::vector<Date> dates;            // sorted
    int n_countries = 0;
    int n_periods = 0;

    int column(const std::string& name) const; // -1 when absent
};

// Country-major stacked design with explicit dummies: substantive columns
// in spec order, then time dummies (first date omitted), country dummies
// (first country omitted), intercept last.
DesignMatrix build_design(const PanelTable& panel, const RegressionSpec& spec);

// Feasible GLS with panel AR(1) (Prais-Winsten, per-panel rho), then
// cross-sectional covariance weighting on the transformed sample.
struct FglsFit {
    Eigen::VectorXd beta;
    Eigen::MatrixXd v;                // (X*' Omega^-1 X*)^-1 on the transformed sample
    std::vector<std::string> names;
    std::vector<double> rho;          // per country, clamped to (-0.99, 0.99)
    Eigen::MatrixXd sigma_cs;         // N x N cross-sectional residual covariance
    Eigen::VectorXd ols_residuals;    // stage-1 pooled OLS, original scale
    Eigen::VectorXd fgls_residuals;   // y - X beta, original scale
    std::map<std::string, double> time_effects;
    std::map<std::string, double> country_effects;
    int n_countries = 0;
    int n_periods = 0;
    int iterations = 1;
    double cs_shrinkage = 0.0;        // diagonal shrinkage applied to sigma_cs, 0 = none

    int index(const std::string& name) const;
    double coefficient(const std::string& name) const;
    double std_error(const std::string& name) const;
    double p_value(const std::string& name) const; // two-sided normal
};

FglsFit fgls_fit(const DesignMatrix& design);

// W = (R b - r)' (R V R')^-1 (R b - r), chi-squared with rank(R) dof.
TestOutcome wald_test(const FglsFit& fit, const Eigen::MatrixXd& restriction,
                      const Eigen::VectorXd& value);

// H0: g1 + g2 * mf_value = 0 (the VolCF total effect at a given factor level).
TestOutcome total_effect_wald(const FglsFit& fit, const std::string& vol_cf_name,
                              const std::string& interaction_name, double mf_value);

// Significance stars at the 1/5/10% levels.
std::string significance_stars(double p_value);

} // namespace fxres
