#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fxres {

// Per-country VARX with two endogenous variables (capital-flow volatility
// ordered before FX volatility) and contemporaneous exogenous controls:
//   y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + C x_t + e_t
// Member fixed effects are absorbed by the per-country intercepts.
struct VarxModel {
    std::string country;
    int lags = 4;
    std::vector<Eigen::Matrix2d> lag_coefs;  // A_1 .. A_p
    Eigen::MatrixXd exog_coefs;              // 2 x n_exog
    Eigen::Vector2d intercept = Eigen::Vector2d::Zero();
    Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();
    Eigen::MatrixXd residuals;               // t_effective x 2
    int t_effective = 0;
};

// Equation-by-equation least squares; sigma uses a degrees-of-freedom
// correction (T_eff - k). Throws SingularDesign / SeriesTooShort.
VarxModel estimate_varx(const std::string& country, const Eigen::MatrixXd& endo,
                        const Eigen::MatrixXd& exog, int p = 4);

// Unique lower-triangular B0 with positive diagonal, B0 B0' = sigma.
// Throws NotPositiveDefinite.
Eigen::MatrixXd cholesky_identify(const Eigen::MatrixXd& sigma);

// Companion-matrix stability: all eigenvalues strictly inside the unit
// circle.
bool is_stable(const VarxModel& model);

// Structural impulse responses: theta[h] (v, s) is the response of
// variable v at horizon h to a one-SD structural shock s.
std::vector<Eigen::Matrix2d> structural_irf(const VarxModel& model, const Eigen::Matrix2d& b0,
                                            int horizon);

// Response path of one variable to one shock, h = 0..H.
std::vector<double> irf_path(const VarxModel& model, const Eigen::Matrix2d& b0, int shock,
                             int variable, int horizon);

struct CountryVarData {
    std::string country;
    Eigen::MatrixXd endo; // T x 2
    Eigen::MatrixXd exog; // T x n_exog
};

// Common/idiosyncratic decomposition of the structural shocks following
// Pedroni (2013): the common shocks come from the VAR on cross-sectional
// averages, per-country loadings are diagonal, and the idiosyncratic
// remainder keeps the decomposition exactly additive.
struct ShockDecomposition {
    VarxModel common_model;
    Eigen::Matrix2d common_b0 = Eigen::Matrix2d::Identity();
    Eigen::MatrixXd common_shocks; // T_eff x 2, unit variance by construction

    std::map<std::string, VarxModel> country_models;
    std::map<std::string, Eigen::Matrix2d> country_b0;
    std::map<std::string, Eigen::MatrixXd> composite_shocks; // T_eff x 2
    std::map<std::string, Eigen::Vector2d> loadings;         // diagonal of Lambda_i
    std::map<std::string, Eigen::MatrixXd> idiosyncratic;    // T_eff x 2
    std::map<std::string, Eigen::Vector2d> idiosyncratic_sd;
    std::map<std::string, Eigen::Vector2d> orthogonality;    // corr(common, idio) per shock
};

ShockDecomposition pedroni_decompose(const std::vector<CountryVarData>& panel, int p = 4);

enum class ShockType { Composite, Global, Idiosyncratic };
const char* shock_type_name(ShockType t);

struct DecomposedIrf {
    std::vector<double> composite;
    std::vector<double> global;
    std::vector<double> idiosyncratic;
};

// Response of `variable` to the given structural shock split into its
// global and idiosyncratic components (one common SD scaled by the
// loading; one idiosyncratic SD).
DecomposedIrf decomposed_irf(const ShockDecomposition& decomp, const std::string& country,
                             int shock, int variable, int horizon);

struct QuantilePaths {
    std::vector<double> median;
    std::vector<double> p25;
    std::vector<double> p75;
};

// Pointwise type-7 quantiles across equally long paths.
QuantilePaths aggregate_irf_quantiles(const std::vector<std::vector<double>>& paths);

std::vector<double> cumulative_irf(const std::vector<double>& path);

// Sign-restriction specification; sign is +1 or -1 per (shock, variable)
// cell, imposed at the listed horizons.
struct SignSpec {
    struct Entry {
        int shock = 0;
        int variable = 0;
        int sign = +1;
    };
    std::vector<Entry> entries;
    std::vector<int> horizons{0};

    // CF-volatility shock moves CF volatility up (FX free); FX-volatility
    // shock moves both up.
    static SignSpec recursive_default();
};

struct UhligResult {
    // accepted[d][h](v, s): response of variable v to shock s
    std::vector<std::vector<Eigen::Matrix2d>> accepted;
    double acceptance_rate = 0.0;
    // pointwise summaries over accepted draws
    std::vector<Eigen::Matrix2d> median;
    std::vector<Eigen::Matrix2d> sd;
};

// Uhlig (2005)-style sign-restricted identification around a fixed
// reduced-form point estimate: Haar-distributed rotations of the Cholesky
// factor, keeping draws whose responses satisfy the sign spec at the
// restricted horizons. Throws NoAcceptedDraws.
UhligResult uhlig_sign_irf(const VarxModel& model, const SignSpec& spec, int draws,
                           uint64_t seed, int horizon);

// Weighted mean path; weights must be non-negative with a positive sum
// and are normalized internally.
std::vector<double> shock_weighted_aggregate(const std::vector<std::vector<double>>& paths,
                                             const std::vector<double>& weights);

} // namespace fxres
