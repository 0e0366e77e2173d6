#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fxres/dates.hpp"
#include "fxres/panel.hpp"

namespace fxres {

// g1 + g2 * mf: the marginal effect of CF volatility on FX volatility at a
// given moderating-factor level.
double total_effect(double gamma1, double gamma2, double mf_value);

enum class ThresholdDirection { GreaterThan, LessThan };
const char* threshold_direction_name(ThresholdDirection d);

struct ThresholdResult {
    double value = 0.0;
    ThresholdDirection direction = ThresholdDirection::GreaterThan;
};

// The factor level at which the total effect reaches theta:
// (theta - g1) / g2. Mitigating factors (g2 < 0) must exceed it,
// aggravating factors must stay below it.
ThresholdResult threshold(double gamma1, double gamma2, double theta);

// Delta-method standard error with gradient (-1/g2, -(theta-g1)/g2^2).
double threshold_se(double gamma1, double gamma2, double theta, const Eigen::Matrix2d& v_gamma);

struct PcaLoadings {
    std::vector<std::string> factors;
    Eigen::VectorXd loadings;      // unit norm, positive loading sum
    double explained_share = 0.0;  // leading eigenvalue / trace
};

// Leading eigenvector of the column sample covariance. Columns are
// expected to be min-max normalized upstream.
PcaLoadings pca_first_component(const Eigen::MatrixXd& data,
                                const std::vector<std::string>& factors);

// Loading-weighted sum of the normalized factors per (country, date);
// the composite is a raw weighted sum, not re-centered.
std::map<std::pair<std::string, Date>, double> pc1mf(const PanelTable& normalized_panel,
                                                     const PcaLoadings& loadings);

struct ResilienceScore {
    std::string country;
    double pc1mf_median = 0.0;
    double score = 0.0; // more negative = more resilient
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    int rank = 0;
};

ResilienceScore resilience(const std::string& country, double gamma1, double gamma2,
                           double pc1mf_median);

// score +- z * sqrt([1, m] V [1, m]'), default 90% coverage.
void resilience_ci(ResilienceScore& score, const Eigen::Matrix2d& v_gamma, double level = 0.90);

// Ranks ascending by (score, country); rank 1 = most resilient.
void rank_scores(std::vector<ResilienceScore>& scores);

// Per-factor share of the composite: w_m * mf_m / sum, in percent.
std::map<std::string, double> contributions(const PcaLoadings& loadings,
                                            const std::map<std::string, double>& factor_values);

// Number of factors attaining their thresholds (inclusive comparisons).
int supporting_factor_count(std::span<const double> values, std::span<const double> thresholds,
                            std::span<const ThresholdDirection> directions);

// Percentage change between two periods of the FX-per-CF volatility ratio:
// 100 * [(Vb/Cb) - (Va/Ca)] / (Va/Ca).
double market_based_resilience(std::span<const std::pair<Date, double>> vol_fx,
                               std::span<const std::pair<Date, double>> vol_cf, Date a_start,
                               Date a_end, Date b_start, Date b_end);

} // namespace fxres
