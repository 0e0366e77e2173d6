#include "fxres/resilience.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "fxres/errors.hpp"
#include "fxres/kernels.hpp"
#include "fxres/stats.hpp"

namespace fxres {

double total_effect(double gamma1, double gamma2, double mf_value) {
    return gamma1 + gamma2 * mf_value;
}

const char* threshold_direction_name(ThresholdDirection d) {
    return d == ThresholdDirection::GreaterThan ? "greater_than" : "less_than";
}

ThresholdResult threshold(double gamma1, double gamma2, double theta) {
    if (gamma2 == 0.0) {
        throw ZeroGamma2("threshold undefined when the interaction coefficient is zero");
    }
    ThresholdResult out;
    out.value = (theta - gamma1) / gamma2;
    out.direction =
        gamma2 < 0.0 ? ThresholdDirection::GreaterThan : ThresholdDirection::LessThan;
    return out;
}

double threshold_se(double gamma1, double gamma2, double theta,
                    const Eigen::Matrix2d& v_gamma) {
    if (gamma2 == 0.0) {
        throw ZeroGamma2("threshold SE undefined when the interaction coefficient is zero");
    }
    Eigen::Vector2d g;
    g(0) = -1.0 / gamma2;
    g(1) = -(theta - gamma1) / (gamma2 * gamma2);
    const double var = g.dot(v_gamma * g);
    if (var < -1e-12) {
        throw NegativeVariance("coefficient covariance is not positive semi-definite");
    }
    return std::sqrt(std::max(var, 0.0));
}

PcaLoadings pca_first_component(const Eigen::MatrixXd& data,
                                const std::vector<std::string>& factors) {
    const Eigen::Index n = data.rows();
    const Eigen::Index m = data.cols();
    if (static_cast<size_t>(m) != factors.size()) {
        throw InvalidConfig("pca_first_component: factor-name count mismatch");
    }
    if (n <= m) {
        throw InvalidConfig("pca_first_component: need more observations than factors");
    }
    const Eigen::RowVectorXd col_means = data.colwise().mean();
    const Eigen::MatrixXd centered = data.rowwise() - col_means;
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(n - 1);
    if (cov.cwiseAbs().maxCoeff() <= 0.0) {
        throw DegenerateCovariance("all columns are constant");
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw DegenerateCovariance("eigendecomposition failed");
    }
    PcaLoadings out;
    out.factors = factors;
    out.loadings = eig.eigenvectors().col(m - 1); // largest eigenvalue last
    out.loadings.normalize();
    if (out.loadings.sum() < 0.0) out.loadings = -out.loadings;
    const double trace = eig.eigenvalues().sum();
    out.explained_share = trace > 0.0 ? eig.eigenvalues()(m - 1) / trace : 0.0;
    return out;
}

std::map<std::pair<std::string, Date>, double> pc1mf(const PanelTable& normalized_panel,
                                                     const PcaLoadings& loadings) {
    for (const auto& f : loadings.factors) {
        if (!normalized_panel.has_variable(f)) {
            throw MissingFactor("composite factor input '" + f + "' not in panel");
        }
    }
    std::map<std::pair<std::string, Date>, double> out;
    const auto countries = normalized_panel.countries();
    const auto dates = normalized_panel.dates();
    std::vector<double> mf(loadings.factors.size());
    const std::span<const double> w(loadings.loadings.data(),
                                    static_cast<size_t>(loadings.loadings.size()));
    for (const auto& country : countries) {
        for (const Date date : dates) {
            bool complete = true;
            for (size_t i = 0; i < loadings.factors.size(); ++i) {
                const auto v = normalized_panel.value_at(country, date, loadings.factors[i]);
                if (!v) {
                    complete = false;
                    break;
                }
                mf[i] = *v;
            }
            if (!complete) continue;
            out[{country, date}] = kernels::dot(w, mf);
        }
    }
    return out;
}

ResilienceScore resilience(const std::string& country, double gamma1, double gamma2,
                           double pc1mf_median) {
    ResilienceScore out;
    out.country = country;
    out.pc1mf_median = pc1mf_median;
    out.score = total_effect(gamma1, gamma2, pc1mf_median);
    out.ci_lo = out.score;
    out.ci_hi = out.score;
    return out;
}

void resilience_ci(ResilienceScore& score, const Eigen::Matrix2d& v_gamma, double level) {
    Eigen::Vector2d g;
    g(0) = 1.0;
    g(1) = score.pc1mf_median;
    const double var = g.dot(v_gamma * g);
    if (var < -1e-12) {
        throw NegativeVariance("coefficient covariance is not positive semi-definite");
    }
    const double se = std::sqrt(std::max(var, 0.0));
    const double z = normal_quantile(0.5 + level / 2.0);
    score.ci_lo = score.score - z * se;
    score.ci_hi = score.score + z * se;
}

void rank_scores(std::vector<ResilienceScore>& scores) {
    std::sort(scores.begin(), scores.end(),
              [](const ResilienceScore& a, const ResilienceScore& b) {
                  if (a.score != b.score) return a.score < b.score;
                  return a.country < b.country;
              });
    for (size_t i = 0; i < scores.size(); ++i) scores[i].rank = static_cast<int>(i) + 1;
}

std::map<std::string, double> contributions(const PcaLoadings& loadings,
                                            const std::map<std::string, double>& factor_values) {
    std::vector<double> parts(loadings.factors.size());
    double composite = 0.0;
    for (size_t i = 0; i < loadings.factors.size(); ++i) {
        auto it = factor_values.find(loadings.factors[i]);
        if (it == factor_values.end()) {
            throw MissingFactor("no value for factor '" + loadings.factors[i] + "'");
        }
        parts[i] = loadings.loadings(static_cast<Eigen::Index>(i)) * it->second;
        composite += parts[i];
    }
    if (!(composite > 0.0)) {
        throw NonPositiveComposite("composite factor must be positive for shares");
    }
    std::map<std::string, double> out;
    for (size_t i = 0; i < loadings.factors.size(); ++i) {
        out[loadings.factors[i]] = 100.0 * parts[i] / composite;
    }
    return out;
}

int supporting_factor_count(std::span<const double> values, std::span<const double> thresholds,
                            std::span<const ThresholdDirection> directions) {
    if (values.size() != thresholds.size() || values.size() != directions.size()) {
        throw InvalidConfig("supporting_factor_count: size mismatch");
    }
    int count = 0;
    for (size_t i = 0; i < values.size(); ++i) {
        const bool attained = directions[i] == ThresholdDirection::GreaterThan
                                  ? values[i] >= thresholds[i]
                                  : values[i] <= thresholds[i];
        if (attained) ++count;
    }
    return count;
}

namespace {

double period_mean(std::span<const std::pair<Date, double>> series, Date start, Date end,
                   const char* what) {
    double sum = 0.0;
    size_t n = 0;
    for (const auto& [d, v] : series) {
        if (d < start || d > end) continue;
        sum += v;
        ++n;
    }
    if (n == 0) {
        throw EmptyPeriod(std::string(what) + ": no observations in [" +
                          format_iso_date(start) + ", " + format_iso_date(end) + "]");
    }
    return sum / static_cast<double>(n);
}

} // namespace

double market_based_resilience(std::span<const std::pair<Date, double>> vol_fx,
                               std::span<const std::pair<Date, double>> vol_cf, Date a_start,
                               Date a_end, Date b_start, Date b_end) {
    const double fx_a = period_mean(vol_fx, a_start, a_end, "VolFX period A");
    const double fx_b = period_mean(vol_fx, b_start, b_end, "VolFX period B");
    const double cf_a = period_mean(vol_cf, a_start, a_end, "VolCF period A");
    const double cf_b = period_mean(vol_cf, b_start, b_end, "VolCF period B");
    if (!(cf_a > 0.0) || !(cf_b > 0.0)) {
        throw ZeroCfVol("period-mean CF volatility must be positive");
    }
    const double ratio_a = fx_a / cf_a;
    const double ratio_b = fx_b / cf_b;
    return 100.0 * (ratio_b - ratio_a) / ratio_a;
}

} // namespace fxres
