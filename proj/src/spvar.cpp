#include "fxres/spvar.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "fxres/errors.hpp"
#include "fxres/kernels.hpp"
#include "fxres/rng.hpp"
#include "fxres/stats.hpp"

namespace fxres {

VarxModel estimate_varx(const std::string& country, const Eigen::MatrixXd& endo,
                        const Eigen::MatrixXd& exog, int p) {
    if (endo.cols() != 2) throw InvalidConfig("estimate_varx expects two endogenous columns");
    const Eigen::Index t_total = endo.rows();
    if (exog.rows() != t_total) {
        throw InvalidConfig("endogenous and exogenous sample lengths differ");
    }
    const Eigen::Index n_exog = exog.cols();
    const Eigen::Index k = 1 + 2 * p + n_exog;
    if (t_total <= 10 * p || t_total - p <= k) {
        throw SeriesTooShort(country + ": " + std::to_string(t_total) +
                             " observations for VARX(" + std::to_string(p) + ")");
    }

    const Eigen::Index t_eff = t_total - p;
    Eigen::MatrixXd design(t_eff, k);
    Eigen::MatrixXd response(t_eff, 2);
    for (Eigen::Index t = 0; t < t_eff; ++t) {
        const Eigen::Index row = t + p;
        design(t, 0) = 1.0;
        for (int lag = 1; lag <= p; ++lag) {
            design(t, 1 + 2 * (lag - 1)) = endo(row - lag, 0);
            design(t, 2 + 2 * (lag - 1)) = endo(row - lag, 1);
        }
        design.block(t, 1 + 2 * p, 1, n_exog) = exog.row(row);
        response.row(t) = endo.row(row);
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < k) {
        throw SingularDesign(country + ": VARX design matrix is rank deficient (rank " +
                             std::to_string(qr.rank()) + " of " + std::to_string(k) + ")");
    }
    const Eigen::MatrixXd beta = qr.solve(response); // k x 2

    VarxModel model;
    model.country = country;
    model.lags = p;
    model.intercept = beta.row(0).transpose();
    model.lag_coefs.resize(static_cast<size_t>(p));
    for (int lag = 1; lag <= p; ++lag) {
        Eigen::Matrix2d a;
        // beta rows hold regressor coefficients; transpose into A_lag
        a.col(0) = beta.row(1 + 2 * (lag - 1)).transpose();
        a.col(1) = beta.row(2 + 2 * (lag - 1)).transpose();
        model.lag_coefs[static_cast<size_t>(lag - 1)] = a;
    }
    model.exog_coefs = beta.bottomRows(n_exog).transpose();

    model.residuals = response - design * beta;
    model.t_effective = static_cast<int>(t_eff);
    const double dof = static_cast<double>(t_eff - k);
    model.sigma = (model.residuals.transpose() * model.residuals) / dof;
    // enforce exact symmetry against round-off
    model.sigma = 0.5 * (model.sigma + model.sigma.transpose()).eval();
    return model;
}

Eigen::MatrixXd cholesky_identify(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols()) throw NotPositiveDefinite("covariance must be square");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + sigma.cwiseAbs().maxCoeff())) {
        throw NotPositiveDefinite("covariance is not symmetric");
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("covariance is not positive definite");
    }
    Eigen::MatrixXd b0 = llt.matrixL();
    for (Eigen::Index i = 0; i < b0.rows(); ++i) {
        if (!(b0(i, i) > 0.0)) {
            throw NotPositiveDefinite("covariance is singular on the diagonal");
        }
    }
    return b0;
}

namespace {

Eigen::MatrixXd companion_matrix(const VarxModel& model) {
    const int p = model.lags;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(2 * p, 2 * p);
    for (int lag = 0; lag < p; ++lag) {
        comp.block(0, 2 * lag, 2, 2) = model.lag_coefs[static_cast<size_t>(lag)];
    }
    if (p > 1) {
        comp.block(2, 0, 2 * (p - 1), 2 * (p - 1)) =
            Eigen::MatrixXd::Identity(2 * (p - 1), 2 * (p - 1));
    }
    return comp;
}

// Reduced-form MA coefficients Psi_0 = I, Psi_h = sum_j A_j Psi_{h-j}.
std::vector<Eigen::Matrix2d> ma_coefficients(const VarxModel& model, int horizon) {
    std::vector<Eigen::Matrix2d> psi(static_cast<size_t>(horizon) + 1);
    psi[0] = Eigen::Matrix2d::Identity();
    const int p = model.lags;
    for (int h = 1; h <= horizon; ++h) {
        Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
        for (int j = 1; j <= std::min(h, p); ++j) {
            acc += model.lag_coefs[static_cast<size_t>(j - 1)] * psi[static_cast<size_t>(h - j)];
        }
        psi[static_cast<size_t>(h)] = acc;
    }
    return psi;
}

} // namespace

bool is_stable(const VarxModel& model) {
    const Eigen::MatrixXd comp = companion_matrix(model);
    const Eigen::VectorXcd eig = comp.eigenvalues();
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        if (std::abs(eig(i)) >= 1.0) return false;
    }
    return true;
}

std::vector<Eigen::Matrix2d> structural_irf(const VarxModel& model, const Eigen::Matrix2d& b0,
                                            int horizon) {
    const auto psi = ma_coefficients(model, horizon);
    std::vector<Eigen::Matrix2d> theta(psi.size());
    for (size_t h = 0; h < psi.size(); ++h) theta[h] = psi[h] * b0;
    return theta;
}

std::vector<double> irf_path(const VarxModel& model, const Eigen::Matrix2d& b0, int shock,
                             int variable, int horizon) {
    const auto theta = structural_irf(model, b0, horizon);
    std::vector<double> path(theta.size());
    for (size_t h = 0; h < theta.size(); ++h) path[h] = theta[h](variable, shock);
    return path;
}

ShockDecomposition pedroni_decompose(const std::vector<CountryVarData>& panel, int p) {
    if (panel.size() < 3) {
        throw InvalidConfig("pedroni_decompose needs at least 3 countries, got " +
                            std::to_string(panel.size()));
    }
    const Eigen::Index t_total = panel.front().endo.rows();
    const Eigen::Index n_exog = panel.front().exog.cols();
    for (const auto& c : panel) {
        if (c.endo.rows() != t_total || c.exog.rows() != t_total || c.exog.cols() != n_exog) {
            throw InvalidConfig("pedroni_decompose requires a common time span");
        }
    }

    // cross-sectional averages
    Eigen::MatrixXd avg_endo = Eigen::MatrixXd::Zero(t_total, 2);
    Eigen::MatrixXd avg_exog = Eigen::MatrixXd::Zero(t_total, n_exog);
    for (const auto& c : panel) {
        avg_endo += c.endo;
        avg_exog += c.exog;
    }
    avg_endo /= static_cast<double>(panel.size());
    avg_exog /= static_cast<double>(panel.size());

    ShockDecomposition out;
    out.common_model = estimate_varx("cross-sectional-average", avg_endo, avg_exog, p);
    out.common_b0 = cholesky_identify(out.common_model.sigma);
    // structural shocks: u_t = B0^{-1} e_t, unit variance by construction
    out.common_shocks =
        out.common_b0.triangularView<Eigen::Lower>()
            .solve(out.common_model.residuals.transpose())
            .transpose();

    const Eigen::Index t_eff = out.common_shocks.rows();
    for (const auto& c : panel) {
        VarxModel model = estimate_varx(c.country, c.endo, c.exog, p);
        const Eigen::Matrix2d b0 = cholesky_identify(model.sigma);
        Eigen::MatrixXd composite =
            b0.triangularView<Eigen::Lower>().solve(model.residuals.transpose()).transpose();

        Eigen::Vector2d lambda;
        Eigen::MatrixXd idio(t_eff, 2);
        Eigen::Vector2d idio_sd;
        Eigen::Vector2d orth;
        for (int j = 0; j < 2; ++j) {
            const auto common_j = out.common_shocks.col(j);
            const auto comp_j = composite.col(j);
            const double denom = common_j.squaredNorm();
            lambda(j) = denom > 0.0 ? comp_j.dot(common_j) / denom : 0.0;
            idio.col(j) = comp_j - lambda(j) * common_j;

            std::vector<double> iv(idio.col(j).data(), idio.col(j).data() + t_eff);
            idio_sd(j) = sample_sd(iv);
            // sample correlation between common and idiosyncratic shocks
            std::vector<double> cv(common_j.data(), common_j.data() + t_eff);
            const double mc = mean(cv);
            const double mi = mean(iv);
            double cov = 0.0;
            for (Eigen::Index t = 0; t < t_eff; ++t) {
                cov += (cv[static_cast<size_t>(t)] - mc) * (iv[static_cast<size_t>(t)] - mi);
            }
            const double sdc = sample_sd(cv);
            const double sdi = idio_sd(j);
            orth(j) = (sdc > 0.0 && sdi > 0.0)
                          ? cov / (static_cast<double>(t_eff - 1) * sdc * sdi)
                          : 0.0;
        }

        out.country_b0[c.country] = b0;
        out.composite_shocks[c.country] = std::move(composite);
        out.loadings[c.country] = lambda;
        out.idiosyncratic[c.country] = std::move(idio);
        out.idiosyncratic_sd[c.country] = idio_sd;
        out.orthogonality[c.country] = orth;
        out.country_models[c.country] = std::move(model);
    }
    return out;
}

const char* shock_type_name(ShockType t) {
    switch (t) {
        case ShockType::Composite: return "composite";
        case ShockType::Global: return "global";
        case ShockType::Idiosyncratic: return "idiosyncratic";
    }
    return "composite";
}

DecomposedIrf decomposed_irf(const ShockDecomposition& decomp, const std::string& country,
                             int shock, int variable, int horizon) {
    auto model_it = decomp.country_models.find(country);
    if (model_it == decomp.country_models.end()) {
        throw MissingDecomposition("no decomposition for country '" + country + "'");
    }
    const Eigen::Matrix2d b0 = decomp.country_b0.at(country);
    const Eigen::Vector2d lambda = decomp.loadings.at(country);
    const Eigen::Vector2d idio_sd = decomp.idiosyncratic_sd.at(country);

    DecomposedIrf out;
    out.composite = irf_path(model_it->second, b0, shock, variable, horizon);
    out.global.resize(out.composite.size());
    out.idiosyncratic.resize(out.composite.size());
    for (size_t h = 0; h < out.composite.size(); ++h) {
        out.global[h] = lambda(shock) * out.composite[h];
        out.idiosyncratic[h] = idio_sd(shock) * out.composite[h];
    }
    return out;
}

QuantilePaths aggregate_irf_quantiles(const std::vector<std::vector<double>>& paths) {
    if (paths.size() < 2) {
        throw InvalidConfig("aggregate_irf_quantiles needs at least 2 paths");
    }
    const size_t n_h = paths.front().size();
    for (const auto& p : paths) {
        if (p.size() != n_h) {
            throw HorizonMismatch("paths have different horizons: " + std::to_string(p.size()) +
                                  " vs " + std::to_string(n_h));
        }
    }
    QuantilePaths out;
    out.median.resize(n_h);
    out.p25.resize(n_h);
    out.p75.resize(n_h);
    for (size_t h = 0; h < n_h; ++h) {
        std::vector<double> slice(paths.size());
        for (size_t i = 0; i < paths.size(); ++i) slice[i] = paths[i][h];
        out.p25[h] = quantile_type7(slice, 0.25);
        out.median[h] = quantile_type7(slice, 0.50);
        out.p75[h] = quantile_type7(slice, 0.75);
    }
    return out;
}

std::vector<double> cumulative_irf(const std::vector<double>& path) {
    std::vector<double> out(path.size());
    double acc = 0.0;
    for (size_t h = 0; h < path.size(); ++h) {
        acc += path[h];
        out[h] = acc;
    }
    return out;
}

SignSpec SignSpec::recursive_default() {
    SignSpec spec;
    spec.entries = {{0, 0, +1}, {1, 0, +1}, {1, 1, +1}};
    spec.horizons = {0};
    return spec;
}

UhligResult uhlig_sign_irf(const VarxModel& model, const SignSpec& spec, int draws,
                           uint64_t seed, int horizon) {
    for (size_t i = 0; i < spec.entries.size(); ++i) {
        for (size_t j = i + 1; j < spec.entries.size(); ++j) {
            const auto& a = spec.entries[i];
            const auto& b = spec.entries[j];
            if (a.shock == b.shock && a.variable == b.variable && a.sign != b.sign) {
                throw NoAcceptedDraws("contradictory sign restrictions on shock " +
                                      std::to_string(a.shock) + ", variable " +
                                      std::to_string(a.variable));
            }
        }
    }
    int max_restricted = 0;
    for (int h : spec.horizons) max_restricted = std::max(max_restricted, h);

    const Eigen::Matrix2d b0 = cholesky_identify(model.sigma);
    const auto psi = ma_coefficients(model, std::max(horizon, max_restricted));

    UhligResult out;
    for (int d = 0; d < draws; ++d) {
        Rng rng(subseed(seed, "uhlig.draw", static_cast<uint64_t>(d)));
        // Haar-distributed orthogonal matrix: QR of a Gaussian matrix with
        // the R diagonal sign fix
        Eigen::Matrix2d g;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) g(r, c) = rng.normal();
        const Eigen::HouseholderQR<Eigen::Matrix2d> qr(g);
        Eigen::Matrix2d q = qr.householderQ();
        const Eigen::Matrix2d r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int c = 0; c < 2; ++c) {
            if (r(c, c) < 0.0) q.col(c) = -q.col(c);
        }

        const Eigen::Matrix2d impact = b0 * q;
        bool ok = true;
        for (int h : spec.horizons) {
            const Eigen::Matrix2d theta_h = psi[static_cast<size_t>(h)] * impact;
            for (const auto& e : spec.entries) {
                if (static_cast<double>(e.sign) * theta_h(e.variable, e.shock) < 0.0) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
        }
        if (!ok) continue;

        std::vector<Eigen::Matrix2d> theta(static_cast<size_t>(horizon) + 1);
        for (int h = 0; h <= horizon; ++h) {
            theta[static_cast<size_t>(h)] = psi[static_cast<size_t>(h)] * impact;
        }
        out.accepted.push_back(std::move(theta));
    }
    if (out.accepted.empty()) {
        throw NoAcceptedDraws("no draw satisfied the sign restrictions after " +
                              std::to_string(draws) + " attempts");
    }
    out.acceptance_rate = static_cast<double>(out.accepted.size()) / static_cast<double>(draws);

    out.median.resize(static_cast<size_t>(horizon) + 1);
    out.sd.resize(static_cast<size_t>(horizon) + 1);
    for (int h = 0; h <= horizon; ++h) {
        Eigen::Matrix2d med, sd;
        for (int v = 0; v < 2; ++v) {
            for (int s = 0; s < 2; ++s) {
                std::vector<double> vals(out.accepted.size());
                for (size_t d = 0; d < out.accepted.size(); ++d) {
                    vals[d] = out.accepted[d][static_cast<size_t>(h)](v, s);
                }
                med(v, s) = quantile_type7(vals, 0.5);
                sd(v, s) = vals.size() > 1 ? sample_sd(vals) : 0.0;
            }
        }
        out.median[static_cast<size_t>(h)] = med;
        out.sd[static_cast<size_t>(h)] = sd;
    }
    return out;
}

std::vector<double> shock_weighted_aggregate(const std::vector<std::vector<double>>& paths,
                                             const std::vector<double>& weights) {
    if (paths.empty() || paths.size() != weights.size()) {
        throw InvalidConfig("shock_weighted_aggregate: paths/weights size mismatch");
    }
    const size_t n_h = paths.front().size();
    for (const auto& p : paths) {
        if (p.size() != n_h) throw HorizonMismatch("paths have different horizons");
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ZeroWeights("negative weight");
        total += w;
    }
    if (total <= 0.0) throw ZeroWeights("weights sum to zero");

    std::vector<double> out(n_h, 0.0);
    for (size_t i = 0; i < paths.size(); ++i) {
        kernels::axpy(weights[i] / total, paths[i], out);
    }
    return out;
}

} // namespace fxres
