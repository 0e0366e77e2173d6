#include "fxres/fgls.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "fxres/errors.hpp"
#include "fxres/stats.hpp"

namespace fxres {

int DesignMatrix::column(const std::string& name) const {
    for (size_t i = 0; i < column_names.size(); ++i) {
        if (column_names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

DesignMatrix build_design(const PanelTable& panel, const RegressionSpec& spec) {
    std::vector<std::string> needed = {spec.dependent, spec.vol_cf};
    needed.insert(needed.end(), spec.mfs.begin(), spec.mfs.end());
    needed.insert(needed.end(), spec.controls.begin(), spec.controls.end());
    for (const auto& v : needed) {
        if (!panel.has_variable(v)) throw MissingVariable("variable '" + v + "' not in panel");
    }
    for (const auto& f : spec.interactions) {
        if (std::find(spec.mfs.begin(), spec.mfs.end(), f) == spec.mfs.end()) {
            throw MissingVariable("interaction factor '" + f + "' not among the MFs");
        }
    }

    DesignMatrix d;
    d.countries = panel.countries();
    d.dates = panel.dates();
    d.n_countries = static_cast<int>(d.countries.size());
    d.n_periods = static_cast<int>(d.dates.size());
    const int rows = d.n_countries * d.n_periods;

    d.column_names.push_back(spec.vol_cf);
    for (const auto& f : spec.interactions) d.column_names.push_back(spec.vol_cf + "*" + f);
    for (const auto& f : spec.mfs) d.column_names.push_back(f);
    for (const auto& c : spec.controls) d.column_names.push_back(c);
    const int first_time_dummy = static_cast<int>(d.column_names.size());
    if (spec.time_effects) {
        for (int t = 1; t < d.n_periods; ++t) {
            d.column_names.push_back("q:" + format_iso_date(d.dates[static_cast<size_t>(t)]));
        }
    }
    if (spec.country_effects) {
        for (int i = 1; i < d.n_countries; ++i) {
            d.column_names.push_back("c:" + d.countries[static_cast<size_t>(i)]);
        }
    }
    d.column_names.push_back("const");
    const int cols = static_cast<int>(d.column_names.size());

    d.x = Eigen::MatrixXd::Zero(rows, cols);
    d.y = Eigen::VectorXd::Zero(rows);

    auto cell = [&](const std::string& country, Date date, const std::string& var) {
        const auto v = panel.value_at(country, date, var);
        if (!v) {
            throw UnbalancedPanel("missing (" + country + ", " + format_iso_date(date) + ", " +
                                  var + ")");
        }
        return *v;
    };

    for (int i = 0; i < d.n_countries; ++i) {
        const auto& country = d.countries[static_cast<size_t>(i)];
        for (int t = 0; t < d.n_periods; ++t) {
            const Date date = d.dates[static_cast<size_t>(t)];
            const int r = i * d.n_periods + t;
            d.y(r) = cell(country, date, spec.dependent);
            int c = 0;
            const double vol_cf = cell(country, date, spec.vol_cf);
            d.x(r, c++) = vol_cf;
            for (const auto& f : spec.interactions) {
                d.x(r, c++) = vol_cf * cell(country, date, f);
            }
            for (const auto& f : spec.mfs) d.x(r, c++) = cell(country, date, f);
            for (const auto& v : spec.controls) d.x(r, c++) = cell(country, date, v);
            if (spec.time_effects && t >= 1) d.x(r, first_time_dummy + t - 1) = 1.0;
            if (spec.country_effects && i >= 1) {
                const int base = first_time_dummy + (spec.time_effects ? d.n_periods - 1 : 0);
                d.x(r, base + i - 1) = 1.0;
            }
            d.x(r, cols - 1) = 1.0;
        }
    }
    return d;
}

namespace {

Eigen::VectorXd solve_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < x.cols()) {
        throw SingularDesign("design matrix is rank deficient (rank " +
                             std::to_string(qr.rank()) + " of " + std::to_string(x.cols()) +
                             ")");
    }
    return qr.solve(y);
}

} // namespace

FglsFit fgls_fit(const DesignMatrix& design) {
    const int n = design.n_countries;
    const int t = design.n_periods;
    const int k = static_cast<int>(design.x.cols());
    if (n < 1 || t < 3) throw TooShort("fgls_fit: need at least 3 periods");
    if (static_cast<Eigen::Index>(n) * t <= k) {
        throw SingularDesign("fgls_fit: more columns than observations");
    }
    if (n > t) {
        std::cerr << "[fxres] warning: N=" << n << " exceeds T=" << t
                  << "; the cross-sectional covariance may be singular\n";
    }

    FglsFit fit;
    fit.names = design.column_names;
    fit.n_countries = n;
    fit.n_periods = t;

    // stage 1: pooled OLS
    const Eigen::VectorXd beta_ols = solve_ols(design.x, design.y);
    fit.ols_residuals = design.y - design.x * beta_ols;

    // stage 2: per-panel AR(1) coefficients from the OLS residuals
    fit.rho.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto e = fit.ols_residuals.segment(static_cast<Eigen::Index>(i) * t, t);
        double num = 0.0, den = 0.0;
        for (int s = 1; s < t; ++s) {
            num += e(s) * e(s - 1);
            den += e(s - 1) * e(s - 1);
        }
        double rho = den > 0.0 ? num / den : 0.0;
        rho = std::clamp(rho, -0.99, 0.99);
        fit.rho[static_cast<size_t>(i)] = rho;
    }

    // stage 3: Prais-Winsten transform per panel (first row retained)
    Eigen::MatrixXd xs(design.x.rows(), k);
    Eigen::VectorXd ys(design.y.size());
    for (int i = 0; i < n; ++i) {
        const double rho = fit.rho[static_cast<size_t>(i)];
        const Eigen::Index base = static_cast<Eigen::Index>(i) * t;
        const double w0 = std::sqrt(1.0 - rho * rho);
        xs.row(base) = w0 * design.x.row(base);
        ys(base) = w0 * design.y(base);
        for (int s = 1; s < t; ++s) {
            xs.row(base + s) = design.x.row(base + s) - rho * design.x.row(base + s - 1);
            ys(base + s) = design.y(base + s) - rho * design.y(base + s - 1);
        }
    }

    // stage 4: cross-sectional covariance of the transformed OLS residuals
    const Eigen::VectorXd beta_pw = solve_ols(xs, ys);
    const Eigen::VectorXd resid_pw = ys - xs * beta_pw;
    Eigen::MatrixXd sigma_cs(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double cov = resid_pw.segment(static_cast<Eigen::Index>(i) * t, t)
                                   .dot(resid_pw.segment(static_cast<Eigen::Index>(j) * t, t)) /
                               static_cast<double>(t);
            sigma_cs(i, j) = cov;
            sigma_cs(j, i) = cov;
        }
    }

    // invert, shrinking toward the diagonal only if necessary
    Eigen::MatrixXd w_cs;
    double shrinkage = 0.0;
    {
        const Eigen::MatrixXd diag = sigma_cs.diagonal().asDiagonal();
        static constexpr double lambdas[] = {0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0};
        bool ok = false;
        for (const double lambda : lambdas) {
            const Eigen::MatrixXd candidate = (1.0 - lambda) * sigma_cs + lambda * diag;
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(candidate);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                ldlt.vectorD().minCoeff() > 1e-12 * ldlt.vectorD().maxCoeff()) {
                w_cs = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
                shrinkage = lambda;
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw SingularCsCovariance(
                "cross-sectional covariance is singular even after diagonal shrinkage; "
                "reduce the number of panels or pool them");
        }
        if (shrinkage > 0.0) {
            std::cerr << "[fxres] warning: cross-sectional covariance shrunk toward its "
                         "diagonal (lambda="
                      << shrinkage << ") to restore invertibility\n";
        }
    }
    fit.sigma_cs = sigma_cs;
    fit.cs_shrinkage = shrinkage;

    // stage 5: GLS with Omega = Sigma_cs (x) I_T on the transformed sample
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd moment = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd x_acc = Eigen::MatrixXd::Zero(t, k);
        Eigen::VectorXd y_acc = Eigen::VectorXd::Zero(t);
        for (int j = 0; j < n; ++j) {
            const double w = w_cs(i, j);
            if (w == 0.0) continue;
            x_acc += w * xs.middleRows(static_cast<Eigen::Index>(j) * t, t);
            y_acc += w * ys.segment(static_cast<Eigen::Index>(j) * t, t);
        }
        const auto x_i = xs.middleRows(static_cast<Eigen::Index>(i) * t, t);
        gram += x_i.transpose() * x_acc;
        moment += x_i.transpose() * y_acc;
    }
    gram = 0.5 * (gram + gram.transpose()).eval();
    const Eigen::LDLT<Eigen::MatrixXd> gram_ldlt(gram);
    if (gram_ldlt.info() != Eigen::Success) {
        throw SingularDesign("GLS cross-product matrix is singular");
    }
    fit.beta = gram_ldlt.solve(moment);
    fit.v = gram_ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    fit.v = 0.5 * (fit.v + fit.v.transpose()).eval();
    fit.fgls_residuals = design.y - design.x * fit.beta;
    fit.iterations = 1;

    for (int c = 0; c < k; ++c) {
        const std::string& name = design.column_names[static_cast<size_t>(c)];
        if (name.rfind("q:", 0) == 0) fit.time_effects[name.substr(2)] = fit.beta(c);
        else if (name.rfind("c:", 0) == 0) fit.country_effects[name.substr(2)] = fit.beta(c);
    }
    return fit;
}

int FglsFit::index(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<int>(i);
    }
    throw MissingVariable("no coefficient named '" + name + "'");
}

double FglsFit::coefficient(const std::string& name) const { return beta(index(name)); }

double FglsFit::std_error(const std::string& name) const {
    const int i = index(name);
    return std::sqrt(std::max(v(i, i), 0.0));
}

double FglsFit::p_value(const std::string& name) const {
    const double se = std_error(name);
    if (se <= 0.0) return coefficient(name) == 0.0 ? 1.0 : 0.0;
    const double z = coefficient(name) / se;
    return 2.0 * (1.0 - normal_cdf(std::fabs(z)));
}

TestOutcome wald_test(const FglsFit& fit, const Eigen::MatrixXd& restriction,
                      const Eigen::VectorXd& value) {
    if (restriction.cols() != fit.beta.size() || restriction.rows() != value.size()) {
        throw SingularRestriction("restriction dimensions do not match the coefficient vector");
    }
    const Eigen::VectorXd discrepancy = restriction * fit.beta - value;
    const Eigen::MatrixXd rvr = restriction * fit.v * restriction.transpose();
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(rvr);
    if (!lu.isInvertible()) {
        throw SingularRestriction("R V R' is singular; restrictions are collinear");
    }
    const double w = discrepancy.dot(lu.solve(discrepancy));

    TestOutcome out;
    out.statistic = w;
    out.p_value = chi2_survival(w, static_cast<int>(restriction.rows()));
    out.lags = 0;
    out.n_countries = fit.n_countries;
    out.n_periods = fit.n_periods;
    out.reject_5pct = out.p_value < 0.05;
    return out;
}

TestOutcome total_effect_wald(const FglsFit& fit, const std::string& vol_cf_name,
                              const std::string& interaction_name, double mf_value) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(1, fit.beta.size());
    r(0, fit.index(vol_cf_name)) = 1.0;
    r(0, fit.index(interaction_name)) = mf_value;
    return wald_test(fit, r, Eigen::VectorXd::Zero(1));
}

std::string significance_stars(double p_value) {
    if (p_value < 0.01) return "***";
    if (p_value < 0.05) return "**";
    if (p_value < 0.1) return "*";
    return "";
}

} // namespace fxres
