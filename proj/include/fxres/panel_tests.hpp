#pragma once

#include <map>
#include <string>
#include <vector>

namespace fxres {

struct TestOutcome {
    double statistic = 0.0;
    double p_value = 1.0;
    int lags = 0;
    int n_countries = 0;
    int n_periods = 0;
    bool reject_5pct = false;
};

using SeriesPanel = std::map<std::string, std::vector<double>>;

// Levin-Lin-Chu (2002) pooled panel unit-root test, intercept
// specification. Returns one outcome per ADF lag augmentation
// 0..max_lag; the p-value is the left tail of the adjusted t statistic
// (H0: unit root).
std::vector<TestOutcome> llc_unit_root(const SeriesPanel& panel, int max_lag = 5);

TestOutcome llc_unit_root_single(const SeriesPanel& panel, int lag);

// Dumitrescu-Hurlin (2012) Granger non-causality test for heterogeneous
// panels: per-country Wald statistics for excluding x lags from the y
// regression, standardized as Zbar = sqrt(N/(2 lag)) (Wbar - lag) against
// a standard normal, two-sided.
TestOutcome dh_granger(const SeriesPanel& x, const SeriesPanel& y, int lag = 1);

// Per-country Wald statistics behind dh_granger, keyed by country; used
// for reporting and for cross-checking the pooled statistic.
std::map<std::string, double> dh_granger_wald(const SeriesPanel& x, const SeriesPanel& y,
                                              int lag);

} // namespace fxres
