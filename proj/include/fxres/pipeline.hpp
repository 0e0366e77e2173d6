#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fxres/dates.hpp"

namespace fxres {

// Run configuration, read from a plain-text key = value file (# comments).
// Defaults follow the estimation choices used throughout: 1/99 winsor
// bounds, 4-week volatility window, 4-lag VARs, theta targets {0, 0.05}.
struct RunConfig {
    std::string output_dir = "out";
    std::string weekly_csv;    // default: <output_dir>/weekly.csv
    std::string quarterly_csv; // default: <output_dir>/quarterly.csv
    std::string meta_csv;      // default: <output_dir>/meta.csv

    std::optional<Date> start_date;
    std::optional<Date> end_date;

    double winsor_lower = 1.0;
    double winsor_upper = 99.0;

    int vol_window = 4;
    std::string vol_estimator = "rolling"; // rolling | arima

    int var_lags = 4;
    int irf_horizon = 12;
    int sign_draws = 1000;
    int sign_horizon_max = 0; // restrictions imposed at h = 0..max
    int llc_max_lag = 5;
    int cluster_restarts = 50;

    std::vector<double> theta_list{0.0, 0.05};

    std::optional<Date> resilience_start; // period tau; default full sample
    std::optional<Date> resilience_end;

    std::optional<Date> casestudy_base_start;
    std::optional<Date> casestudy_base_end;
    std::optional<Date> casestudy_eval_start;
    std::optional<Date> casestudy_eval_end;

    uint64_t seed = 42;

    // synthetic data generation
    int synth_countries = 20;
    int synth_quarters = 72;
    int synth_start_year = 2002;
    double synth_gamma0 = 0.05;
    double synth_gamma1 = 0.10;
    double synth_gamma2 = -0.20;
    double synth_rho = 0.5;
    double synth_cs_corr = 0.3;
    double synth_noise_sd = 0.05;

    static RunConfig from_file(const std::string& path);
    // FXRES_OUTPUT_DIR overrides output_dir when set.
    void apply_environment();
    void finalize_paths();

    std::map<std::string, std::string> echo() const;
};

// Stage runner: executes one named stage, writes its outputs under
// output_dir and appends a manifest entry (inputs with digests, outputs,
// duration). Stage names: synth, volatility, cluster, spvar, regress,
// threshold, resilience, casestudy, report.
class Pipeline {
public:
    explicit Pipeline(RunConfig config);

    void run_stage(const std::string& name);

    static const std::vector<std::string>& stage_names();

    const RunConfig& config() const { return cfg_; }

private:
    void stage_synth();
    void stage_volatility();
    void stage_cluster();
    void stage_spvar();
    void stage_regress();
    void stage_threshold();
    void stage_resilience();
    void stage_casestudy();
    void stage_report();

    std::string out_path(const std::string& name) const;
    std::string require_input(const std::string& path, const std::string& producing_stage);

    void record_stage(const std::string& name, const std::vector<std::string>& inputs,
                      const std::vector<std::string>& outputs, double duration_ms);

    RunConfig cfg_;
    std::vector<std::string> stage_inputs_;
};

// FNV-1a 64-bit digest of a file's bytes, hex encoded.
std::string file_digest(const std::string& path);

} // namespace fxres
