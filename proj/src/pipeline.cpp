#include "fxres/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fxres/clustering.hpp"
#include "fxres/errors.hpp"
#include "fxres/fgls.hpp"
#include "fxres/panel.hpp"
#include "fxres/panel_tests.hpp"
#include "fxres/resilience.hpp"
#include "fxres/rng.hpp"
#include "fxres/spvar.hpp"
#include "fxres/stats.hpp"
#include "fxres/synth.hpp"
#include "fxres/volatility.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fxres {

namespace {

constexpr const char* kVersion = "0.1.0";

const std::vector<std::string> kMfOrder = {
    "RealGDPGrowth", "TradeOpenness", "FXReserves",          "TFI",
    "ShortRate",     "FiscalSurplus", "FinancialDevelopment"};
const std::vector<std::string> kControls = {"FXRegime", "CapitalControl", "EquityReturn",
                                            "CapitalFlow", "VIX"};
const std::vector<std::string> kPcaFactors = {"TradeOpenness", "FXReserves",   "TFI",
                                              "ShortRate",     "FiscalSurplus",
                                              "FinancialDevelopment"};
const std::vector<std::string> kClusterFactors = {
    "RealGDPGrowth", "TradeOpenness", "FXReserves",          "TFI",
    "CreditPrivate", "ShortRate",     "FiscalSurplus",       "FinancialDevelopment"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidConfig("cannot open output file: " + path);
    return out;
}

} // namespace

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingDependency("cannot open " + path);
    uint64_t h = 0xcbf29ce484222325ULL;
    char buf[8192];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidConfig("config line " + std::to_string(line_no) +
                                ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto as_date = [&](const std::string& v) { return parse_iso_date(v); };
        try {
            if (key == "output_dir") cfg.output_dir = value;
            else if (key == "weekly_csv") cfg.weekly_csv = value;
            else if (key == "quarterly_csv") cfg.quarterly_csv = value;
            else if (key == "meta_csv") cfg.meta_csv = value;
            else if (key == "start_date") cfg.start_date = as_date(value);
            else if (key == "end_date") cfg.end_date = as_date(value);
            else if (key == "winsor_lower") cfg.winsor_lower = std::stod(value);
            else if (key == "winsor_upper") cfg.winsor_upper = std::stod(value);
            else if (key == "vol_window") cfg.vol_window = std::stoi(value);
            else if (key == "vol_estimator") cfg.vol_estimator = value;
            else if (key == "var_lags") cfg.var_lags = std::stoi(value);
            else if (key == "irf_horizon") cfg.irf_horizon = std::stoi(value);
            else if (key == "sign_draws") cfg.sign_draws = std::stoi(value);
            else if (key == "sign_horizon_max") cfg.sign_horizon_max = std::stoi(value);
            else if (key == "llc_max_lag") cfg.llc_max_lag = std::stoi(value);
            else if (key == "cluster_restarts") cfg.cluster_restarts = std::stoi(value);
            else if (key == "theta_list") {
                cfg.theta_list.clear();
                for (const auto& tok : split(value, ',')) {
                    if (!tok.empty()) cfg.theta_list.push_back(std::stod(tok));
                }
            } else if (key == "resilience_start") cfg.resilience_start = as_date(value);
            else if (key == "resilience_end") cfg.resilience_end = as_date(value);
            else if (key == "casestudy_base_start") cfg.casestudy_base_start = as_date(value);
            else if (key == "casestudy_base_end") cfg.casestudy_base_end = as_date(value);
            else if (key == "casestudy_eval_start") cfg.casestudy_eval_start = as_date(value);
            else if (key == "casestudy_eval_end") cfg.casestudy_eval_end = as_date(value);
            else if (key == "seed") cfg.seed = static_cast<uint64_t>(std::stoull(value));
            else if (key == "synth_countries") cfg.synth_countries = std::stoi(value);
            else if (key == "synth_quarters") cfg.synth_quarters = std::stoi(value);
            else if (key == "synth_start_year") cfg.synth_start_year = std::stoi(value);
            else if (key == "synth_gamma0") cfg.synth_gamma0 = std::stod(value);
            else if (key == "synth_gamma1") cfg.synth_gamma1 = std::stod(value);
            else if (key == "synth_gamma2") cfg.synth_gamma2 = std::stod(value);
            else if (key == "synth_rho") cfg.synth_rho = std::stod(value);
            else if (key == "synth_cs_corr") cfg.synth_cs_corr = std::stod(value);
            else if (key == "synth_noise_sd") cfg.synth_noise_sd = std::stod(value);
            else {
                throw InvalidConfig("config line " + std::to_string(line_no) +
                                    ": unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw InvalidConfig("config line " + std::to_string(line_no) + ": bad value for '" +
                                key + "'");
        }
    }
    return cfg;
}

void RunConfig::apply_environment() {
    if (const char* env = std::getenv("FXRES_OUTPUT_DIR")) {
        if (*env) output_dir = env;
    }
}

void RunConfig::finalize_paths() {
    if (weekly_csv.empty()) weekly_csv = (fs::path(output_dir) / "weekly.csv").string();
    if (quarterly_csv.empty()) {
        quarterly_csv = (fs::path(output_dir) / "quarterly.csv").string();
    }
    if (meta_csv.empty()) meta_csv = (fs::path(output_dir) / "meta.csv").string();
}

std::map<std::string, std::string> RunConfig::echo() const {
    std::map<std::string, std::string> m;
    m["output_dir"] = output_dir;
    m["weekly_csv"] = weekly_csv;
    m["quarterly_csv"] = quarterly_csv;
    m["meta_csv"] = meta_csv;
    if (start_date) m["start_date"] = format_iso_date(*start_date);
    if (end_date) m["end_date"] = format_iso_date(*end_date);
    m["winsor_lower"] = format_numeric(winsor_lower);
    m["winsor_upper"] = format_numeric(winsor_upper);
    m["vol_window"] = std::to_string(vol_window);
    m["vol_estimator"] = vol_estimator;
    m["var_lags"] = std::to_string(var_lags);
    m["irf_horizon"] = std::to_string(irf_horizon);
    m["sign_draws"] = std::to_string(sign_draws);
    m["sign_horizon_max"] = std::to_string(sign_horizon_max);
    m["llc_max_lag"] = std::to_string(llc_max_lag);
    m["cluster_restarts"] = std::to_string(cluster_restarts);
    std::string thetas;
    for (double t : theta_list) {
        if (!thetas.empty()) thetas += ",";
        thetas += format_numeric(t);
    }
    m["theta_list"] = thetas;
    if (resilience_start) m["resilience_start"] = format_iso_date(*resilience_start);
    if (resilience_end) m["resilience_end"] = format_iso_date(*resilience_end);
    if (casestudy_base_start) m["casestudy_base_start"] = format_iso_date(*casestudy_base_start);
    if (casestudy_base_end) m["casestudy_base_end"] = format_iso_date(*casestudy_base_end);
    if (casestudy_eval_start) m["casestudy_eval_start"] = format_iso_date(*casestudy_eval_start);
    if (casestudy_eval_end) m["casestudy_eval_end"] = format_iso_date(*casestudy_eval_end);
    m["seed"] = std::to_string(seed);
    m["synth_countries"] = std::to_string(synth_countries);
    m["synth_quarters"] = std::to_string(synth_quarters);
    m["synth_start_year"] = std::to_string(synth_start_year);
    m["synth_gamma0"] = format_numeric(synth_gamma0);
    m["synth_gamma1"] = format_numeric(synth_gamma1);
    m["synth_gamma2"] = format_numeric(synth_gamma2);
    m["synth_rho"] = format_numeric(synth_rho);
    m["synth_cs_corr"] = format_numeric(synth_cs_corr);
    m["synth_noise_sd"] = format_numeric(synth_noise_sd);
    return m;
}

const std::vector<std::string>& Pipeline::stage_names() {
    static const std::vector<std::string> names = {
        "synth",    "volatility", "cluster",    "spvar",  "regress",
        "threshold", "resilience", "casestudy", "report"};
    return names;
}

Pipeline::Pipeline(RunConfig config) : cfg_(std::move(config)) {
    cfg_.apply_environment();
    cfg_.finalize_paths();
    fs::create_directories(cfg_.output_dir);
}

std::string Pipeline::out_path(const std::string& name) const {
    return (fs::path(cfg_.output_dir) / name).string();
}

std::string Pipeline::require_input(const std::string& path,
                                    const std::string& producing_stage) {
    if (!fs::exists(path)) {
        throw MissingDependency("required input '" + path + "' is missing; run the '" +
                                producing_stage + "' stage first");
    }
    stage_inputs_.push_back(path);
    return path;
}

void Pipeline::record_stage(const std::string& name, const std::vector<std::string>& inputs,
                            const std::vector<std::string>& outputs, double duration_ms) {
    const std::string manifest_path = out_path("manifest.json");
    json manifest;
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        try {
            in >> manifest;
        } catch (const json::exception&) {
            manifest = json::object();
        }
    }
    manifest["version"] = kVersion;
    manifest["seed"] = cfg_.seed;
    manifest["config"] = cfg_.echo();
    if (!manifest.contains("stages") || !manifest["stages"].is_array()) {
        manifest["stages"] = json::array();
    }

    json entry;
    entry["name"] = name;
    entry["inputs"] = json::array();
    for (const auto& p : inputs) {
        entry["inputs"].push_back({{"path", p}, {"digest", file_digest(p)}});
    }
    entry["outputs"] = outputs;
    entry["duration_ms"] = duration_ms;

    json stages = json::array();
    for (const auto& s : manifest["stages"]) {
        if (s.value("name", "") != name) stages.push_back(s);
    }
    stages.push_back(entry);
    manifest["stages"] = stages;

    auto out = open_out(manifest_path);
    out << manifest.dump(2) << "\n";
}

void Pipeline::run_stage(const std::string& name) {
    stage_inputs_.clear();
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> outputs;

    auto dispatch = [&]() {
        if (name == "synth") stage_synth();
        else if (name == "volatility") stage_volatility();
        else if (name == "cluster") stage_cluster();
        else if (name == "spvar") stage_spvar();
        else if (name == "regress") stage_regress();
        else if (name == "threshold") stage_threshold();
        else if (name == "resilience") stage_resilience();
        else if (name == "casestudy") stage_casestudy();
        else if (name == "report") stage_report();
        else throw InvalidConfig("unknown stage '" + name + "'");
    };
    dispatch();

    const auto t1 = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0).count();

    // outputs: every known product of this stage that exists
    static const std::map<std::string, std::vector<std::string>> products = {
        {"synth", {"weekly.csv", "quarterly.csv", "meta.csv", "truth.json"}},
        {"volatility", {"vol_weekly.csv", "vol_quarterly.csv"}},
        {"cluster", {"clusters.csv", "profiles.csv"}},
        {"spvar",
         {"irf.csv", "irf_cumulative.csv", "irf_sign.csv", "diagnostics.csv",
          "spvar_summary.json"}},
        {"regress",
         {"coefficients.csv", "wald.csv", "pc1mf.csv", "normalized_mfs.csv",
          "regress_summary.json"}},
        {"threshold", {"thresholds.csv", "total_effect.csv"}},
        {"resilience", {"resilience.csv", "contributions.csv"}},
        {"casestudy",
         {"casestudy_factors.csv", "casestudy_counts.csv", "casestudy_market.csv"}},
        {"report", {"report.json"}},
    };
    if (auto it = products.find(name); it != products.end()) {
        for (const auto& p : it->second) {
            if (fs::exists(out_path(p))) outputs.push_back(out_path(p));
        }
    }
    record_stage(name, stage_inputs_, outputs, ms);
}

// ---------------------------------------------------------------------------
// stages
// ---------------------------------------------------------------------------

void Pipeline::stage_synth() {
    SynthSpec spec;
    spec.n_countries = cfg_.synth_countries;
    spec.n_quarters = cfg_.synth_quarters;
    spec.start_year = cfg_.synth_start_year;
    spec.gamma0 = cfg_.synth_gamma0;
    spec.gamma1 = cfg_.synth_gamma1;
    spec.gamma2 = cfg_.synth_gamma2;
    spec.rho = cfg_.synth_rho;
    spec.cs_corr = cfg_.synth_cs_corr;
    spec.noise_sd = cfg_.synth_noise_sd;

    const SynthResult result = synth_panel(spec, cfg_.seed);
    save_panel_csv(result.weekly, cfg_.weekly_csv);
    save_panel_csv(result.quarterly, cfg_.quarterly_csv);
    save_meta_csv(result.meta, cfg_.meta_csv);
    auto truth = open_out(out_path("truth.json"));
    truth << result.truth_json;
}

void Pipeline::stage_volatility() {
    const auto weekly_path = require_input(cfg_.weekly_csv, "synth");
    PanelTable weekly = load_panel_csv(weekly_path, Frequency::Weekly)
                            .filter_dates(cfg_.start_date, cfg_.end_date);

    const bool use_arima = cfg_.vol_estimator == "arima";
    std::vector<Observation> weekly_obs, quarterly_obs;
    for (const auto& country : weekly.countries()) {
        const struct {
            const char* source;
            VolVariable var;
        } jobs[] = {{"CapitalFlow", VolVariable::VolCF}, {"FxIndex", VolVariable::VolFX}};
        for (const auto& jobspec : jobs) {
            const auto series = weekly.series(country, jobspec.source);
            if (series.empty()) {
                throw MissingDependency(std::string("weekly variable '") + jobspec.source +
                                        "' missing for country " + country);
            }
            const VolSeries wvol =
                use_arima ? arima_resid_vol(country, jobspec.var, series, cfg_.vol_window)
                          : rolling_sd(country, jobspec.var, series, cfg_.vol_window);
            for (const auto& p : wvol.values) {
                weekly_obs.push_back(
                    {country, p.date, vol_variable_name(jobspec.var), p.vol});
            }
            const VolSeries qvol = quarterly_sd(country, jobspec.var, series);
            for (const auto& p : qvol.values) {
                quarterly_obs.push_back(
                    {country, p.date, vol_variable_name(jobspec.var), p.vol});
            }
        }
    }
    save_panel_csv(PanelTable::from_observations(std::move(weekly_obs), Frequency::Weekly),
                   out_path("vol_weekly.csv"));
    save_panel_csv(
        PanelTable::from_observations(std::move(quarterly_obs), Frequency::Quarterly),
        out_path("vol_quarterly.csv"));
}

void Pipeline::stage_cluster() {
    const auto quarterly_path = require_input(cfg_.quarterly_csv, "synth");
    const auto meta_path = require_input(cfg_.meta_csv, "synth");
    PanelTable quarterly = load_panel_csv(quarterly_path, Frequency::Quarterly)
                               .filter_dates(cfg_.start_date, cfg_.end_date);
    const auto meta = load_meta_csv(meta_path);

    std::vector<std::string> factors;
    for (const auto& f : kClusterFactors) {
        if (quarterly.has_variable(f)) factors.push_back(f);
    }
    if (factors.size() < 2) {
        throw MissingDependency("quarterly panel lacks the fundamentals needed for clustering");
    }

    const PanelTable zscored = zscore_normalize(quarterly, factors);
    const auto assignments = cluster_countries(zscored, meta, factors, /*split_by_regime=*/true,
                                               subseed(cfg_.seed, "cluster"),
                                               cfg_.cluster_restarts);

    auto clusters = open_out(out_path("clusters.csv"));
    clusters << "regime_group,country,cluster\n";
    for (const auto& a : assignments) {
        for (const auto& [country, cluster] : a.assignments) {
            clusters << regime_group_name(a.group) << ',' << country << ',' << cluster << '\n';
        }
    }

    auto profiles = open_out(out_path("profiles.csv"));
    profiles << "regime_group,factor,cluster1_median,cluster2_median,strong_cluster\n";
    for (const auto& a : assignments) {
        const auto profile =
            cluster_profile(quarterly, a, factors, default_factor_directions(factors));
        for (const auto& [factor, med] : profile.medians) {
            profiles << regime_group_name(a.group) << ',' << factor << ','
                     << format_numeric(med[0]) << ',' << format_numeric(med[1]) << ','
                     << profile.strong_cluster << '\n';
        }
    }
}

namespace {

struct GroupSpec {
    std::string label;
    std::vector<std::string> members;
};

std::vector<GroupSpec> load_groups(const std::string& clusters_csv,
                                   const std::vector<CountryMeta>& meta) {
    std::vector<GroupSpec> groups;
    std::map<std::string, std::vector<std::string>> by_key;
    std::ifstream in(clusters_csv);
    if (!in) throw MissingDependency("cannot open " + clusters_csv);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 3) throw MalformedRow("clusters.csv: " + line);
        by_key[f[0] + "/" + f[2]].push_back(f[1]);
    }
    for (auto& [key, members] : by_key) {
        std::sort(members.begin(), members.end());
        groups.push_back({key, members});
    }
    std::map<std::string, std::vector<std::string>> econ;
    for (const auto& m : meta) {
        econ[m.economy_class == EconomyClass::AE ? "AE" : "EME"].push_back(m.country);
    }
    for (auto& [key, members] : econ) {
        std::sort(members.begin(), members.end());
        groups.push_back({key, members});
    }
    return groups;
}

} // namespace

void Pipeline::stage_spvar() {
    const auto vol_path = require_input(out_path("vol_weekly.csv"), "volatility");
    const auto weekly_path = require_input(cfg_.weekly_csv, "synth");
    const auto clusters_path = require_input(out_path("clusters.csv"), "cluster");
    const auto meta_path = require_input(cfg_.meta_csv, "synth");

    PanelTable vol = load_panel_csv(vol_path, Frequency::Weekly);
    PanelTable weekly = load_panel_csv(weekly_path, Frequency::Weekly)
                            .filter_dates(cfg_.start_date, cfg_.end_date);
    const auto meta = load_meta_csv(meta_path);
    const auto groups = load_groups(clusters_path, meta);

    // one weekly table with the five model variables, winsorized per
    // variable over the pooled sample
    std::vector<Observation> merged;
    for (const auto& o : vol.observations()) merged.push_back(o);
    for (const auto& o : weekly.observations()) {
        if (o.variable == "EquityReturn" || o.variable == "VIX" ||
            o.variable == "CommodityReturn") {
            merged.push_back(o);
        }
    }
    PanelTable model_panel =
        PanelTable::from_observations(std::move(merged), Frequency::Weekly).balance();
    if (model_panel.empty()) {
        throw MissingDependency("no common weekly sample across volatility and controls");
    }
    model_panel = winsorize(model_panel, cfg_.winsor_lower, cfg_.winsor_upper);

    const auto countries = model_panel.countries();
    if (countries.size() < 3) throw MissingDependency("spvar needs at least 3 countries");

    std::vector<CountryVarData> panel;
    for (const auto& country : countries) {
        CountryVarData d;
        d.country = country;
        const auto cf = model_panel.series_values(country, "VolCF");
        const auto fx = model_panel.series_values(country, "VolFX");
        const auto eq = model_panel.series_values(country, "EquityReturn");
        const auto vx = model_panel.series_values(country, "VIX");
        const auto cm = model_panel.series_values(country, "CommodityReturn");
        const auto t = static_cast<Eigen::Index>(cf.size());
        d.endo.resize(t, 2);
        d.exog.resize(t, 3);
        for (Eigen::Index s = 0; s < t; ++s) {
            d.endo(s, 0) = cf[static_cast<size_t>(s)];
            d.endo(s, 1) = fx[static_cast<size_t>(s)];
            d.exog(s, 0) = eq[static_cast<size_t>(s)];
            d.exog(s, 1) = vx[static_cast<size_t>(s)];
            d.exog(s, 2) = cm[static_cast<size_t>(s)];
        }
        panel.push_back(std::move(d));
    }

    const ShockDecomposition decomp = pedroni_decompose(panel, cfg_.var_lags);

    // response of VolFX (variable 1) to the CF-volatility shock (shock 0)
    const int horizon = cfg_.irf_horizon;
    std::map<std::string, DecomposedIrf> paths;
    for (const auto& country : countries) {
        paths[country] = decomposed_irf(decomp, country, 0, 1, horizon);
    }

    auto write_quantiles = [&](std::ofstream& out, const std::string& label,
                               const std::string& shock_type,
                               const std::vector<std::vector<double>>& group_paths) {
        const QuantilePaths q = aggregate_irf_quantiles(group_paths);
        for (int h = 0; h <= horizon; ++h) {
            out << label << ',' << shock_type << ',' << h << ','
                << format_numeric(q.median[static_cast<size_t>(h)]) << ','
                << format_numeric(q.p25[static_cast<size_t>(h)]) << ','
                << format_numeric(q.p75[static_cast<size_t>(h)]) << '\n';
        }
    };

    auto irf_csv = open_out(out_path("irf.csv"));
    auto irf_cum_csv = open_out(out_path("irf_cumulative.csv"));
    irf_csv << "cluster,shock_type,horizon,median,p25,p75\n";
    irf_cum_csv << "cluster,shock_type,horizon,median,p25,p75\n";
    for (const auto& group : groups) {
        std::vector<std::vector<double>> comp, glob, idio;
        for (const auto& member : group.members) {
            auto it = paths.find(member);
            if (it == paths.end()) continue;
            comp.push_back(it->second.composite);
            glob.push_back(it->second.global);
            idio.push_back(it->second.idiosyncratic);
        }
        if (comp.size() < 2) continue;
        write_quantiles(irf_csv, group.label, "composite", comp);
        write_quantiles(irf_csv, group.label, "global", glob);
        write_quantiles(irf_csv, group.label, "idiosyncratic", idio);

        auto cum = [](std::vector<std::vector<double>> ps) {
            for (auto& p : ps) p = cumulative_irf(p);
            return ps;
        };
        write_quantiles(irf_cum_csv, group.label, "composite", cum(comp));
        write_quantiles(irf_cum_csv, group.label, "global", cum(glob));
        write_quantiles(irf_cum_csv, group.label, "idiosyncratic", cum(idio));
    }

    // panel diagnostics on the model variables
    auto diagnostics = open_out(out_path("diagnostics.csv"));
    diagnostics << "test,variable,lags,statistic,p_value,reject_5pct\n";
    for (const auto& var : {"VolCF", "VolFX", "EquityReturn", "VIX", "CommodityReturn"}) {
        SeriesPanel sp;
        for (const auto& country : countries) {
            sp[country] = model_panel.series_values(country, var);
        }
        try {
            for (const auto& r : llc_unit_root(sp, cfg_.llc_max_lag)) {
                diagnostics << "llc_unit_root," << var << ',' << r.lags << ','
                            << format_numeric(r.statistic) << ',' << format_numeric(r.p_value)
                            << ',' << (r.reject_5pct ? 1 : 0) << '\n';
            }
        } catch (const Error& e) {
            std::cerr << "[fxres] warning: LLC on " << var << " failed: " << e.what() << "\n";
        }
    }
    {
        SeriesPanel cf, fx;
        for (const auto& country : countries) {
            cf[country] = model_panel.series_values(country, "VolCF");
            fx[country] = model_panel.series_values(country, "VolFX");
        }
        const TestOutcome fwd = dh_granger(cf, fx, 1);
        diagnostics << "dh_granger,VolCF->VolFX," << fwd.lags << ','
                    << format_numeric(fwd.statistic) << ',' << format_numeric(fwd.p_value) << ','
                    << (fwd.reject_5pct ? 1 : 0) << '\n';
        const TestOutcome rev = dh_granger(fx, cf, 1);
        diagnostics << "dh_granger,VolFX->VolCF," << rev.lags << ','
                    << format_numeric(rev.statistic) << ',' << format_numeric(rev.p_value) << ','
                    << (rev.reject_5pct ? 1 : 0) << '\n';
    }

    // sign-restricted robustness estimator
    json summary;
    summary["countries"] = json::object();
    if (cfg_.sign_draws > 0) {
        SignSpec spec = SignSpec::recursive_default();
        spec.horizons.clear();
        for (int h = 0; h <= cfg_.sign_horizon_max; ++h) spec.horizons.push_back(h);

        std::map<std::string, std::vector<double>> sign_paths;
        std::map<std::string, double> weights;
        for (size_t i = 0; i < countries.size(); ++i) {
            const auto& country = countries[i];
            const auto& model = decomp.country_models.at(country);
            const UhligResult u =
                uhlig_sign_irf(model, spec, cfg_.sign_draws,
                               subseed(cfg_.seed, "uhlig.country", static_cast<uint64_t>(i)),
                               cfg_.irf_horizon);
            std::vector<double> med(static_cast<size_t>(horizon) + 1);
            for (int h = 0; h <= horizon; ++h) {
                med[static_cast<size_t>(h)] = u.median[static_cast<size_t>(h)](1, 0);
            }
            sign_paths[country] = std::move(med);
            weights[country] = decomp.country_b0.at(country)(0, 0);
            summary["countries"][country]["sign_acceptance_rate"] = u.acceptance_rate;
        }

        auto sign_csv = open_out(out_path("irf_sign.csv"));
        sign_csv << "cluster,horizon,weighted_mean,lo,hi\n";
        for (const auto& group : groups) {
            std::vector<std::vector<double>> ps;
            std::vector<double> ws;
            for (const auto& member : group.members) {
                auto it = sign_paths.find(member);
                if (it == sign_paths.end()) continue;
                ps.push_back(it->second);
                ws.push_back(weights[member]);
            }
            if (ps.size() < 2) continue;
            const std::vector<double> mean = shock_weighted_aggregate(ps, ws);
            double wsum = 0.0;
            for (double w : ws) wsum += w;
            for (int h = 0; h <= horizon; ++h) {
                double var = 0.0;
                for (size_t i = 0; i < ps.size(); ++i) {
                    const double d = ps[i][static_cast<size_t>(h)] -
                                     mean[static_cast<size_t>(h)];
                    var += ws[i] / wsum * d * d;
                }
                const double sd = std::sqrt(var);
                sign_csv << group.label << ',' << h << ','
                         << format_numeric(mean[static_cast<size_t>(h)]) << ','
                         << format_numeric(mean[static_cast<size_t>(h)] - sd) << ','
                         << format_numeric(mean[static_cast<size_t>(h)] + sd) << '\n';
            }
        }
    }

    for (const auto& country : countries) {
        json c;
        const auto& b0 = decomp.country_b0.at(country);
        c["b0"] = {{b0(0, 0), b0(0, 1)}, {b0(1, 0), b0(1, 1)}};
        c["loading_cf"] = decomp.loadings.at(country)(0);
        c["loading_fx"] = decomp.loadings.at(country)(1);
        c["idio_sd_cf"] = decomp.idiosyncratic_sd.at(country)(0);
        c["idio_sd_fx"] = decomp.idiosyncratic_sd.at(country)(1);
        c["orthogonality_cf"] = decomp.orthogonality.at(country)(0);
        c["orthogonality_fx"] = decomp.orthogonality.at(country)(1);
        c["stable"] = is_stable(decomp.country_models.at(country));
        summary["countries"][country].update(c);
    }
    auto sj = open_out(out_path("spvar_summary.json"));
    sj << summary.dump(2) << "\n";
}

void Pipeline::stage_regress() {
    const auto quarterly_path = require_input(cfg_.quarterly_csv, "synth");
    const auto vol_path = require_input(out_path("vol_quarterly.csv"), "volatility");

    PanelTable quarterly = load_panel_csv(quarterly_path, Frequency::Quarterly);
    PanelTable vols = load_panel_csv(vol_path, Frequency::Quarterly);
    PanelTable merged = merge_panels(quarterly, vols)
                            .filter_dates(cfg_.start_date, cfg_.end_date)
                            .balance();
    if (merged.empty()) {
        throw MissingDependency("no common quarterly sample between fundamentals and vols");
    }
    merged = winsorize(merged, cfg_.winsor_lower, cfg_.winsor_upper);

    std::vector<std::string> mfs;
    for (const auto& f : kMfOrder) {
        if (merged.has_variable(f)) mfs.push_back(f);
    }
    std::vector<std::string> controls;
    for (const auto& c : kControls) {
        if (merged.has_variable(c)) controls.push_back(c);
    }

    json summary;
    summary["regressions"] = json::object();

    auto coef_csv = open_out(out_path("coefficients.csv"));
    coef_csv << "regression,term,estimate,se,p_value,stars\n";
    auto wald_csv = open_out(out_path("wald.csv"));
    wald_csv << "regression,hypothesis,statistic,p_value\n";

    auto emit_fit = [&](const std::string& reg_name, const FglsFit& fit,
                        const DesignMatrix& design, const std::string& mf_name) {
        for (const auto& term : design.column_names) {
            if (term.rfind("q:", 0) == 0 || term.rfind("c:", 0) == 0) continue;
            coef_csv << reg_name << ',' << term << ','
                     << format_numeric(fit.coefficient(term)) << ','
                     << format_numeric(fit.std_error(term)) << ','
                     << format_numeric(fit.p_value(term)) << ','
                     << significance_stars(fit.p_value(term)) << '\n';
        }
        json reg;
        reg["n"] = fit.n_countries;
        reg["t"] = fit.n_periods;
        if (!mf_name.empty()) {
            const std::string inter = "VolCF*" + mf_name;
            const int i1 = fit.index("VolCF");
            const int i2 = fit.index(inter);
            reg["mf"] = mf_name;
            reg["gamma1"] = fit.beta(i1);
            reg["gamma2"] = fit.beta(i2);
            reg["p_gamma1"] = fit.p_value("VolCF");
            reg["p_gamma2"] = fit.p_value(inter);
            reg["v_gamma"] = {{fit.v(i1, i1), fit.v(i1, i2)}, {fit.v(i2, i1), fit.v(i2, i2)}};

            const auto mf_values = merged.has_variable(mf_name)
                                       ? merged.pooled_values(mf_name)
                                       : std::vector<double>{};
            double mf_mean = 0.0, mf_min = 0.0, mf_max = 0.0;
            if (!mf_values.empty()) {
                mf_mean = mean(mf_values);
                mf_min = *std::min_element(mf_values.begin(), mf_values.end());
                mf_max = *std::max_element(mf_values.begin(), mf_values.end());
            }
            reg["mf_mean"] = mf_mean;
            reg["mf_min"] = mf_min;
            reg["mf_max"] = mf_max;

            const TestOutcome te = total_effect_wald(fit, "VolCF", inter, mf_mean);
            wald_csv << reg_name << ",volcf_total_effect," << format_numeric(te.statistic)
                     << ',' << format_numeric(te.p_value) << '\n';
            reg["wald_volcf_total_effect_p"] = te.p_value;

            // total effect of the factor itself at the VolCF sample mean
            const double volcf_mean = mean(merged.pooled_values("VolCF"));
            Eigen::MatrixXd r = Eigen::MatrixXd::Zero(1, fit.beta.size());
            r(0, fit.index(inter)) = volcf_mean;
            r(0, fit.index(mf_name)) = 1.0;
            const TestOutcome mfte = wald_test(fit, r, Eigen::VectorXd::Zero(1));
            wald_csv << reg_name << ",mf_total_effect," << format_numeric(mfte.statistic) << ','
                     << format_numeric(mfte.p_value) << '\n';
            reg["wald_mf_total_effect_p"] = mfte.p_value;
        }
        summary["regressions"][reg_name] = reg;
    };

    // regression (1): factor levels only
    {
        RegressionSpec spec;
        spec.mfs = mfs;
        spec.controls = controls;
        const DesignMatrix design = build_design(merged, spec);
        const FglsFit fit = fgls_fit(design);
        emit_fit("1", fit, design, "");
    }

    // regressions (2..8): one interaction at a time
    int reg_index = 2;
    for (const auto& mf : mfs) {
        RegressionSpec spec;
        spec.mfs = mfs;
        spec.interactions = {mf};
        spec.controls = controls;
        const DesignMatrix design = build_design(merged, spec);
        const FglsFit fit = fgls_fit(design);
        emit_fit(std::to_string(reg_index), fit, design, mf);
        ++reg_index;
    }

    // composite factor: min-max normalized significant factors -> PC1
    std::vector<std::string> pca_factors;
    for (const auto& f : kPcaFactors) {
        if (merged.has_variable(f)) pca_factors.push_back(f);
    }
    if (pca_factors.size() >= 2) {
        const PanelTable normalized = minmax_normalize(merged, pca_factors);

        // pooled observation matrix for the PCA
        std::vector<std::array<std::string, 1>> dummy;
        std::vector<std::pair<std::string, Date>> keys;
        for (const auto& o : normalized.observations()) {
            if (o.variable == pca_factors.front()) keys.push_back({o.country, o.date});
        }
        std::sort(keys.begin(), keys.end());
        Eigen::MatrixXd data(static_cast<Eigen::Index>(keys.size()),
                             static_cast<Eigen::Index>(pca_factors.size()));
        for (size_t r = 0; r < keys.size(); ++r) {
            for (size_t c = 0; c < pca_factors.size(); ++c) {
                const auto v =
                    normalized.value_at(keys[r].first, keys[r].second, pca_factors[c]);
                if (!v) throw UnbalancedPanel("normalized factor panel is not balanced");
                data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
            }
        }
        const PcaLoadings loadings = pca_first_component(data, pca_factors);
        const auto composite = pc1mf(normalized, loadings);

        auto pc_csv = open_out(out_path("pc1mf.csv"));
        pc_csv << "country,date,value\n";
        for (const auto& [key, value] : composite) {
            pc_csv << key.first << ',' << format_iso_date(key.second) << ','
                   << format_numeric(value) << '\n';
        }
        auto nm_csv = open_out(out_path("normalized_mfs.csv"));
        nm_csv << "country,date,variable,value\n";
        for (const auto& o : normalized.observations()) {
            if (std::find(pca_factors.begin(), pca_factors.end(), o.variable) ==
                pca_factors.end()) {
                continue;
            }
            nm_csv << o.country << ',' << format_iso_date(o.date) << ',' << o.variable << ','
                   << format_numeric(o.value) << '\n';
        }

        summary["pca"]["factors"] = pca_factors;
        summary["pca"]["explained_share"] = loadings.explained_share;
        summary["pca"]["loadings"] = json::array();
        for (Eigen::Index i = 0; i < loadings.loadings.size(); ++i) {
            summary["pca"]["loadings"].push_back(loadings.loadings(i));
        }

        // regression (9): the composite interaction specification
        std::vector<Observation> with_pc = merged.observations();
        for (const auto& [key, value] : composite) {
            with_pc.push_back({key.first, key.second, "PC1MF", value});
        }
        PanelTable pc_panel =
            PanelTable::from_observations(std::move(with_pc), Frequency::Quarterly);

        RegressionSpec spec;
        spec.mfs = {"PC1MF"};
        spec.interactions = {"PC1MF"};
        const DesignMatrix design = build_design(pc_panel, spec);
        const FglsFit fit = fgls_fit(design);

        // composite sample stats come from the PC1MF series itself
        const auto pc_values = pc_panel.pooled_values("PC1MF");
        json reg;
        const int i1 = fit.index("VolCF");
        const int i2 = fit.index("VolCF*PC1MF");
        reg["mf"] = "PC1MF";
        reg["n"] = fit.n_countries;
        reg["t"] = fit.n_periods;
        reg["gamma1"] = fit.beta(i1);
        reg["gamma2"] = fit.beta(i2);
        reg["p_gamma1"] = fit.p_value("VolCF");
        reg["p_gamma2"] = fit.p_value("VolCF*PC1MF");
        reg["v_gamma"] = {{fit.v(i1, i1), fit.v(i1, i2)}, {fit.v(i2, i1), fit.v(i2, i2)}};
        reg["mf_mean"] = mean(pc_values);
        reg["mf_min"] = *std::min_element(pc_values.begin(), pc_values.end());
        reg["mf_max"] = *std::max_element(pc_values.begin(), pc_values.end());

        for (const auto& term : design.column_names) {
            if (term.rfind("q:", 0) == 0 || term.rfind("c:", 0) == 0) continue;
            coef_csv << "9," << term << ',' << format_numeric(fit.coefficient(term)) << ','
                     << format_numeric(fit.std_error(term)) << ','
                     << format_numeric(fit.p_value(term)) << ','
                     << significance_stars(fit.p_value(term)) << '\n';
        }
        const TestOutcome te = total_effect_wald(fit, "VolCF", "VolCF*PC1MF",
                                                 reg["mf_mean"].get<double>());
        wald_csv << "9,volcf_total_effect," << format_numeric(te.statistic) << ','
                 << format_numeric(te.p_value) << '\n';
        reg["wald_volcf_total_effect_p"] = te.p_value;

        const double volcf_mean = mean(merged.pooled_values("VolCF"));
        Eigen::MatrixXd r = Eigen::MatrixXd::Zero(1, fit.beta.size());
        r(0, i2) = volcf_mean;
        r(0, fit.index("PC1MF")) = 1.0;
        const TestOutcome mfte = wald_test(fit, r, Eigen::VectorXd::Zero(1));
        wald_csv << "9,mf_total_effect," << format_numeric(mfte.statistic) << ','
                 << format_numeric(mfte.p_value) << '\n';
        reg["wald_mf_total_effect_p"] = mfte.p_value;

        summary["regressions"]["9"] = reg;
    }

    auto sj = open_out(out_path("regress_summary.json"));
    sj << summary.dump(2) << "\n";
}

void Pipeline::stage_threshold() {
    const auto summary_path = require_input(out_path("regress_summary.json"), "regress");
    std::ifstream in(summary_path);
    json summary;
    in >> summary;

    const double z90 = normal_quantile(0.95);

    auto th_csv = open_out(out_path("thresholds.csv"));
    th_csv << "regression,factor,theta,threshold,se,direction\n";
    auto te_csv = open_out(out_path("total_effect.csv"));
    te_csv << "regression,factor,mf,effect,ci_lo,ci_hi\n";

    for (const auto& [reg_name, reg] : summary["regressions"].items()) {
        if (!reg.contains("mf")) continue;
        const std::string mf = reg["mf"];
        const double g1 = reg["gamma1"];
        const double g2 = reg["gamma2"];
        const double p1 = reg["p_gamma1"];
        const double p2 = reg["p_gamma2"];
        Eigen::Matrix2d vg;
        vg << reg["v_gamma"][0][0].get<double>(), reg["v_gamma"][0][1].get<double>(),
            reg["v_gamma"][1][0].get<double>(), reg["v_gamma"][1][1].get<double>();

        // thresholds require both coefficients significant at the 10% level
        if (p1 <= 0.10 && p2 <= 0.10 && g2 != 0.0) {
            for (double theta : cfg_.theta_list) {
                const ThresholdResult t = threshold(g1, g2, theta);
                const double se = threshold_se(g1, g2, theta, vg);
                th_csv << reg_name << ',' << mf << ',' << format_numeric(theta) << ','
                       << format_numeric(t.value) << ',' << format_numeric(se) << ','
                       << threshold_direction_name(t.direction) << '\n';
            }
        }

        const double mf_min = reg["mf_min"];
        const double mf_max = reg["mf_max"];
        if (mf_max > mf_min) {
            constexpr int kGrid = 41;
            for (int g = 0; g < kGrid; ++g) {
                const double m =
                    mf_min + (mf_max - mf_min) * static_cast<double>(g) / (kGrid - 1);
                const double effect = total_effect(g1, g2, m);
                Eigen::Vector2d grad(1.0, m);
                const double se = std::sqrt(std::max(grad.dot(vg * grad), 0.0));
                te_csv << reg_name << ',' << mf << ',' << format_numeric(m) << ','
                       << format_numeric(effect) << ',' << format_numeric(effect - z90 * se)
                       << ',' << format_numeric(effect + z90 * se) << '\n';
            }
        }
    }
}

void Pipeline::stage_resilience() {
    const auto summary_path = require_input(out_path("regress_summary.json"), "regress");
    const auto pc_path = require_input(out_path("pc1mf.csv"), "regress");
    const auto nm_path = require_input(out_path("normalized_mfs.csv"), "regress");

    std::ifstream in(summary_path);
    json summary;
    in >> summary;
    if (!summary["regressions"].contains("9")) {
        throw MissingDependency("regress stage did not produce the composite regression (9)");
    }
    const auto& reg = summary["regressions"]["9"];
    const double g1 = reg["gamma1"];
    const double g2 = reg["gamma2"];
    Eigen::Matrix2d vg;
    vg << reg["v_gamma"][0][0].get<double>(), reg["v_gamma"][0][1].get<double>(),
        reg["v_gamma"][1][0].get<double>(), reg["v_gamma"][1][1].get<double>();

    // per-country median PC1MF over the scoring period
    std::map<std::string, std::vector<double>> pc_values;
    {
        std::ifstream pc(pc_path);
        std::string line;
        std::getline(pc, line);
        while (std::getline(pc, line)) {
            if (trim(line).empty()) continue;
            const auto f = split(line, ',');
            if (f.size() != 3) throw MalformedRow("pc1mf.csv: " + line);
            const Date d = parse_iso_date(f[1]);
            if (cfg_.resilience_start && d < *cfg_.resilience_start) continue;
            if (cfg_.resilience_end && d > *cfg_.resilience_end) continue;
            pc_values[f[0]].push_back(std::stod(f[2]));
        }
    }
    if (pc_values.empty()) throw EmptyPeriod("no PC1MF observations in the scoring period");

    std::vector<ResilienceScore> scores;
    for (const auto& [country, values] : pc_values) {
        ResilienceScore s = resilience(country, g1, g2, median(values));
        resilience_ci(s, vg, 0.90);
        scores.push_back(s);
    }
    rank_scores(scores);

    auto res_csv = open_out(out_path("resilience.csv"));
    res_csv << "country,score,ci_lo,ci_hi,rank\n";
    for (const auto& s : scores) {
        res_csv << s.country << ',' << format_numeric(s.score) << ','
                << format_numeric(s.ci_lo) << ',' << format_numeric(s.ci_hi) << ',' << s.rank
                << '\n';
    }

    // contribution shares from the PCA loadings and the country medians of
    // the normalized factors
    PcaLoadings loadings;
    loadings.factors = summary["pca"]["factors"].get<std::vector<std::string>>();
    loadings.loadings.resize(static_cast<Eigen::Index>(loadings.factors.size()));
    for (Eigen::Index i = 0; i < loadings.loadings.size(); ++i) {
        loadings.loadings(i) = summary["pca"]["loadings"][static_cast<size_t>(i)];
    }

    std::map<std::string, std::map<std::string, std::vector<double>>> nm;
    {
        std::ifstream f(nm_path);
        std::string line;
        std::getline(f, line);
        while (std::getline(f, line)) {
            if (trim(line).empty()) continue;
            const auto cols = split(line, ',');
            if (cols.size() != 4) throw MalformedRow("normalized_mfs.csv: " + line);
            const Date d = parse_iso_date(cols[1]);
            if (cfg_.resilience_start && d < *cfg_.resilience_start) continue;
            if (cfg_.resilience_end && d > *cfg_.resilience_end) continue;
            nm[cols[0]][cols[2]].push_back(std::stod(cols[3]));
        }
    }

    auto con_csv = open_out(out_path("contributions.csv"));
    con_csv << "country,factor,share\n";
    for (const auto& [country, by_factor] : nm) {
        std::map<std::string, double> medians;
        for (const auto& [factor, values] : by_factor) medians[factor] = median(values);
        try {
            for (const auto& [factor, share] : contributions(loadings, medians)) {
                con_csv << country << ',' << factor << ',' << format_numeric(share) << '\n';
            }
        } catch (const NonPositiveComposite&) {
            std::cerr << "[fxres] warning: non-positive composite for " << country
                      << "; contribution shares skipped\n";
        }
    }
}

void Pipeline::stage_casestudy() {
    const auto thresholds_path = require_input(out_path("thresholds.csv"), "threshold");
    const auto quarterly_path = require_input(cfg_.quarterly_csv, "synth");
    const auto vol_path = require_input(out_path("vol_quarterly.csv"), "volatility");

    PanelTable quarterly = load_panel_csv(quarterly_path, Frequency::Quarterly)
                               .filter_dates(cfg_.start_date, cfg_.end_date);
    quarterly = winsorize(quarterly, cfg_.winsor_lower, cfg_.winsor_upper);
    PanelTable vols = load_panel_csv(vol_path, Frequency::Quarterly);

    // default windows: evaluation = final calendar year, base = the one before
    const auto dates = quarterly.dates();
    const int last_year = year_of(dates.back());
    const Date eval_start = cfg_.casestudy_eval_start.value_or(make_date(last_year, 1, 1));
    const Date eval_end = cfg_.casestudy_eval_end.value_or(make_date(last_year, 12, 31));
    const Date base_start =
        cfg_.casestudy_base_start.value_or(make_date(last_year - 1, 1, 1));
    const Date base_end = cfg_.casestudy_base_end.value_or(make_date(last_year - 1, 12, 31));

    // thresholds at theta = 0 per factor
    std::map<std::string, std::pair<double, ThresholdDirection>> th;
    {
        std::ifstream f(thresholds_path);
        std::string line;
        std::getline(f, line);
        while (std::getline(f, line)) {
            if (trim(line).empty()) continue;
            const auto cols = split(line, ',');
            if (cols.size() != 6) throw MalformedRow("thresholds.csv: " + line);
            if (std::stod(cols[2]) != 0.0) continue;
            th[cols[1]] = {std::stod(cols[3]), cols[5] == "less_than"
                                                   ? ThresholdDirection::LessThan
                                                   : ThresholdDirection::GreaterThan};
        }
    }
    std::vector<std::string> factors;
    for (const auto& f : kPcaFactors) {
        if (th.count(f) && quarterly.has_variable(f)) factors.push_back(f);
    }

    auto fac_csv = open_out(out_path("casestudy_factors.csv"));
    fac_csv << "country,factor,value,threshold,direction,attained\n";
    auto cnt_csv = open_out(out_path("casestudy_counts.csv"));
    cnt_csv << "country,supporting_factors\n";

    for (const auto& country : quarterly.countries()) {
        std::vector<double> values, limits;
        std::vector<ThresholdDirection> dirs;
        bool complete = !factors.empty();
        for (const auto& factor : factors) {
            std::vector<double> window;
            for (const auto& [d, v] : quarterly.series(country, factor)) {
                if (d < eval_start || d > eval_end) continue;
                window.push_back(v);
            }
            if (window.empty()) {
                complete = false;
                break;
            }
            values.push_back(median(window));
            limits.push_back(th[factor].first);
            dirs.push_back(th[factor].second);
        }
        if (!complete) continue;
        const int count = supporting_factor_count(values, limits, dirs);
        for (size_t i = 0; i < factors.size(); ++i) {
            const bool attained = dirs[i] == ThresholdDirection::GreaterThan
                                      ? values[i] >= limits[i]
                                      : values[i] <= limits[i];
            fac_csv << country << ',' << factors[i] << ',' << format_numeric(values[i]) << ','
                    << format_numeric(limits[i]) << ','
                    << threshold_direction_name(dirs[i]) << ',' << (attained ? 1 : 0) << '\n';
        }
        cnt_csv << country << ',' << count << '\n';
    }

    // market-based resilience between the base and evaluation windows
    struct Row {
        std::string country;
        double change;
    };
    std::vector<Row> rows;
    for (const auto& country : vols.countries()) {
        const auto fx = vols.series(country, "VolFX");
        const auto cf = vols.series(country, "VolCF");
        try {
            rows.push_back({country, market_based_resilience(fx, cf, base_start, base_end,
                                                             eval_start, eval_end)});
        } catch (const Error& e) {
            std::cerr << "[fxres] warning: market-based resilience skipped for " << country
                      << ": " << e.what() << "\n";
        }
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.change != b.change) return a.change < b.change;
        return a.country < b.country;
    });
    auto mk_csv = open_out(out_path("casestudy_market.csv"));
    mk_csv << "country,pct_change,rank\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        mk_csv << rows[i].country << ',' << format_numeric(rows[i].change) << ',' << (i + 1)
               << '\n';
    }
}

void Pipeline::stage_report() {
    json report;
    report["version"] = kVersion;
    report["seed"] = cfg_.seed;

    bool any = false;
    auto add_csv = [&](const std::string& key, const std::string& file) {
        const std::string path = out_path(file);
        if (!fs::exists(path)) return;
        stage_inputs_.push_back(path);
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);
        const auto header = split(line, ',');
        json rows = json::array();
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            const auto cols = split(line, ',');
            json row;
            for (size_t i = 0; i < header.size() && i < cols.size(); ++i) {
                row[header[i]] = cols[i];
            }
            rows.push_back(row);
        }
        report[key] = rows;
        any = true;
    };

    add_csv("clusters", "clusters.csv");
    add_csv("profiles", "profiles.csv");
    add_csv("diagnostics", "diagnostics.csv");
    add_csv("coefficients", "coefficients.csv");
    add_csv("wald", "wald.csv");
    add_csv("thresholds", "thresholds.csv");
    add_csv("resilience", "resilience.csv");
    add_csv("contributions", "contributions.csv");
    add_csv("casestudy_counts", "casestudy_counts.csv");
    add_csv("casestudy_market", "casestudy_market.csv");

    json figures = json::array();
    for (const auto& f : {"irf.csv", "irf_cumulative.csv", "irf_sign.csv", "total_effect.csv"}) {
        if (fs::exists(out_path(f))) {
            figures.push_back(f);
            any = true;
        }
    }
    report["figure_data"] = figures;

    for (const auto& f : {"regress_summary.json", "spvar_summary.json", "truth.json"}) {
        const std::string path = out_path(f);
        if (!fs::exists(path)) continue;
        std::ifstream in(path);
        json j;
        try {
            in >> j;
        } catch (const json::exception&) {
            continue;
        }
        std::string key = f;
        key = key.substr(0, key.find('.'));
        report[key] = j;
        any = true;
    }

    if (!any) throw NoOutputs("no stage outputs found under " + cfg_.output_dir);
    auto out = open_out(out_path("report.json"));
    out << report.dump(2) << "\n";
}

} // namespace fxres
