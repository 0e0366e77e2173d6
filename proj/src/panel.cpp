#include "fxres/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <tuple>

#include "fxres/errors.hpp"
#include "fxres/kernels.hpp"
#include "fxres/stats.hpp"

namespace fxres {

const char* frequency_name(Frequency f) {
    switch (f) {
        case Frequency::Weekly: return "weekly";
        case Frequency::Quarterly: return "quarterly";
        case Frequency::Annual: return "annual";
    }
    return "quarterly";
}

Frequency frequency_from_name(const std::string& name) {
    if (name == "weekly") return Frequency::Weekly;
    if (name == "quarterly") return Frequency::Quarterly;
    if (name == "annual") return Frequency::Annual;
    throw InvalidConfig("unknown frequency '" + name + "'");
}

namespace {

bool obs_key_less(const Observation& a, const Observation& b) {
    return std::tie(a.variable, a.country, a.date) < std::tie(b.variable, b.country, b.date);
}

void check_grid(const std::vector<Observation>& obs, Frequency freq) {
    if (obs.empty()) return;
    switch (freq) {
        case Frequency::Weekly: {
            // all dates must share the week-ending weekday of the grid
            const int anchor = weekday(obs.front().date);
            for (const auto& o : obs) {
                if (weekday(o.date) != anchor) {
                    throw FrequencyMismatch("date " + format_iso_date(o.date) +
                                            " is off the weekly grid anchored at weekday " +
                                            std::to_string(anchor));
                }
            }
            break;
        }
        case Frequency::Quarterly:
            for (const auto& o : obs) {
                if (!is_quarter_end(o.date)) {
                    throw FrequencyMismatch("date " + format_iso_date(o.date) +
                                            " is not a quarter-end date");
                }
            }
            break;
        case Frequency::Annual:
            for (const auto& o : obs) {
                if (!is_year_end(o.date)) {
                    throw FrequencyMismatch("date " + format_iso_date(o.date) +
                                            " is not a year-end date");
                }
            }
            break;
    }
}

bool compute_balanced(const std::vector<Observation>& obs) {
    if (obs.empty()) return false;
    std::set<std::string> countries;
    std::set<std::pair<Date, std::string>> cells;
    for (const auto& o : obs) {
        countries.insert(o.country);
        cells.insert({o.date, o.variable});
    }
    return obs.size() == countries.size() * cells.size();
}

} // namespace

PanelTable PanelTable::from_observations(std::vector<Observation> obs, Frequency freq) {
    std::sort(obs.begin(), obs.end(), obs_key_less);
    for (size_t i = 1; i < obs.size(); ++i) {
        const auto& a = obs[i - 1];
        const auto& b = obs[i];
        if (a.country == b.country && a.date == b.date && a.variable == b.variable) {
            throw DuplicateKey("(" + a.country + ", " + format_iso_date(a.date) + ", " +
                               a.variable + ")");
        }
    }
    check_grid(obs, freq);
    PanelTable t;
    t.obs_ = std::move(obs);
    t.freq_ = freq;
    t.balanced_ = compute_balanced(t.obs_);
    return t;
}

std::vector<std::string> PanelTable::countries() const {
    std::set<std::string> s;
    for (const auto& o : obs_) s.insert(o.country);
    return {s.begin(), s.end()};
}

std::vector<std::string> PanelTable::variables() const {
    std::set<std::string> s;
    for (const auto& o : obs_) s.insert(o.variable);
    return {s.begin(), s.end()};
}

std::vector<Date> PanelTable::dates() const {
    std::set<Date> s;
    for (const auto& o : obs_) s.insert(o.date);
    return {s.begin(), s.end()};
}

bool PanelTable::has_variable(const std::string& variable) const {
    auto it = std::lower_bound(obs_.begin(), obs_.end(), variable,
                               [](const Observation& o, const std::string& v) {
                                   return o.variable < v;
                               });
    return it != obs_.end() && it->variable == variable;
}

std::vector<std::pair<Date, double>> PanelTable::series(const std::string& country,
                                                        const std::string& variable) const {
    std::vector<std::pair<Date, double>> out;
    Observation probe{country, Date{0}, variable, 0.0};
    auto lo = std::lower_bound(obs_.begin(), obs_.end(), probe,
                               [](const Observation& a, const Observation& b) {
                                   return std::tie(a.variable, a.country) <
                                          std::tie(b.variable, b.country);
                               });
    for (auto it = lo; it != obs_.end() && it->variable == variable && it->country == country;
         ++it) {
        out.emplace_back(it->date, it->value);
    }
    return out;
}

std::vector<double> PanelTable::series_values(const std::string& country,
                                              const std::string& variable) const {
    std::vector<double> out;
    for (const auto& [d, v] : series(country, variable)) out.push_back(v);
    return out;
}

std::vector<double> PanelTable::pooled_values(const std::string& variable) const {
    std::vector<double> out;
    for (const auto& o : obs_) {
        if (o.variable == variable) out.push_back(o.value);
    }
    return out;
}

std::optional<double> PanelTable::value_at(const std::string& country, Date date,
                                           const std::string& variable) const {
    Observation probe{country, date, variable, 0.0};
    auto it = std::lower_bound(obs_.begin(), obs_.end(), probe, obs_key_less);
    if (it != obs_.end() && it->country == country && it->date == date &&
        it->variable == variable) {
        return it->value;
    }
    return std::nullopt;
}

PanelTable PanelTable::filter_dates(std::optional<Date> start, std::optional<Date> end) const {
    std::vector<Observation> kept;
    for (const auto& o : obs_) {
        if (start && o.date < *start) continue;
        if (end && o.date > *end) continue;
        kept.push_back(o);
    }
    return from_observations(std::move(kept), freq_);
}

PanelTable PanelTable::balance() const {
    const auto cs = countries();
    std::map<Date, std::set<std::pair<std::string, std::string>>> present;
    std::set<std::string> vars;
    for (const auto& o : obs_) {
        present[o.date].insert({o.country, o.variable});
        vars.insert(o.variable);
    }
    const size_t full = cs.size() * vars.size();
    std::set<Date> complete;
    for (const auto& [d, cells] : present) {
        if (cells.size() == full) complete.insert(d);
    }
    std::vector<Observation> kept;
    for (const auto& o : obs_) {
        if (complete.count(o.date)) kept.push_back(o);
    }
    return from_observations(std::move(kept), freq_);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_value(const std::string& s, size_t line_no) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw MalformedRow("line " + std::to_string(line_no) + ": bad numeric value '" + s + "'");
    }
    return v;
}

} // namespace

// Round-trip exact formatting: shortest representation that parses back
// to the same double.
std::string format_numeric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(shorter, "%lf", &back);
        if (back == v) return shorter;
    }
    return buf;
}

PanelTable merge_panels(const PanelTable& a, const PanelTable& b) {
    std::vector<Observation> obs = a.observations();
    const auto& bo = b.observations();
    obs.insert(obs.end(), bo.begin(), bo.end());
    return PanelTable::from_observations(std::move(obs), a.frequency());
}

PanelTable load_panel_csv(const std::string& path, Frequency declared) {
    std::ifstream in(path);
    if (!in) throw MalformedRow("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw MalformedRow("empty file: " + path);

    const auto header = split_csv_line(line);
    int ci = -1, di = -1, vi = -1, xi = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "country") ci = static_cast<int>(i);
        else if (header[i] == "date") di = static_cast<int>(i);
        else if (header[i] == "variable") vi = static_cast<int>(i);
        else if (header[i] == "value") xi = static_cast<int>(i);
    }
    if (ci < 0 || di < 0 || vi < 0 || xi < 0) {
        throw MalformedRow("header must contain country,date,variable,value columns (" + path +
                           ")");
    }

    std::vector<Observation> obs;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) {
            throw MalformedRow("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(f.size()));
        }
        Observation o;
        o.country = f[static_cast<size_t>(ci)];
        try {
            o.date = parse_iso_date(f[static_cast<size_t>(di)]);
        } catch (const MalformedRow& e) {
            throw MalformedRow("line " + std::to_string(line_no) + ": " + e.what());
        }
        o.variable = f[static_cast<size_t>(vi)];
        o.value = parse_value(f[static_cast<size_t>(xi)], line_no);
        if (o.country.empty() || o.variable.empty()) {
            throw MalformedRow("line " + std::to_string(line_no) + ": empty country or variable");
        }
        obs.push_back(std::move(o));
    }
    return PanelTable::from_observations(std::move(obs), declared);
}

void save_panel_csv(const PanelTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MalformedRow("cannot open file for writing: " + path);
    out << "country,date,variable,value\n";
    // country-major order reads naturally in the output files
    std::vector<const Observation*> rows;
    rows.reserve(table.size());
    for (const auto& o : table.observations()) rows.push_back(&o);
    std::sort(rows.begin(), rows.end(), [](const Observation* a, const Observation* b) {
        return std::tie(a->country, a->date, a->variable) <
               std::tie(b->country, b->date, b->variable);
    });
    for (const auto* o : rows) {
        out << o->country << ',' << format_iso_date(o->date) << ',' << o->variable << ','
            << format_numeric(o->value) << '\n';
    }
}

namespace {

PanelTable transform_variables(const PanelTable& table, const std::vector<std::string>& variables,
                               const std::function<void(const std::string&, std::vector<double>&)>&
                                   pooled_transform) {
    std::vector<std::string> vars = variables.empty() ? table.variables() : variables;
    std::vector<Observation> obs = table.observations();

    for (const auto& var : vars) {
        std::vector<size_t> idx;
        for (size_t i = 0; i < obs.size(); ++i) {
            if (obs[i].variable == var) idx.push_back(i);
        }
        if (idx.empty()) throw EmptyVariable("no observations for variable '" + var + "'");
        std::vector<double> vals(idx.size());
        for (size_t k = 0; k < idx.size(); ++k) vals[k] = obs[idx[k]].value;
        pooled_transform(var, vals);
        for (size_t k = 0; k < idx.size(); ++k) obs[idx[k]].value = vals[k];
    }
    return PanelTable::from_observations(std::move(obs), table.frequency());
}

} // namespace

PanelTable winsorize(const PanelTable& table, double lower_pct, double upper_pct,
                     const std::vector<std::string>& variables) {
    if (!(0.0 <= lower_pct && lower_pct < upper_pct && upper_pct <= 100.0)) {
        throw InvalidConfig("winsorize bounds must satisfy 0 <= lower < upper <= 100");
    }
    return transform_variables(table, variables,
                               [&](const std::string&, std::vector<double>& vals) {
                                   const double lo = quantile_type7(vals, lower_pct / 100.0);
                                   const double hi = quantile_type7(vals, upper_pct / 100.0);
                                   kernels::clamp(vals, lo, hi);
                               });
}

PanelTable zscore_normalize(const PanelTable& table, const std::vector<std::string>& variables) {
    return transform_variables(table, variables,
                               [&](const std::string& var, std::vector<double>& vals) {
                                   const double m = mean(vals);
                                   const double sd = sample_sd(vals);
                                   if (sd == 0.0) {
                                       throw ZeroVariance("variable '" + var +
                                                          "' has zero pooled variance");
                                   }
                                   for (double& v : vals) v = (v - m) / sd;
                               });
}

PanelTable minmax_normalize(const PanelTable& table, const std::vector<std::string>& variables) {
    return transform_variables(table, variables,
                               [&](const std::string& var, std::vector<double>& vals) {
                                   const auto [mn, mx] =
                                       std::minmax_element(vals.begin(), vals.end());
                                   const double lo = *mn;
                                   const double hi = *mx;
                                   if (hi <= lo) {
                                       throw ZeroRange("variable '" + var +
                                                       "' has zero pooled range");
                                   }
                                   for (double& v : vals) v = (v - lo) / (hi - lo);
                               });
}

std::vector<double> log_return(std::span<const double> prices) {
    for (double p : prices) {
        if (!(p > 0.0)) {
            throw NonPositiveValue("log_return requires strictly positive inputs");
        }
    }
    std::vector<double> out;
    if (prices.size() < 2) return out;
    out.reserve(prices.size() - 1);
    for (size_t i = 1; i < prices.size(); ++i) {
        out.push_back(100.0 * (std::log(prices[i]) - std::log(prices[i - 1])));
    }
    return out;
}

std::vector<CountryMeta> load_meta_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedRow("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw MalformedRow("empty file: " + path);
    const auto header = split_csv_line(line);
    int ci = -1, ei = -1, ri = -1, ki = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "country") ci = static_cast<int>(i);
        else if (header[i] == "economy_class") ei = static_cast<int>(i);
        else if (header[i] == "fx_regime_index") ri = static_cast<int>(i);
        else if (header[i] == "capital_control_index") ki = static_cast<int>(i);
    }
    if (ci < 0 || ei < 0) {
        throw MalformedRow("meta header must contain country,economy_class (" + path + ")");
    }
    std::vector<CountryMeta> out;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        CountryMeta m;
        m.country = f[static_cast<size_t>(ci)];
        const std::string& cls = f[static_cast<size_t>(ei)];
        if (cls == "AE") m.economy_class = EconomyClass::AE;
        else if (cls == "EME") m.economy_class = EconomyClass::EME;
        else throw MalformedRow("line " + std::to_string(line_no) + ": economy_class must be AE or EME");
        if (ri >= 0) m.fx_regime_index = parse_value(f[static_cast<size_t>(ri)], line_no);
        if (ki >= 0) m.capital_control_index = parse_value(f[static_cast<size_t>(ki)], line_no);
        out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(),
              [](const CountryMeta& a, const CountryMeta& b) { return a.country < b.country; });
    return out;
}

void save_meta_csv(const std::vector<CountryMeta>& meta, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MalformedRow("cannot open file for writing: " + path);
    out << "country,economy_class,fx_regime_index,capital_control_index\n";
    for (const auto& m : meta) {
        out << m.country << ',' << (m.economy_class == EconomyClass::AE ? "AE" : "EME") << ','
            << format_numeric(m.fx_regime_index) << ',' << format_numeric(m.capital_control_index)
            << '\n';
    }
}

} // namespace fxres
