#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fxres/dates.hpp"

namespace fxres {

enum class Frequency { Weekly, Quarterly, Annual };

const char* frequency_name(Frequency f);
Frequency frequency_from_name(const std::string& name);

struct Observation {
    std::string country;
    Date date;
    std::string variable;
    double value = 0.0;
};

// Long-format country x date x variable panel. Observations are kept sorted
// by (variable, country, date) and are immutable after construction; all
// transforms return a new table.
class PanelTable {
public:
    PanelTable() = default;

    // Validates key uniqueness and the frequency grid, computes the
    // balanced flag. Throws DuplicateKey / FrequencyMismatch.
    static PanelTable from_observations(std::vector<Observation> obs, Frequency freq);

    Frequency frequency() const { return freq_; }
    bool balanced() const { return balanced_; }
    size_t size() const { return obs_.size(); }
    bool empty() const { return obs_.empty(); }

    const std::vector<Observation>& observations() const { return obs_; }

    std::vector<std::string> countries() const;
    std::vector<std::string> variables() const;
    std::vector<Date> dates() const;

    bool has_variable(const std::string& variable) const;

    // (date, value) series for one (country, variable), sorted by date.
    std::vector<std::pair<Date, double>> series(const std::string& country,
                                                const std::string& variable) const;
    std::vector<double> series_values(const std::string& country,
                                      const std::string& variable) const;

    // All values of one variable pooled over countries and dates.
    std::vector<double> pooled_values(const std::string& variable) const;

    std::optional<double> value_at(const std::string& country, Date date,
                                   const std::string& variable) const;

    // Observations restricted to [start, end] (inclusive; unset = open).
    PanelTable filter_dates(std::optional<Date> start, std::optional<Date> end) const;

    // Drops every date at which any (country, variable) cell is missing;
    // the result is balanced by construction.
    PanelTable balance() const;

private:
    std::vector<Observation> obs_;
    Frequency freq_ = Frequency::Quarterly;
    bool balanced_ = false;
};

// CSV I/O. Long format, header `country,date,variable,value`, ISO-8601
// dates, '.' decimal separator. Column order in the file may differ from
// the canonical header; names decide.
PanelTable load_panel_csv(const std::string& path, Frequency declared);
void save_panel_csv(const PanelTable& table, const std::string& path);

// Shortest decimal string that parses back to the same double.
std::string format_numeric(double v);

// Union of two tables' observations (keys must not collide).
PanelTable merge_panels(const PanelTable& a, const PanelTable& b);

// Clamp each variable's pooled sample at the given percentile bounds
// (type-7 quantiles). Bounds in percent, 0 <= lower < upper <= 100.
PanelTable winsorize(const PanelTable& table, double lower_pct, double upper_pct,
                     const std::vector<std::string>& variables = {});

// (x - pooled mean) / pooled sample SD per listed variable.
PanelTable zscore_normalize(const PanelTable& table, const std::vector<std::string>& variables);

// (x - min) / (max - min) per listed variable.
PanelTable minmax_normalize(const PanelTable& table, const std::vector<std::string>& variables);

// r_t = 100 * (ln p_t - ln p_{t-1}); length n-1. Throws NonPositiveValue.
std::vector<double> log_return(std::span<const double> prices);

enum class EconomyClass { AE, EME };

struct CountryMeta {
    std::string country;
    EconomyClass economy_class = EconomyClass::EME;
    // AREAER-style flexibility index, 1 (least flexible) .. 6 (free float)
    double fx_regime_index = 6.0;
    // 0 (open) .. 1 (closed)
    double capital_control_index = 0.0;
};

// `country,economy_class[,fx_regime_index][,capital_control_index]`
std::vector<CountryMeta> load_meta_csv(const std::string& path);
void save_meta_csv(const std::vector<CountryMeta>& meta, const std::string& path);

} // namespace fxres
