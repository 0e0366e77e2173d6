#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fxres/panel.hpp"

namespace fxres {

enum class RegimeGroup { FreeFloat, Managed, All };
const char* regime_group_name(RegimeGroup g);

struct KmeansResult {
    std::vector<int> assignment;               // point index -> cluster 0..k-1
    std::vector<std::vector<double>> centroids;
    double wcss = 0.0;
    uint64_t seed = 0;
    int restarts = 0;
    int best_restart = -1;
};

// Lloyd's algorithm with seeded restarts. Initial centroids are k distinct
// points; when C(n,k) does not exceed the restart budget every distinct
// initial subset is tried, otherwise subsets are sampled uniformly without
// replacement per restart. Returns the minimum-WCSS run (ties broken by
// lowest restart index). Iteration stops when assignments are unchanged or
// after 300 iterations.
KmeansResult kmeans(const std::vector<std::vector<double>>& points, int k, uint64_t seed,
                    int restarts = 50);

enum class FactorDirection { HighIsStrong, LowIsStrong };

// Majority vote over factor-by-factor median comparisons; ties broken by
// the tie_break factor. Returns the winning cluster label (0 or 1).
int label_strong_cluster(const std::map<std::string, std::array<double, 2>>& medians_by_factor,
                         const std::map<std::string, FactorDirection>& directions,
                         const std::string& tie_break = "FinancialDevelopment");

struct ClusterAssignment {
    RegimeGroup group = RegimeGroup::All;
    std::map<std::string, int> assignments;    // country -> {1, 2}; 2 = strong
    std::vector<std::vector<double>> centroids;
    double wcss = 0.0;
    uint64_t seed = 0;
    int restarts = 0;
    std::vector<std::string> factors;
};

struct ClusterProfile {
    RegimeGroup group = RegimeGroup::All;
    // factor -> {cluster-1 median, cluster-2 median} over pooled
    // country-quarter observations of the members
    std::map<std::string, std::array<double, 2>> medians;
    int strong_cluster = 2;
};

// Clusters countries on their per-country medians of z-scored quarterly
// factors, separately per FX-regime group when split_by_regime is set.
// Labels are renumbered so cluster 2 is the strong cluster.
std::vector<ClusterAssignment> cluster_countries(const PanelTable& zscored_panel,
                                                 const std::vector<CountryMeta>& meta,
                                                 const std::vector<std::string>& factors,
                                                 bool split_by_regime, uint64_t seed,
                                                 int restarts = 50);

// Per-cluster factor medians over the raw (unscaled) panel.
ClusterProfile cluster_profile(const PanelTable& raw_panel, const ClusterAssignment& assignment,
                               const std::vector<std::string>& factors,
                               const std::map<std::string, FactorDirection>& directions);

// Default direction map: every factor HighIsStrong except ShortRate.
std::map<std::string, FactorDirection> default_factor_directions(
    const std::vector<std::string>& factors);

} // namespace fxres
