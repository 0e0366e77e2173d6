#include "fxres/clustering.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "fxres/errors.hpp"
#include "fxres/kernels.hpp"
#include "fxres/rng.hpp"
#include "fxres/stats.hpp"

namespace fxres {

const char* regime_group_name(RegimeGroup g) {
    switch (g) {
        case RegimeGroup::FreeFloat: return "FreeFloat";
        case RegimeGroup::Managed: return "Managed";
        case RegimeGroup::All: return "All";
    }
    return "All";
}

namespace {

constexpr int kMaxLloydIterations = 300;

struct LloydRun {
    std::vector<int> assignment;
    std::vector<std::vector<double>> centroids;
    double wcss = std::numeric_limits<double>::infinity();
    bool ok = false;
};

double compute_wcss(const std::vector<std::vector<double>>& pts, const std::vector<int>& assign,
                    const std::vector<std::vector<double>>& centroids) {
    double w = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        w += kernels::sqdist(pts[i], centroids[static_cast<size_t>(assign[i])]);
    }
    return w;
}

LloydRun lloyd_from_init(const std::vector<std::vector<double>>& pts, int k,
                         const std::vector<size_t>& init_idx) {
    const size_t n = pts.size();
    const size_t d = pts[0].size();
    LloydRun run;
    run.centroids.resize(static_cast<size_t>(k));
    for (int c = 0; c < k; ++c) run.centroids[static_cast<size_t>(c)] = pts[init_idx[static_cast<size_t>(c)]];
    run.assignment.assign(n, -1);

    double prev_wcss = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
        // assignment step
        bool changed = false;
        for (size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = kernels::sqdist(pts[i], run.centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double dist = kernels::sqdist(pts[i], run.centroids[static_cast<size_t>(c)]);
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            if (run.assignment[i] != best) {
                run.assignment[i] = best;
                changed = true;
            }
        }
        // update step
        std::vector<std::vector<double>> sums(static_cast<size_t>(k),
                                              std::vector<double>(d, 0.0));
        std::vector<size_t> counts(static_cast<size_t>(k), 0);
        for (size_t i = 0; i < n; ++i) {
            const auto c = static_cast<size_t>(run.assignment[i]);
            kernels::axpy(1.0, pts[i], sums[c]);
            ++counts[c];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<size_t>(c)] == 0) {
                return run; // dead restart, run.ok stays false
            }
            for (size_t j = 0; j < d; ++j) {
                run.centroids[static_cast<size_t>(c)][j] =
                    sums[static_cast<size_t>(c)][j] /
                    static_cast<double>(counts[static_cast<size_t>(c)]);
            }
        }
        const double wcss = compute_wcss(pts, run.assignment, run.centroids);
        assert(wcss <= prev_wcss + 1e-9 * (1.0 + std::fabs(prev_wcss)));
        prev_wcss = wcss;
        if (!changed) break;
    }
    run.wcss = prev_wcss;
    run.ok = true;
    return run;
}

// Enumerate k-subsets of [0, n) in lexicographic order.
bool next_combination(std::vector<size_t>& idx, size_t n) {
    const size_t k = idx.size();
    size_t i = k;
    while (i-- > 0) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// C(n,k) saturating at cap+1.
uint64_t choose_capped(size_t n, size_t k, uint64_t cap) {
    if (k > n) return 0;
    uint64_t r = 1;
    for (size_t i = 0; i < k; ++i) {
        r = r * (n - i) / (i + 1);
        if (r > cap) return cap + 1;
    }
    return r;
}

} // namespace

KmeansResult kmeans(const std::vector<std::vector<double>>& points, int k, uint64_t seed,
                    int restarts) {
    const size_t n = points.size();
    if (k < 1 || n <= static_cast<size_t>(k)) {
        throw TooFewPoints("kmeans needs more points than clusters (n=" + std::to_string(n) +
                           ", k=" + std::to_string(k) + ")");
    }
    if (restarts < 1) throw InvalidConfig("kmeans restarts must be >= 1");
    const size_t d = points[0].size();
    for (const auto& p : points) {
        if (p.size() != d) throw InvalidConfig("kmeans points must share one dimension");
    }

    // Build the list of initial centroid index sets, one per Lloyd run.
    std::vector<std::vector<size_t>> inits;
    const uint64_t n_subsets = choose_capped(n, static_cast<size_t>(k),
                                             static_cast<uint64_t>(restarts));
    if (n_subsets <= static_cast<uint64_t>(restarts)) {
        std::vector<size_t> idx(static_cast<size_t>(k));
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        do {
            inits.push_back(idx);
        } while (next_combination(idx, n));
    } else {
        for (int r = 0; r < restarts; ++r) {
            Rng rng(subseed(seed, "kmeans.restart", static_cast<uint64_t>(r)));
            inits.push_back(rng.sample_without_replacement(n, static_cast<size_t>(k)));
        }
    }

    KmeansResult best;
    best.seed = seed;
    best.restarts = restarts;
    best.wcss = std::numeric_limits<double>::infinity();
    bool any_ok = false;
    for (size_t r = 0; r < inits.size(); ++r) {
        LloydRun run = lloyd_from_init(points, k, inits[r]);
        if (!run.ok) continue;
        any_ok = true;
        if (run.wcss < best.wcss) {
            best.wcss = run.wcss;
            best.assignment = std::move(run.assignment);
            best.centroids = std::move(run.centroids);
            best.best_restart = static_cast<int>(r);
        }
    }
    if (!any_ok) {
        throw EmptyCluster("every restart produced an empty cluster (duplicate points?)");
    }
    return best;
}

int label_strong_cluster(const std::map<std::string, std::array<double, 2>>& medians_by_factor,
                         const std::map<std::string, FactorDirection>& directions,
                         const std::string& tie_break) {
    int wins0 = 0, wins1 = 0;
    for (const auto& [factor, med] : medians_by_factor) {
        auto it = directions.find(factor);
        if (it == directions.end()) {
            throw InvalidConfig("no direction specified for factor '" + factor + "'");
        }
        const bool high_is_strong = it->second == FactorDirection::HighIsStrong;
        if (med[0] == med[1]) continue;
        const bool cluster0_wins = high_is_strong ? med[0] > med[1] : med[0] < med[1];
        if (cluster0_wins) ++wins0;
        else ++wins1;
    }
    if (wins0 != wins1) return wins0 > wins1 ? 0 : 1;

    auto tb = medians_by_factor.find(tie_break);
    if (tb == medians_by_factor.end()) return 1;
    auto dir = directions.find(tie_break);
    const bool high_is_strong =
        dir == directions.end() || dir->second == FactorDirection::HighIsStrong;
    const bool cluster0_wins = high_is_strong ? tb->second[0] > tb->second[1]
                                              : tb->second[0] < tb->second[1];
    return cluster0_wins ? 0 : 1;
}

std::map<std::string, FactorDirection> default_factor_directions(
    const std::vector<std::string>& factors) {
    std::map<std::string, FactorDirection> dir;
    for (const auto& f : factors) {
        dir[f] = f == "ShortRate" ? FactorDirection::LowIsStrong : FactorDirection::HighIsStrong;
    }
    return dir;
}

namespace {

std::array<double, 2> cluster_medians_for_factor(const PanelTable& panel,
                                                 const std::map<std::string, int>& members,
                                                 const std::string& factor) {
    std::vector<double> pool1, pool2;
    for (const auto& [country, cluster] : members) {
        const auto vals = panel.series_values(country, factor);
        auto& pool = cluster == 1 ? pool1 : pool2;
        pool.insert(pool.end(), vals.begin(), vals.end());
    }
    if (pool1.empty() || pool2.empty()) {
        throw EmptyVariable("factor '" + factor + "' missing for one cluster");
    }
    return {median(std::move(pool1)), median(std::move(pool2))};
}

ClusterAssignment cluster_one_group(const PanelTable& zscored, RegimeGroup group,
                                    const std::vector<std::string>& countries,
                                    const std::vector<std::string>& factors, uint64_t seed,
                                    int restarts) {
    if (countries.size() < 3) {
        throw RegimeGroupTooSmall(std::string(regime_group_name(group)) + " group has " +
                                  std::to_string(countries.size()) + " countries, need >= 3");
    }
    // feature vector: per-country median of each z-scored factor
    std::vector<std::vector<double>> features;
    features.reserve(countries.size());
    for (const auto& c : countries) {
        std::vector<double> f;
        f.reserve(factors.size());
        for (const auto& factor : factors) {
            auto vals = zscored.series_values(c, factor);
            if (vals.empty()) {
                throw EmptyVariable("country '" + c + "' has no data for factor '" + factor +
                                    "'");
            }
            f.push_back(median(std::move(vals)));
        }
        features.push_back(std::move(f));
    }

    const KmeansResult km =
        kmeans(features, 2, subseed(seed, regime_group_name(group)), restarts);

    ClusterAssignment out;
    out.group = group;
    out.centroids = km.centroids;
    out.wcss = km.wcss;
    out.seed = seed;
    out.restarts = restarts;
    out.factors = factors;
    // provisional labels 1/2 from the raw kmeans labels 0/1
    for (size_t i = 0; i < countries.size(); ++i) {
        out.assignments[countries[i]] = km.assignment[i] + 1;
    }

    // renumber so the strong cluster is 2
    std::map<std::string, std::array<double, 2>> medians;
    for (const auto& factor : factors) {
        medians[factor] = cluster_medians_for_factor(zscored, out.assignments, factor);
    }
    const int strong = label_strong_cluster(medians, default_factor_directions(factors));
    if (strong == 0) {
        for (auto& [country, cluster] : out.assignments) cluster = 3 - cluster;
        std::swap(out.centroids[0], out.centroids[1]);
    }
    return out;
}

} // namespace

std::vector<ClusterAssignment> cluster_countries(const PanelTable& zscored_panel,
                                                 const std::vector<CountryMeta>& meta,
                                                 const std::vector<std::string>& factors,
                                                 bool split_by_regime, uint64_t seed,
                                                 int restarts) {
    std::vector<std::string> free_float, managed, all;
    for (const auto& m : meta) {
        all.push_back(m.country);
        if (m.fx_regime_index >= 6.0) free_float.push_back(m.country);
        else managed.push_back(m.country);
    }
    std::sort(all.begin(), all.end());
    std::sort(free_float.begin(), free_float.end());
    std::sort(managed.begin(), managed.end());

    std::vector<ClusterAssignment> out;
    if (split_by_regime) {
        out.push_back(cluster_one_group(zscored_panel, RegimeGroup::FreeFloat, free_float,
                                        factors, seed, restarts));
        out.push_back(cluster_one_group(zscored_panel, RegimeGroup::Managed, managed, factors,
                                        seed, restarts));
    } else {
        out.push_back(
            cluster_one_group(zscored_panel, RegimeGroup::All, all, factors, seed, restarts));
    }
    return out;
}

ClusterProfile cluster_profile(const PanelTable& raw_panel, const ClusterAssignment& assignment,
                               const std::vector<std::string>& factors,
                               const std::map<std::string, FactorDirection>& directions) {
    ClusterProfile profile;
    profile.group = assignment.group;
    for (const auto& factor : factors) {
        profile.medians[factor] =
            cluster_medians_for_factor(raw_panel, assignment.assignments, factor);
    }
    profile.strong_cluster = label_strong_cluster(profile.medians, directions) + 1;
    return profile;
}

} // namespace fxres
