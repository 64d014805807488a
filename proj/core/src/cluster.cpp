#include "scadda/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scadda/errors.hpp"

namespace scadda {

namespace {

constexpr int kUnassigned = -2;
constexpr int kOutlier = -1;

void validate_params(const ClusterParams& p) {
    if (!(p.s_limit > 0.0)) throw ConfigError("s_limit must be > 0");
    if (!(p.t_limit >= 0.0)) throw ConfigError("t_limit must be >= 0");
    if (p.min_neighbors < 1) throw ConfigError("minimum_neighbors must be >= 1");
    if (!(p.steepness >= 0.0) || !std::isfinite(p.steepness))
        throw ConfigError("steepness must be a finite value >= 0");
    if (!(p.outlier_perc >= 0.0 && p.outlier_perc <= 100.0))
        throw ConfigError("outlier_perc must lie in [0, 100]");
}

// Neighbor query restricted to a subset of points, expressed in subset
// positions. `subset` is ascending; `pos` indexes into it.
std::vector<int> subset_neighbors(const std::vector<int>& subset, std::size_t pos,
                                  const DistanceMatrix& spatial,
                                  const DistanceMatrix& temporal, double eps_s,
                                  double eps_t) {
    std::vector<int> out;
    const std::size_t f = static_cast<std::size_t>(subset[pos]);
    for (std::size_t q = 0; q < subset.size(); ++q) {
        if (q == pos) continue;
        const std::size_t i = static_cast<std::size_t>(subset[q]);
        if (spatial(f, i) < eps_s && temporal(f, i) < eps_t)
            out.push_back(static_cast<int>(q));
    }
    return out;
}

// Seed-set expansion over `subset` (ascending point indices). Internal
// labels use kUnassigned/kOutlier; freshly founded clusters number
// next_label, next_label+1, ... Returns the number of clusters founded.
// Frontier order is append order, seeded ascending, so the traversal is
// fully determined by point index.
int expand_clusters(const std::vector<int>& subset, const DistanceMatrix& spatial,
                    const DistanceMatrix& temporal, double eps_s, double eps_t,
                    int min_neighbors, int next_label, std::vector<int>& labels) {
    int founded = 0;
    std::vector<int> frontier;

    for (std::size_t pos = 0; pos < subset.size(); ++pos) {
        if (labels[subset[pos]] != kUnassigned) continue;

        auto seed = subset_neighbors(subset, pos, spatial, temporal, eps_s, eps_t);
        if (static_cast<int>(seed.size()) < min_neighbors) {
            labels[subset[pos]] = kOutlier;
            continue;
        }

        const int c = next_label + founded;
        ++founded;
        labels[subset[pos]] = c;

        frontier.assign(seed.begin(), seed.end());
        for (std::size_t head = 0; head < frontier.size(); ++head) {
            const int qpos = frontier[head];
            int& ql = labels[subset[qpos]];
            if (ql == kOutlier) { ql = c; continue; } // border point, not expanded
            if (ql != kUnassigned) continue;
            ql = c;
            auto nb = subset_neighbors(subset, static_cast<std::size_t>(qpos),
                                       spatial, temporal, eps_s, eps_t);
            if (static_cast<int>(nb.size()) >= min_neighbors)
                frontier.insert(frontier.end(), nb.begin(), nb.end());
        }
    }
    return founded;
}

} // namespace

std::vector<int> neighbors(std::size_t f, const DistanceMatrix& spatial,
                           const DistanceMatrix& temporal, double eps_s,
                           double eps_t) {
    const std::size_t n = spatial.size();
    if (temporal.size() != n)
        throw ConfigError("neighbors: matrix dimensions differ");
    if (f >= n) throw ConfigError("neighbors: index out of range");

    std::vector<int> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == f) continue;
        if (spatial(f, i) < eps_s && temporal(f, i) < eps_t)
            out.push_back(static_cast<int>(i));
    }
    return out;
}

std::size_t ClusterResult::outlier_count() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 0));
}

double ClusterResult::outlier_fraction() const {
    if (labels.empty()) return 0.0;
    return static_cast<double>(outlier_count()) / static_cast<double>(labels.size());
}

ClusterResult cluster_matrices(const DistanceMatrix& spatial,
                               const DistanceMatrix& temporal,
                               const ClusterParams& params) {
    validate_params(params);
    const std::size_t n = spatial.size();
    if (temporal.size() != n)
        throw DataError("cluster: spatial and temporal tables have different sizes");
    if (n < 2) throw DataError("cluster: need at least 2 points");

    std::vector<int> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<int>(i);

    std::vector<int> labels(n, kUnassigned);
    const int founded = expand_clusters(all, spatial, temporal, params.s_limit,
                                        params.t_limit, params.min_neighbors,
                                        /*next_label=*/1, labels);

    // Closing shift: outliers to 0, clusters already 1..c.
    for (int& l : labels)
        if (l == kOutlier) l = 0;

    ClusterResult result;
    result.labels = std::move(labels);
    result.cluster_count = founded;

    if (params.outlier_perc < 100.0)
        result = reassign_outliers(result, spatial, temporal, params);
    return result;
}

ClusterResult reassign_outliers(const ClusterResult& base,
                                const DistanceMatrix& spatial,
                                const DistanceMatrix& temporal,
                                const ClusterParams& params) {
    constexpr int kMaxPasses = 64;

    ClusterResult result = base;
    if (params.outlier_perc >= 100.0) return result;

    const double cap = params.outlier_perc / 100.0;
    const double max_s = spatial.max_entry();
    const double max_t = temporal.max_entry();

    double eps_s = params.s_limit;
    double eps_t = params.t_limit;

    while (result.outlier_fraction() > cap) {
        if (result.reassignment_passes >= kMaxPasses) {
            result.cap_unreachable = true;
            break;
        }
        eps_s *= 2.0;
        eps_t *= 2.0;
        ++result.reassignment_passes;

        std::vector<int> outliers;
        for (std::size_t i = 0; i < result.labels.size(); ++i)
            if (result.labels[i] == 0) outliers.push_back(static_cast<int>(i));

        // Work on internal states so the expansion helper applies unchanged.
        for (int i : outliers) result.labels[i] = kUnassigned;
        const int founded = expand_clusters(outliers, spatial, temporal, eps_s,
                                            eps_t, params.min_neighbors,
                                            result.cluster_count + 1, result.labels);
        std::size_t assigned = 0;
        for (int i : outliers) {
            if (result.labels[i] == kUnassigned || result.labels[i] == kOutlier)
                result.labels[i] = 0;
            else
                ++assigned;
        }

        if (founded > 0 && result.first_pseudo_label == 0)
            result.first_pseudo_label = result.cluster_count + 1;
        result.cluster_count += founded;

        if (assigned == 0 && eps_s > max_s && eps_t > max_t) {
            result.cap_unreachable = true;
            break;
        }
    }
    return result;
}

ClusterResult cluster(std::span<const GeoPoint> points,
                      const std::vector<std::vector<double>>& series,
                      const ClusterParams& params, const ClusterOptions& options) {
    if (points.size() != series.size())
        throw DataError("cluster: " + std::to_string(points.size()) +
                        " points vs " + std::to_string(series.size()) +
                        " time series");
    validate_params(params);

    const DistanceMatrix delta = spatial_distance_matrix(
        points, params.steepness, params.metric, params.bandwidth,
        params.algorithm, options.rescale_form, options.workers, options.earth);
    const DistanceMatrix gamma = temporal_distance_matrix(
        series, params.window, params.z_score, options.robust_z, options.workers);

    return cluster_matrices(delta, gamma, params);
}

double heuristic_s_limit(std::span<const GeoPoint> points) {
    if (points.size() < 2)
        throw DataError("heuristic_s_limit: need at least 2 points");

    double mean_lat = 0.0, mean_lon = 0.0;
    double min_lat = points[0].lat, max_lat = points[0].lat;
    double min_lon = points[0].lon, max_lon = points[0].lon;
    for (const GeoPoint& p : points) {
        mean_lat += p.lat;
        mean_lon += p.lon;
        min_lat = std::min(min_lat, p.lat);
        max_lat = std::max(max_lat, p.lat);
        min_lon = std::min(min_lon, p.lon);
        max_lon = std::max(max_lon, p.lon);
    }
    const double n = static_cast<double>(points.size());
    mean_lat /= n;
    mean_lon /= n;

    double var_lat = 0.0, var_lon = 0.0;
    for (const GeoPoint& p : points) {
        var_lat += (p.lat - mean_lat) * (p.lat - mean_lat);
        var_lon += (p.lon - mean_lon) * (p.lon - mean_lon);
    }
    const double sigma_mean = (std::sqrt(var_lat / n) + std::sqrt(var_lon / n)) / 2.0;
    const double half_range_mean =
        ((max_lat - min_lat) / 2.0 + (max_lon - min_lon) / 2.0) / 2.0;

    if (half_range_mean == 0.0)
        throw DataError("heuristic_s_limit: all points are identical");
    return sigma_mean / (half_range_mean * half_range_mean);
}

double heuristic_t_limit(const DistanceMatrix& temporal) {
    const std::size_t n = temporal.size();
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (double v : temporal.data()) sum += v;
    return sum / (static_cast<double>(n) * static_cast<double>(n));
}

} // namespace scadda
