#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scadda/density.hpp"
#include "scadda/geo.hpp"
#include "scadda/matrix.hpp"
#include "scadda/warp.hpp"

namespace scadda {

// The full tuning surface of one clustering run.
struct ClusterParams {
    double s_limit = 0.0;         // max spatial distance (strict <)
    double t_limit = 0.0;         // max temporal distance (strict <)
    int min_neighbors = 1;        // lambda, count excludes the point itself
    double steepness = 0.0;       // k of the logistic rescaling
    WarpWindow window = default_warp_window();
    double outlier_perc = 100.0;  // o; below 100 enables re-iteration
    Metric metric = Metric::orthodromic;
    Algorithm algorithm = Algorithm::scadda;
    bool z_score = false;
    BandwidthSpec bandwidth{};
};

// Knobs outside the core parameter table.
struct ClusterOptions {
    RescaleForm rescale_form = RescaleForm::mean_of_weights;
    bool robust_z = false;
    int workers = 1;
    EarthModel earth{};
};

// Indices i != f with spatial(f,i) < eps_s and temporal(f,i) < eps_t,
// ascending. Both inequalities are strict.
std::vector<int> neighbors(std::size_t f, const DistanceMatrix& spatial,
                           const DistanceMatrix& temporal, double eps_s,
                           double eps_t);

struct ClusterResult {
    // 0 = outlier, 1..cluster_count = clusters, no gaps.
    std::vector<int> labels;
    int cluster_count = 0;
    // Labels >= first_pseudo_label were formed during outlier reassignment;
    // 0 means no pseudo-clusters exist.
    int first_pseudo_label = 0;
    bool cap_unreachable = false;
    int reassignment_passes = 0;

    bool is_pseudo(int label) const {
        return first_pseudo_label > 0 && label >= first_pseudo_label;
    }
    int pseudo_cluster_count() const {
        return first_pseudo_label > 0 ? cluster_count - first_pseudo_label + 1 : 0;
    }
    std::size_t outlier_count() const;
    double outlier_fraction() const;
};

// Seed-set expansion over precomputed distance tables. A point with at
// least min_neighbors qualifying neighbors founds a cluster; joined points
// extend the frontier only if their own neighborhood also reaches the
// threshold (border points are claimed but not expanded). Outliers that a
// growing cluster reaches are claimed as border points; positive labels are
// never reassigned. Expansion order is fixed by point index, so labels are
// deterministic. Runs the outlier re-iteration when outlier_perc < 100.
ClusterResult cluster_matrices(const DistanceMatrix& spatial,
                               const DistanceMatrix& temporal,
                               const ClusterParams& params);

// Builds both distance tables from raw inputs, then clusters them.
ClusterResult cluster(std::span<const GeoPoint> points,
                      const std::vector<std::vector<double>>& series,
                      const ClusterParams& params,
                      const ClusterOptions& options = {});

// Re-runs the expansion loop over remaining outliers with both epsilon
// limits doubled each pass, forming pseudo-clusters that continue the label
// numbering, until the outlier fraction reaches outlier_perc, a pass
// assigns nothing with both limits beyond the largest matrix entry, or 64
// passes elapse. Never relabels a non-outlier point.
ClusterResult reassign_outliers(const ClusterResult& base,
                                const DistanceMatrix& spatial,
                                const DistanceMatrix& temporal,
                                const ClusterParams& params);

// Empirical spatial limit: mean of the two per-coordinate population
// standard deviations divided by the squared mean of the two coordinate
// half-ranges. Unit-sensitive: operates on raw coordinates (degrees), so
// pair it with the euclidean metric or rescale externally.
double heuristic_s_limit(std::span<const GeoPoint> points);

// Empirical temporal limit: the full-matrix mean |t|^-2 * sum of all
// entries, zero diagonal included.
double heuristic_t_limit(const DistanceMatrix& temporal);

} // namespace scadda
