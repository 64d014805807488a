#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scadda/geo.hpp"
#include "scadda/matrix.hpp"

namespace scadda {

// Scott's rule of thumb: n^(-1/(d+4)).
double scott_bandwidth(std::size_t n, std::size_t dim);

// Silverman's rule of thumb: (n*(d+2)/4)^(-1/(d+4)).
double silverman_bandwidth(std::size_t n, std::size_t dim);

// Bandwidth selection: one of the two rules of thumb, or a direct value.
struct BandwidthSpec {
    enum class Rule { scott, silverman, fixed };

    Rule rule = Rule::scott;
    double value = 0.0; // used only when rule == fixed; must be > 0

    double resolve(std::size_t n, std::size_t dim) const;
};

// Gaussian kernel density estimate over a point set, evaluated on raw
// (lat, lon) tuples with the planar Euclidean norm and an isotropic scalar
// bandwidth. Densities for the fitted points are computed once and cached;
// the outlier re-iteration reuses them.
class DensityModel {
public:
    static DensityModel fit(std::span<const GeoPoint> points, double bandwidth,
                            int workers = 1);

    // (1/n) * sum_i (2*pi*beta^2)^(-1/2) * exp(-||x - p_i||^2 / (2*beta^2)).
    // Strictly positive for every x.
    double evaluate(const GeoPoint& x) const;

    const std::vector<double>& densities() const { return densities_; }
    double mean_density() const { return mean_density_; }
    double bandwidth() const { return bandwidth_; }
    std::size_t size() const { return points_.size(); }

private:
    std::vector<GeoPoint> points_;
    std::vector<double> densities_;
    double bandwidth_ = 1.0;
    double mean_density_ = 0.0;
};

// Centered logistic rescaling weight 2 / (1 + exp(-k*(g - g_mean))).
// Range (0, 2); exactly 1 when g == g_mean or k == 0. Saturates to the
// exact limits 0 and 2 once the exponent magnitude exceeds 700.
double logistic_weight(double g, double g_mean, double k);

enum class Algorithm {
    scadda,   // density-rescaled spatial distances
    stdbscan, // raw spatial distances
};

// Two ways to combine the per-point densities into one pair weight. The
// method statement averages the two logistic weights; the pseudocode variant
// applies the logistic once to the averaged density. They differ for k != 0.
enum class RescaleForm {
    mean_of_weights,        // s * (f(g_i) + f(g_j)) / 2
    weight_of_mean_density, // s * f((g_i + g_j) / 2)
};

// Pairwise spatial distances, density-rescaled when algorithm == scadda.
// Only the upper triangle is computed and mirrored. Pair computations may be
// spread over `workers` threads; every entry is a pure per-slot write, so
// the result is identical for any worker count.
DistanceMatrix spatial_distance_matrix(std::span<const GeoPoint> points,
                                       double steepness, Metric metric,
                                       const BandwidthSpec& bandwidth,
                                       Algorithm algorithm,
                                       RescaleForm form = RescaleForm::mean_of_weights,
                                       int workers = 1,
                                       const EarthModel& earth = {});

} // namespace scadda
