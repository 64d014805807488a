#include "scadda/density.hpp"

#include <cmath>
#include <string>

#include "parallel.hpp"
#include "scadda/errors.hpp"

namespace scadda {

double scott_bandwidth(std::size_t n, std::size_t dim) {
    if (n == 0) throw ConfigError("scott_bandwidth: n must be >= 1");
    if (dim == 0) throw ConfigError("scott_bandwidth: dim must be >= 1");
    return std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(dim) + 4.0));
}

double silverman_bandwidth(std::size_t n, std::size_t dim) {
    if (n == 0) throw ConfigError("silverman_bandwidth: n must be >= 1");
    if (dim == 0) throw ConfigError("silverman_bandwidth: dim must be >= 1");
    const double d = static_cast<double>(dim);
    return std::pow(static_cast<double>(n) * (d + 2.0) / 4.0, -1.0 / (d + 4.0));
}

double BandwidthSpec::resolve(std::size_t n, std::size_t dim) const {
    switch (rule) {
    case Rule::scott: return scott_bandwidth(n, dim);
    case Rule::silverman: return silverman_bandwidth(n, dim);
    case Rule::fixed:
        if (!(value > 0.0))
            throw ConfigError("bandwidth: fixed value must be > 0, got " +
                              std::to_string(value));
        return value;
    }
    throw InternalError("BandwidthSpec: unknown rule");
}

DensityModel DensityModel::fit(std::span<const GeoPoint> points, double bandwidth,
                               int workers) {
    if (!(bandwidth > 0.0))
        throw ConfigError("DensityModel: bandwidth must be > 0");

    DensityModel model;
    model.points_.assign(points.begin(), points.end());
    model.bandwidth_ = bandwidth;
    model.densities_.resize(points.size());

    detail::parallel_for(points.size(), workers, [&model](std::size_t i) {
        model.densities_[i] = model.evaluate(model.points_[i]);
    });

    double sum = 0.0;
    for (double g : model.densities_) sum += g;
    model.mean_density_ = sum / static_cast<double>(model.densities_.size());
    return model;
}

double DensityModel::evaluate(const GeoPoint& x) const {
    const double inv_two_beta_sq = 1.0 / (2.0 * bandwidth_ * bandwidth_);
    double sum = 0.0;
    for (const GeoPoint& p : points_) {
        const double dlat = x.lat - p.lat;
        const double dlon = x.lon - p.lon;
        sum += std::exp(-(dlat * dlat + dlon * dlon) * inv_two_beta_sq);
    }
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * bandwidth_ * bandwidth_);
    return norm * sum / static_cast<double>(points_.size());
}

double logistic_weight(double g, double g_mean, double k) {
    if (k == 0.0) return 1.0;
    const double t = k * (g - g_mean);
    if (t > 700.0) return 2.0;
    if (t < -700.0) return 0.0;
    return 2.0 / (1.0 + std::exp(-t));
}

DistanceMatrix spatial_distance_matrix(std::span<const GeoPoint> points,
                                       double steepness, Metric metric,
                                       const BandwidthSpec& bandwidth,
                                       Algorithm algorithm, RescaleForm form,
                                       int workers, const EarthModel& earth) {
    const std::size_t n = points.size();
    if (n < 2)
        throw DataError("spatial_distance_matrix: need at least 2 points");
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_valid(points[i]))
            throw DataError("spatial_distance_matrix: invalid coordinates at row " +
                            std::to_string(i));
    }

    DistanceMatrix delta(n);

    if (algorithm == Algorithm::stdbscan) {
        detail::parallel_for(n, workers, [&](std::size_t i) {
            for (std::size_t j = i + 1; j < n; ++j)
                delta.set(i, j, spatial_distance(points[i], points[j], metric, earth));
        });
        return delta;
    }

    const double beta = bandwidth.resolve(n, 2);
    const DensityModel model = DensityModel::fit(points, beta, workers);
    const auto& g = model.densities();
    const double g_mean = model.mean_density();

    detail::parallel_for(n, workers, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = spatial_distance(points[i], points[j], metric, earth);
            double weight;
            if (form == RescaleForm::mean_of_weights) {
                weight = (logistic_weight(g[i], g_mean, steepness) +
                          logistic_weight(g[j], g_mean, steepness)) / 2.0;
            } else {
                weight = logistic_weight((g[i] + g[j]) / 2.0, g_mean, steepness);
            }
            delta.set(i, j, s * weight);
        }
    });
    return delta;
}

} // namespace scadda
