#include "scadda/warp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "scadda/errors.hpp"

namespace scadda {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

WarpWindow WarpWindow::absolute(double half_width) {
    if (!(half_width >= 0.0))
        throw ConfigError("WarpWindow: half-width must be >= 0");
    return WarpWindow(Kind::absolute, half_width);
}

WarpWindow WarpWindow::fraction(double frac) {
    if (!(frac > 0.0 && frac < 1.0))
        throw ConfigError("WarpWindow: fraction must lie in (0, 1)");
    return WarpWindow(Kind::fraction, frac);
}

WarpWindow WarpWindow::from_param(double value) {
    if (!(value >= 0.0))
        throw ConfigError("window_param must be >= 0, got " + std::to_string(value));
    if (value > 0.0 && value < 1.0) return fraction(value);
    return absolute(value);
}

double WarpWindow::effective_half_width(std::size_t m, std::size_t n) const {
    const double len_gap = m > n ? static_cast<double>(m - n)
                                 : static_cast<double>(n - m);
    double resolved = 0.0;
    switch (kind_) {
    case Kind::unconstrained:
        return static_cast<double>(std::max(m, n));
    case Kind::absolute:
        resolved = value_;
        break;
    case Kind::fraction:
        resolved = std::ceil(value_ * static_cast<double>(std::max(m, n)));
        break;
    }
    return std::max(resolved, len_gap);
}

std::vector<double> z_normalize(std::span<const double> x) {
    if (x.empty()) throw ConfigError("z_normalize: empty series");
    const double n = static_cast<double>(x.size());

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;

    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= n; // population variance

    std::vector<double> out(x.size());
    if (var == 0.0) return out; // constant series -> all zeros
    const double sigma = std::sqrt(var);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / sigma;
    return out;
}

namespace {

double median_inplace(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 0) {
        const double lo = *std::max_element(v.begin(), v.begin() + mid);
        return (lo + hi) / 2.0;
    }
    return hi;
}

} // namespace

std::vector<double> robust_z_normalize(std::span<const double> x) {
    if (x.empty()) throw ConfigError("robust_z_normalize: empty series");

    std::vector<double> work(x.begin(), x.end());
    const double med = median_inplace(work);
    for (std::size_t i = 0; i < x.size(); ++i) work[i] = std::fabs(x[i] - med);
    const double mad = median_inplace(work);

    std::vector<double> out(x.size());
    const double scale = 1.4826 * mad;
    if (scale == 0.0) return out;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - med) / scale;
    return out;
}

DtwStats dtw_distance_stats(std::span<const double> x, std::span<const double> y,
                            const WarpWindow& window) {
    if (x.empty() || y.empty()) throw ConfigError("dtw_distance: empty series");

    const std::size_t m = x.size();
    const std::size_t n = y.size();
    const double xi = window.effective_half_width(m, n);
    const double slope = static_cast<double>(n) / static_cast<double>(m);
    const int jump = static_cast<int>(std::ceil(slope)) + 1;

    // Two-row DP over cells (i, j) with |i * n/m - j| <= xi; everything
    // outside the band is +inf. Row ranges only move up as i grows, so each
    // row clears just its own span plus the overhang the next row can read.
    std::vector<double> prev(n + 1, kInf), cur(n + 1, kInf);
    prev[0] = 0.0;
    std::size_t visited = 0;

    for (std::size_t i = 1; i <= m; ++i) {
        const double center = slope * static_cast<double>(i);
        const int jlo = std::max(1, static_cast<int>(std::ceil(center - xi)));
        const int jhi = std::min(static_cast<int>(n),
                                 static_cast<int>(std::floor(center + xi)));

        const int clear_hi = std::min(static_cast<int>(n), jhi + jump);
        for (int j = jlo - 1; j <= clear_hi; ++j) cur[j] = kInf;

        for (int j = jlo; j <= jhi; ++j) {
            const double d = x[i - 1] - y[j - 1];
            const double best = std::min({prev[j], prev[j - 1], cur[j - 1]});
            cur[j] = d * d + best;
            ++visited;
        }
        std::swap(prev, cur);
    }

    return {std::sqrt(prev[n]), visited};
}

double dtw_distance(std::span<const double> x, std::span<const double> y,
                    const WarpWindow& window) {
    return dtw_distance_stats(x, y, window).distance;
}

DistanceMatrix temporal_distance_matrix(const std::vector<std::vector<double>>& series,
                                        const WarpWindow& window, bool z_score,
                                        bool robust_z, int workers) {
    const std::size_t n = series.size();
    if (n < 2)
        throw DataError("temporal_distance_matrix: need at least 2 series");
    for (std::size_t i = 0; i < n; ++i) {
        if (series[i].empty())
            throw DataError("temporal_distance_matrix: empty series at row " +
                            std::to_string(i));
    }

    const std::vector<std::vector<double>>* input = &series;
    std::vector<std::vector<double>> normalized;
    if (z_score) {
        normalized.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            normalized[i] = robust_z ? robust_z_normalize(series[i])
                                     : z_normalize(series[i]);
        input = &normalized;
    }

    DistanceMatrix gamma(n);
    detail::parallel_for(n, workers, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j)
            gamma.set(i, j, dtw_distance((*input)[i], (*input)[j], window));
    });
    return gamma;
}

} // namespace scadda
