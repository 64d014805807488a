#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scadda/matrix.hpp"

namespace scadda {

// Sakoe-Chiba band specification. A fraction in (0, 1) resolves against the
// longer series; for unequal lengths the effective half-width is widened to
// |m - n| so both corners of the cost matrix stay reachable.
class WarpWindow {
public:
    static WarpWindow unconstrained() { return WarpWindow(Kind::unconstrained, 0.0); }
    static WarpWindow absolute(double half_width);
    static WarpWindow fraction(double frac);

    // CLI convention: values below 1 are a fraction of the series length,
    // anything else an absolute half-width.
    static WarpWindow from_param(double value);

    bool is_unconstrained() const { return kind_ == Kind::unconstrained; }

    // max(resolved half-width, |m - n|); fractions resolve as
    // ceil(frac * max(m, n)).
    double effective_half_width(std::size_t m, std::size_t n) const;

private:
    enum class Kind { unconstrained, absolute, fraction };
    WarpWindow(Kind kind, double value) : kind_(kind), value_(value) {}

    Kind kind_;
    double value_;
};

// Default band: 10% of the longer series.
inline WarpWindow default_warp_window() { return WarpWindow::fraction(0.1); }

// Rescale to sample mean 0 and population standard deviation 1.
// Constant series map to all zeros.
std::vector<double> z_normalize(std::span<const double> x);

// Median/MAD variant (MAD scaled by 1.4826); constant series map to zeros.
std::vector<double> robust_z_normalize(std::span<const double> x);

struct DtwStats {
    double distance = 0.0;
    std::size_t visited_cells = 0; // DP cells evaluated inside the band
};

// Dynamic time warping: minimum over admissible monotone paths of
// sqrt(sum of squared step differences). Distance-like but not a metric;
// the triangle inequality can fail.
double dtw_distance(std::span<const double> x, std::span<const double> y,
                    const WarpWindow& window = WarpWindow::unconstrained());

DtwStats dtw_distance_stats(std::span<const double> x, std::span<const double> y,
                            const WarpWindow& window = WarpWindow::unconstrained());

// Pairwise DTW table over the (optionally z-normalized) series. Upper
// triangle computed and mirrored; deterministic for any worker count.
DistanceMatrix temporal_distance_matrix(const std::vector<std::vector<double>>& series,
                                        const WarpWindow& window,
                                        bool z_score = false,
                                        bool robust_z = false,
                                        int workers = 1);

} // namespace scadda
