#include "scadda/geo.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "scadda/errors.hpp"

namespace scadda {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

} // namespace

double vincenty_distance(GeoPoint a, GeoPoint b, const EarthModel& earth) {
    // Canonical argument order makes D(a,b) and D(b,a) the same sequence of
    // floating-point operations, hence bit-identical.
    if (std::tie(b.lat, b.lon) < std::tie(a.lat, a.lon)) std::swap(a, b);

    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dlon = std::fabs(b.lon - a.lon) * kDegToRad;

    const double sin_phi1 = std::sin(phi1), cos_phi1 = std::cos(phi1);
    const double sin_phi2 = std::sin(phi2), cos_phi2 = std::cos(phi2);
    const double sin_dlon = std::sin(dlon), cos_dlon = std::cos(dlon);

    const double num = std::hypot(cos_phi2 * sin_dlon,
                                  cos_phi1 * sin_phi2 - sin_phi1 * cos_phi2 * cos_dlon);
    const double den = sin_phi1 * sin_phi2 + cos_phi1 * cos_phi2 * cos_dlon;

    // atan2 keeps the central angle in [0, pi] for every quadrant, including
    // antipodal pairs where den approaches -1.
    return earth.mean_radius_km * std::atan2(num, den);
}

double euclidean_distance(const GeoPoint& a, const GeoPoint& b) {
    return std::hypot(b.lat - a.lat, b.lon - a.lon);
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b,
                          const EarthModel& earth) {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi_half = (b.lat - a.lat) * kDegToRad / 2.0;
    const double dlon_half = (b.lon - a.lon) * kDegToRad / 2.0;

    const double s1 = std::sin(dphi_half);
    const double s2 = std::sin(dlon_half);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;

    return 2.0 * earth.mean_radius_km * std::asin(std::min(1.0, std::sqrt(h)));
}

double spatial_distance(const GeoPoint& a, const GeoPoint& b, Metric metric,
                        const EarthModel& earth) {
    switch (metric) {
    case Metric::orthodromic: return vincenty_distance(a, b, earth);
    case Metric::euclidean: return euclidean_distance(a, b);
    }
    throw InternalError("spatial_distance: unknown metric");
}

} // namespace scadda
