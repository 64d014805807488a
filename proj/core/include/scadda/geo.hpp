#pragma once

#include <cmath>

namespace scadda {

// Latitude/longitude pair in degrees.
struct GeoPoint {
    double lat = 0.0; // [-90, +90]
    double lon = 0.0; // [-180, +180]
};

inline bool is_valid(const GeoPoint& p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) &&
           p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon <= 180.0;
}

// IUGG mean Earth radius.
inline constexpr double kMeanEarthRadiusKm = 6371.0088;

// Sphere model used by the great-circle metrics. One instance is fixed for
// a whole run so distances stay comparable to the configured s_limit.
struct EarthModel {
    double mean_radius_km = kMeanEarthRadiusKm;
};

enum class Metric {
    orthodromic, // Vincenty special case on the sphere, kilometers
    euclidean,   // planar distance in raw coordinate units (degrees)
};

// Great-circle distance in km via the special case of the Vincenty formula
// (two-argument arctangent form, well-conditioned at coincident and
// antipodal points). Symmetric bit-for-bit in its arguments.
double vincenty_distance(GeoPoint a, GeoPoint b, const EarthModel& earth = {});

// Planar distance on raw (lat, lon) tuples.
double euclidean_distance(const GeoPoint& a, const GeoPoint& b);

// Great-circle distance in km via the haversine formula. Kept as a
// cross-check for vincenty_distance; both describe the same sphere.
double haversine_distance(const GeoPoint& a, const GeoPoint& b,
                          const EarthModel& earth = {});

// Dispatch on the configured metric.
double spatial_distance(const GeoPoint& a, const GeoPoint& b, Metric metric,
                        const EarthModel& earth = {});

} // namespace scadda
