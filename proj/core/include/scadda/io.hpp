#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scadda/cluster.hpp"
#include "scadda/geo.hpp"

namespace scadda {

struct SpatialTable {
    std::vector<std::string> ids; // unique, aligned with points
    std::vector<GeoPoint> points;
    std::size_t dropped_rows = 0; // rows with missing coordinates
};

struct TemporalTable {
    std::vector<std::string> ids; // aligned with the spatial table after join
    std::vector<std::vector<double>> series; // equal lengths
};

// Header `id,lat,lon`. Rows with an empty or NaN coordinate are dropped and
// counted; an out-of-range coordinate is a hard error naming row and field.
SpatialTable load_spatial_csv(const std::filesystem::path& path);

// Header `id,t1,...,tM`. Every spatial id must be present; rows are returned
// in spatial-table order. Extra ids are ignored. Ragged rows and non-numeric
// cells are errors with the offending row.
TemporalTable load_temporal_csv(const std::filesystem::path& path,
                                const std::vector<std::string>& spatial_ids);

// Regular grid of density values keyed by cell-center coordinates.
// Cell bounds sit at midpoints between adjacent centers; the outermost
// cells extend symmetrically, and a dimension with a single center gets
// half-width 0.5.
struct DensityGrid {
    std::vector<double> lat_centers; // sorted unique
    std::vector<double> lon_centers; // sorted unique
    std::vector<double> values;        // row-major [lat][lon], >= 0
    std::vector<double> probabilities; // values normalized to sum 1

    static DensityGrid from_cells(const std::vector<double>& lats,
                                  const std::vector<double>& lons,
                                  const std::vector<double>& vals);
    // CSV with header `lat,lon,value`.
    static DensityGrid from_csv(const std::filesystem::path& path);

    std::size_t cell_count() const { return values.size(); }
    std::pair<double, double> lat_bounds(std::size_t i) const;
    std::pair<double, double> lon_bounds(std::size_t j) const;
};

// Resampling step of sampling importance resampling: draw n cells i.i.d.
// with the grid probabilities and jitter each sample uniformly within the
// cell bounds. Pure function of (grid, n, seed).
SpatialTable sample_from_grid(const DensityGrid& grid, std::size_t n,
                              std::uint64_t seed);

inline constexpr std::size_t kToySamplesPerComponent = 100;
inline constexpr std::size_t kToySeriesLength = 12;

struct ToyDataset {
    SpatialTable spatial;
    TemporalTable temporal;          // identical all-zero dummy series
    std::vector<int> quadrants;      // ground truth, 1..4 per point
};

// Synthetic validation set: 100 samples from each of eight independent
// bivariate normals — means on {(4,4),(4,8),(8,4),(8,8)}, standard
// deviations 1.0 and 0.1 per mean — so every quadrant carries a density
// spike at its center. 800 points total, dummy all-zero series attached.
ToyDataset generate_toy_dataset(std::uint64_t seed);

void write_spatial_csv(const std::filesystem::path& path, const SpatialTable& table);
void write_temporal_csv(const std::filesystem::path& path, const TemporalTable& table);
void write_truth_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& ids,
                     const std::vector<int>& quadrants);

// Header `id,cluster`; outliers are written as 0, row order preserved.
void write_labels_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& ids,
                      const std::vector<int>& labels);

// Per-group count, share, pseudo flag, and per-timestep mean series.
// Leading comment line carries the run totals and the cap flag; the
// outlier group (cluster 0) is listed first when present.
void write_summary_csv(const std::filesystem::path& path,
                       const ClusterResult& result,
                       const std::vector<std::vector<double>>& series);

} // namespace scadda
