#include "scadda/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "scadda/errors.hpp"
#include "scadda/rng.hpp"

namespace scadda {

namespace {

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            return out;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool parse_double(std::string_view s, double& value) {
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value,
                                           std::chars_format::general);
    return ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out.is_open())
        throw DataError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open())
        throw DataError("cannot open '" + path.string() + "' for reading");
    return in;
}

} // namespace

SpatialTable load_spatial_csv(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    const std::string name = path.string();

    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "id,lat,lon")
        throw DataError(name + ": expected header 'id,lat,lon'");

    SpatialTable table;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 3)
            throw DataError(name + " line " + std::to_string(line_no) +
                            ": expected 3 fields, got " + std::to_string(fields.size()));
        const std::string& id = fields[0];
        if (id.empty())
            throw DataError(name + " line " + std::to_string(line_no) + ": empty id");
        if (!seen.insert(id).second)
            throw DataError(name + " line " + std::to_string(line_no) +
                            ": duplicate id '" + id + "'");

        // Missing coordinate (empty cell or NaN): drop the row, keep count.
        bool missing = false;
        double coord[2] = {0.0, 0.0};
        const char* field_name[2] = {"lat", "lon"};
        for (int k = 0; k < 2; ++k) {
            const std::string& cell = fields[k + 1];
            if (cell.empty()) { missing = true; continue; }
            if (!parse_double(cell, coord[k]))
                throw DataError(name + " line " + std::to_string(line_no) +
                                ": malformed " + field_name[k] + " '" + cell + "'");
            if (std::isnan(coord[k])) missing = true;
        }
        if (missing) {
            ++table.dropped_rows;
            continue;
        }

        const GeoPoint p{coord[0], coord[1]};
        if (!is_valid(p)) {
            const bool lat_bad = !(std::isfinite(p.lat) && p.lat >= -90.0 && p.lat <= 90.0);
            throw DataError(name + " line " + std::to_string(line_no) + ": " +
                            (lat_bad ? "lat" : "lon") + " out of range (" +
                            (lat_bad ? fields[1] : fields[2]) + ")");
        }
        table.ids.push_back(id);
        table.points.push_back(p);
    }
    return table;
}

TemporalTable load_temporal_csv(const std::filesystem::path& path,
                                const std::vector<std::string>& spatial_ids) {
    std::ifstream in = open_for_read(path);
    const std::string name = path.string();

    std::string line;
    if (!std::getline(in, line))
        throw DataError(name + ": empty file");
    const auto header = split_fields(strip_cr(line));
    if (header.size() < 2 || header[0] != "id")
        throw DataError(name + ": expected header 'id,t1,...,tM'");
    const std::size_t m = header.size() - 1;

    std::unordered_map<std::string, std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != m + 1)
            throw DataError(name + " line " + std::to_string(line_no) +
                            ": ragged row, expected " + std::to_string(m + 1) +
                            " fields, got " + std::to_string(fields.size()));
        std::vector<double> series(m);
        for (std::size_t k = 0; k < m; ++k) {
            if (!parse_double(fields[k + 1], series[k]) || !std::isfinite(series[k]))
                throw DataError(name + " line " + std::to_string(line_no) +
                                ": non-numeric value '" + fields[k + 1] +
                                "' in column t" + std::to_string(k + 1));
        }
        if (!rows.emplace(fields[0], std::move(series)).second)
            throw DataError(name + " line " + std::to_string(line_no) +
                            ": duplicate id '" + fields[0] + "'");
    }

    TemporalTable table;
    std::string missing;
    for (const std::string& id : spatial_ids) {
        auto it = rows.find(id);
        if (it == rows.end()) {
            missing += missing.empty() ? id : ", " + id;
            continue;
        }
        table.ids.push_back(id);
        table.series.push_back(it->second);
    }
    if (!missing.empty())
        throw DataError(name + ": missing time series for id(s): " + missing);
    return table;
}

DensityGrid DensityGrid::from_cells(const std::vector<double>& lats,
                                    const std::vector<double>& lons,
                                    const std::vector<double>& vals) {
    if (lats.size() != lons.size() || lats.size() != vals.size())
        throw InternalError("DensityGrid: mismatched cell arrays");
    if (lats.empty()) throw DataError("density grid: no cells");

    DensityGrid grid;
    grid.lat_centers = lats;
    grid.lon_centers = lons;
    std::sort(grid.lat_centers.begin(), grid.lat_centers.end());
    std::sort(grid.lon_centers.begin(), grid.lon_centers.end());
    grid.lat_centers.erase(std::unique(grid.lat_centers.begin(), grid.lat_centers.end()),
                           grid.lat_centers.end());
    grid.lon_centers.erase(std::unique(grid.lon_centers.begin(), grid.lon_centers.end()),
                           grid.lon_centers.end());

    const std::size_t rows = grid.lat_centers.size();
    const std::size_t cols = grid.lon_centers.size();
    grid.values.assign(rows * cols, 0.0);

    std::vector<bool> filled(rows * cols, false);
    double total = 0.0;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        if (!std::isfinite(lats[k]) || !std::isfinite(lons[k]) || !std::isfinite(vals[k]))
            throw DataError("density grid: non-finite cell entry");
        if (vals[k] < 0.0)
            throw DataError("density grid: negative density value");
        const auto i = static_cast<std::size_t>(
            std::lower_bound(grid.lat_centers.begin(), grid.lat_centers.end(), lats[k]) -
            grid.lat_centers.begin());
        const auto j = static_cast<std::size_t>(
            std::lower_bound(grid.lon_centers.begin(), grid.lon_centers.end(), lons[k]) -
            grid.lon_centers.begin());
        const std::size_t cell = i * cols + j;
        if (filled[cell])
            throw DataError("density grid: duplicate cell at lat=" +
                            format_double(lats[k]) + " lon=" + format_double(lons[k]));
        filled[cell] = true;
        grid.values[cell] = vals[k];
        total += vals[k];
    }
    if (total <= 0.0) throw DataError("density grid: all values are zero");

    grid.probabilities.resize(grid.values.size());
    for (std::size_t k = 0; k < grid.values.size(); ++k)
        grid.probabilities[k] = grid.values[k] / total;
    return grid;
}

DensityGrid DensityGrid::from_csv(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    const std::string name = path.string();

    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "lat,lon,value")
        throw DataError(name + ": expected header 'lat,lon,value'");

    std::vector<double> lats, lons, vals;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 3)
            throw DataError(name + " line " + std::to_string(line_no) +
                            ": expected 3 fields");
        double v[3];
        for (int k = 0; k < 3; ++k) {
            if (!parse_double(fields[k], v[k]))
                throw DataError(name + " line " + std::to_string(line_no) +
                                ": malformed value '" + fields[k] + "'");
        }
        lats.push_back(v[0]);
        lons.push_back(v[1]);
        vals.push_back(v[2]);
    }
    if (lats.empty()) throw DataError(name + ": no grid cells");
    return from_cells(lats, lons, vals);
}

namespace {

std::pair<double, double> center_bounds(const std::vector<double>& centers,
                                        std::size_t i) {
    const std::size_t k = centers.size();
    if (k == 1) return {centers[0] - 0.5, centers[0] + 0.5};
    const double lo = i == 0 ? centers[0] - (centers[1] - centers[0]) / 2.0
                             : (centers[i - 1] + centers[i]) / 2.0;
    const double hi = i == k - 1
                          ? centers[k - 1] + (centers[k - 1] - centers[k - 2]) / 2.0
                          : (centers[i] + centers[i + 1]) / 2.0;
    return {lo, hi};
}

} // namespace

std::pair<double, double> DensityGrid::lat_bounds(std::size_t i) const {
    return center_bounds(lat_centers, i);
}

std::pair<double, double> DensityGrid::lon_bounds(std::size_t j) const {
    return center_bounds(lon_centers, j);
}

SpatialTable sample_from_grid(const DensityGrid& grid, std::size_t n,
                              std::uint64_t seed) {
    if (n == 0) throw ConfigError("sample_from_grid: n must be >= 1");
    if (grid.probabilities.empty())
        throw DataError("sample_from_grid: empty grid");

    std::vector<double> cdf(grid.probabilities.size());
    double run = 0.0;
    for (std::size_t k = 0; k < cdf.size(); ++k) {
        run += grid.probabilities[k];
        cdf[k] = run;
    }
    // Close the distribution at the last cell that carries mass, so rounding
    // shortfall can never push a draw into a trailing zero-probability cell.
    for (std::size_t k = cdf.size(); k-- > 0;) {
        cdf[k] = 1.0;
        if (grid.probabilities[k] > 0.0) break;
    }

    const std::size_t cols = grid.lon_centers.size();
    Rng rng(seed);
    SpatialTable table;
    table.ids.reserve(n);
    table.points.reserve(n);

    // Per sample: one uniform for the cell, two for the in-cell jitter.
    for (std::size_t s = 0; s < n; ++s) {
        const double u = rng.uniform();
        const auto cell = static_cast<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        const std::size_t i = cell / cols;
        const std::size_t j = cell % cols;
        const auto [lat_lo, lat_hi] = grid.lat_bounds(i);
        const auto [lon_lo, lon_hi] = grid.lon_bounds(j);
        table.ids.push_back(std::to_string(s));
        table.points.push_back({rng.uniform(lat_lo, lat_hi),
                                rng.uniform(lon_lo, lon_hi)});
    }
    return table;
}

ToyDataset generate_toy_dataset(std::uint64_t seed) {
    static const double kMeans[4][2] = {{4, 4}, {4, 8}, {8, 4}, {8, 8}};
    static const double kSigmas[2] = {1.0, 0.1};

    Rng rng(seed);
    ToyDataset toy;
    std::size_t row = 0;
    for (int q = 0; q < 4; ++q) {
        for (double sigma : kSigmas) {
            for (std::size_t s = 0; s < kToySamplesPerComponent; ++s, ++row) {
                const auto [z1, z2] = rng.normal_pair();
                toy.spatial.ids.push_back(std::to_string(row));
                toy.spatial.points.push_back(
                    {kMeans[q][0] + sigma * z1, kMeans[q][1] + sigma * z2});
                toy.quadrants.push_back(q + 1);
            }
        }
    }
    toy.temporal.ids = toy.spatial.ids;
    toy.temporal.series.assign(toy.spatial.ids.size(),
                               std::vector<double>(kToySeriesLength, 0.0));
    return toy;
}

void write_spatial_csv(const std::filesystem::path& path, const SpatialTable& table) {
    std::ofstream out = open_for_write(path);
    out << "id,lat,lon\n";
    for (std::size_t i = 0; i < table.ids.size(); ++i)
        out << table.ids[i] << ',' << format_double(table.points[i].lat) << ','
            << format_double(table.points[i].lon) << '\n';
}

void write_temporal_csv(const std::filesystem::path& path, const TemporalTable& table) {
    std::ofstream out = open_for_write(path);
    out << "id";
    const std::size_t m = table.series.empty() ? 0 : table.series[0].size();
    for (std::size_t k = 1; k <= m; ++k) out << ",t" << k;
    out << '\n';
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
        out << table.ids[i];
        for (double v : table.series[i]) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_truth_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& ids,
                     const std::vector<int>& quadrants) {
    std::ofstream out = open_for_write(path);
    out << "id,quadrant\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
        out << ids[i] << ',' << quadrants[i] << '\n';
}

void write_labels_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& ids,
                      const std::vector<int>& labels) {
    if (ids.size() != labels.size())
        throw InternalError("write_labels_csv: ids and labels differ in length");
    std::ofstream out = open_for_write(path);
    out << "id,cluster\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
        out << ids[i] << ',' << labels[i] << '\n';
}

void write_summary_csv(const std::filesystem::path& path,
                       const ClusterResult& result,
                       const std::vector<std::vector<double>>& series) {
    if (result.labels.size() != series.size())
        throw InternalError("write_summary_csv: labels and series differ in length");

    const std::size_t n = result.labels.size();
    const std::size_t m = series.empty() ? 0 : series[0].size();
    const std::size_t outliers = result.outlier_count();

    char perc[32];
    std::snprintf(perc, sizeof(perc), "%.4f", 100.0 * result.outlier_fraction());

    std::ofstream out = open_for_write(path);
    out << "# clusters=" << result.cluster_count
        << " pseudo_clusters=" << result.pseudo_cluster_count()
        << " outliers=" << outliers << " outlier_perc=" << perc
        << " cap_unreachable=" << (result.cap_unreachable ? 1 : 0) << '\n';
    out << "cluster,pseudo,count,percentage";
    for (std::size_t k = 1; k <= m; ++k) out << ",mean_t" << k;
    out << '\n';

    auto write_group = [&](int label) {
        std::vector<double> mean(m, 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (result.labels[i] != label) continue;
            ++count;
            for (std::size_t k = 0; k < m; ++k) mean[k] += series[i][k];
        }
        if (count == 0) return;
        char pct[32];
        std::snprintf(pct, sizeof(pct), "%.4f",
                      100.0 * static_cast<double>(count) / static_cast<double>(n));
        out << label << ',' << (result.is_pseudo(label) ? 1 : 0) << ',' << count
            << ',' << pct;
        for (std::size_t k = 0; k < m; ++k)
            out << ',' << format_double(mean[k] / static_cast<double>(count));
        out << '\n';
    };

    if (outliers > 0) write_group(0);
    for (int c = 1; c <= result.cluster_count; ++c) write_group(c);
}

} // namespace scadda
