// scadda - batch spatio-temporal clustering over CSV inputs.
//
// Subcommands:
//   cluster      run SCADDA / ST-DBSCAN over spatial + temporal CSV tables
//   synth        write the synthetic eight-Gaussian validation dataset
//   sample-grid  draw coordinate samples from a density grid CSV
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal error.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "scadda/cluster.hpp"
#include "scadda/errors.hpp"
#include "scadda/io.hpp"

namespace {

struct ClusterCli {
    std::string config_path;
    std::string s_data;
    std::string t_data;
    std::string labels_out = "labels.csv";
    std::string summary_out = "summary.csv";
    double s_limit = 0.0;
    double t_limit = 0.0;
    bool s_limit_set = false;
    bool t_limit_set = false;
    int minimum_neighbors = 1;
    bool minimum_neighbors_set = false;
    double steepness = 0.0;
    bool steepness_set = false;
    double window_param = 0.1;
    std::string distance_measure = "orthodromic";
    double outlier_perc = 100.0;
    bool z_score = false;
    std::string algorithm = "scadda";
    std::string bandwidth = "scott";
    std::string rescale_form = "mean_of_weights";
    bool robust_z = false;
    int workers = 1;
};

struct SynthCli {
    std::uint64_t seed = 42;
    std::string out_prefix;
};

struct SampleGridCli {
    std::string grid;
    std::size_t n = 0;
    std::uint64_t seed = 42;
    std::string out;
};

// Shortest representation that parses back to the same double.
std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

scadda::BandwidthSpec parse_bandwidth(const std::string& text) {
    scadda::BandwidthSpec spec;
    if (text == "scott") {
        spec.rule = scadda::BandwidthSpec::Rule::scott;
    } else if (text == "silverman") {
        spec.rule = scadda::BandwidthSpec::Rule::silverman;
    } else {
        spec.rule = scadda::BandwidthSpec::Rule::fixed;
        try {
            std::size_t used = 0;
            spec.value = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
        } catch (const std::exception&) {
            throw scadda::ConfigError(
                "bandwidth: expected 'scott', 'silverman', or a positive number, got '" +
                text + "'");
        }
        if (!(spec.value > 0.0))
            throw scadda::ConfigError("bandwidth: fixed value must be > 0");
    }
    return spec;
}

scadda::Metric parse_metric(const std::string& text) {
    if (text == "orthodromic") return scadda::Metric::orthodromic;
    if (text == "euclidean") return scadda::Metric::euclidean;
    throw scadda::ConfigError("distance_measure: expected 'orthodromic' or 'euclidean'");
}

scadda::Algorithm parse_algorithm(const std::string& text) {
    if (text == "scadda") return scadda::Algorithm::scadda;
    if (text == "stdbscan") return scadda::Algorithm::stdbscan;
    throw scadda::ConfigError("algorithm: expected 'scadda' or 'stdbscan'");
}

scadda::RescaleForm parse_rescale_form(const std::string& text) {
    if (text == "mean_of_weights") return scadda::RescaleForm::mean_of_weights;
    if (text == "weight_of_mean_density")
        return scadda::RescaleForm::weight_of_mean_density;
    throw scadda::ConfigError(
        "rescale_form: expected 'mean_of_weights' or 'weight_of_mean_density'");
}

double parse_config_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw scadda::ConfigError("config: " + key + ": expected a number, got '" +
                                  text + "'");
    }
}

int parse_config_int(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw scadda::ConfigError("config: " + key + ": expected an integer, got '" +
                                  text + "'");
    }
}

bool parse_config_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw scadda::ConfigError("config: " + key + ": expected a boolean, got '" +
                              text + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Flat key=value config. Values apply only where the command line did not
// already provide the option, so flags always win.
void apply_config_file(ClusterCli& cli,
                       const std::map<std::string, const CLI::Option*>& options) {
    std::ifstream in(cli.config_path);
    if (!in.is_open())
        throw scadda::ConfigError("cannot open config file '" + cli.config_path + "'");

    const std::map<std::string, std::function<void(const std::string&)>> setters{
        {"s_data", [&](const std::string& v) { cli.s_data = v; }},
        {"t_data", [&](const std::string& v) { cli.t_data = v; }},
        {"labels_out", [&](const std::string& v) { cli.labels_out = v; }},
        {"summary_out", [&](const std::string& v) { cli.summary_out = v; }},
        {"s_limit",
         [&](const std::string& v) {
             cli.s_limit = parse_config_number("s_limit", v);
             cli.s_limit_set = true;
         }},
        {"t_limit",
         [&](const std::string& v) {
             cli.t_limit = parse_config_number("t_limit", v);
             cli.t_limit_set = true;
         }},
        {"minimum_neighbors",
         [&](const std::string& v) {
             cli.minimum_neighbors = parse_config_int("minimum_neighbors", v);
             cli.minimum_neighbors_set = true;
         }},
        {"steepness",
         [&](const std::string& v) {
             cli.steepness = parse_config_number("steepness", v);
             cli.steepness_set = true;
         }},
        {"window_param",
         [&](const std::string& v) {
             cli.window_param = parse_config_number("window_param", v);
         }},
        {"distance_measure",
         [&](const std::string& v) { cli.distance_measure = v; }},
        {"outlier_perc",
         [&](const std::string& v) {
             cli.outlier_perc = parse_config_number("outlier_perc", v);
         }},
        {"z_score",
         [&](const std::string& v) { cli.z_score = parse_config_bool("z_score", v); }},
        {"algorithm", [&](const std::string& v) { cli.algorithm = v; }},
        {"bandwidth", [&](const std::string& v) { cli.bandwidth = v; }},
        {"rescale_form", [&](const std::string& v) { cli.rescale_form = v; }},
        {"robust_z",
         [&](const std::string& v) {
             cli.robust_z = parse_config_bool("robust_z", v);
         }},
        {"workers",
         [&](const std::string& v) { cli.workers = parse_config_int("workers", v); }},
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw scadda::ConfigError("config line " + std::to_string(line_no) +
                                      ": expected key=value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        const auto setter = setters.find(key);
        if (setter == setters.end())
            throw scadda::ConfigError("config line " + std::to_string(line_no) +
                                      ": unknown key '" + key + "'");
        const auto opt = options.find(key);
        if (opt != options.end() && opt->second->count() > 0) continue;
        setter->second(value);
    }
}

int run_cluster(const ClusterCli& cli) {
    scadda::ClusterParams params;
    params.min_neighbors = cli.minimum_neighbors;
    params.steepness = cli.steepness;
    params.window = scadda::WarpWindow::from_param(cli.window_param);
    params.outlier_perc = cli.outlier_perc;
    params.metric = parse_metric(cli.distance_measure);
    params.algorithm = parse_algorithm(cli.algorithm);
    params.z_score = cli.z_score;
    params.bandwidth = parse_bandwidth(cli.bandwidth);

    scadda::ClusterOptions options;
    options.rescale_form = parse_rescale_form(cli.rescale_form);
    options.robust_z = cli.robust_z;
    options.workers = cli.workers;

    const scadda::SpatialTable spatial = scadda::load_spatial_csv(cli.s_data);
    if (spatial.dropped_rows > 0)
        std::cout << "info: dropped " << spatial.dropped_rows
                  << " row(s) with missing coordinates\n";
    const scadda::TemporalTable temporal =
        scadda::load_temporal_csv(cli.t_data, spatial.ids);

    const scadda::DistanceMatrix delta = scadda::spatial_distance_matrix(
        spatial.points, params.steepness, params.metric, params.bandwidth,
        params.algorithm, options.rescale_form, options.workers, options.earth);
    const scadda::DistanceMatrix gamma = scadda::temporal_distance_matrix(
        temporal.series, params.window, params.z_score, options.robust_z,
        options.workers);

    params.s_limit = cli.s_limit;
    params.t_limit = cli.t_limit;
    if (!cli.s_limit_set) {
        params.s_limit = scadda::heuristic_s_limit(spatial.points);
        std::printf("info: s_limit=%s (heuristic)\n", fmt_double(params.s_limit).c_str());
    }
    if (!cli.t_limit_set) {
        params.t_limit = scadda::heuristic_t_limit(gamma);
        std::printf("info: t_limit=%s (heuristic)\n", fmt_double(params.t_limit).c_str());
    }

    // Effective configuration, sufficient to reproduce the run.
    std::printf("config: s_data=%s\n", cli.s_data.c_str());
    std::printf("config: t_data=%s\n", cli.t_data.c_str());
    std::printf("config: s_limit=%s\n", fmt_double(params.s_limit).c_str());
    std::printf("config: t_limit=%s\n", fmt_double(params.t_limit).c_str());
    std::printf("config: minimum_neighbors=%d\n", params.min_neighbors);
    std::printf("config: steepness=%s\n", fmt_double(params.steepness).c_str());
    std::printf("config: window_param=%s\n", fmt_double(cli.window_param).c_str());
    std::printf("config: distance_measure=%s\n", cli.distance_measure.c_str());
    std::printf("config: outlier_perc=%s\n", fmt_double(params.outlier_perc).c_str());
    std::printf("config: z_score=%d\n", params.z_score ? 1 : 0);
    std::printf("config: algorithm=%s\n", cli.algorithm.c_str());
    std::printf("config: bandwidth=%s\n", cli.bandwidth.c_str());
    std::printf("config: rescale_form=%s\n", cli.rescale_form.c_str());
    std::printf("config: robust_z=%d\n", options.robust_z ? 1 : 0);
    std::printf("config: workers=%d\n", options.workers);
    std::printf("config: labels_out=%s\n", cli.labels_out.c_str());
    std::printf("config: summary_out=%s\n", cli.summary_out.c_str());

    const scadda::ClusterResult result =
        scadda::cluster_matrices(delta, gamma, params);

    scadda::write_labels_csv(cli.labels_out, spatial.ids, result.labels);
    scadda::write_summary_csv(cli.summary_out, result, temporal.series);

    std::printf("result: clusters=%d pseudo_clusters=%d outliers=%zu "
                "outlier_perc=%.4f cap_unreachable=%d\n",
                result.cluster_count, result.pseudo_cluster_count(),
                result.outlier_count(), 100.0 * result.outlier_fraction(),
                result.cap_unreachable ? 1 : 0);
    if (result.cap_unreachable)
        std::cout << "warning: outlier_perc cap unreachable, labels are best-effort\n";
    return 0;
}

int run_synth(const SynthCli& cli) {
    const scadda::ToyDataset toy = scadda::generate_toy_dataset(cli.seed);
    const std::string spatial_path = cli.out_prefix + "_spatial.csv";
    const std::string temporal_path = cli.out_prefix + "_temporal.csv";
    const std::string truth_path = cli.out_prefix + "_truth.csv";
    scadda::write_spatial_csv(spatial_path, toy.spatial);
    scadda::write_temporal_csv(temporal_path, toy.temporal);
    scadda::write_truth_csv(truth_path, toy.spatial.ids, toy.quadrants);
    std::cout << "wrote " << spatial_path << " (" << toy.spatial.ids.size()
              << " rows), " << temporal_path << ", " << truth_path << "\n";
    return 0;
}

int run_sample_grid(const SampleGridCli& cli) {
    const scadda::DensityGrid grid = scadda::DensityGrid::from_csv(cli.grid);
    const scadda::SpatialTable table =
        scadda::sample_from_grid(grid, cli.n, cli.seed);
    scadda::write_spatial_csv(cli.out, table);
    std::cout << "wrote " << cli.out << " (" << table.ids.size() << " samples)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SCADDA: density-rescaled spatio-temporal clustering"};
    app.require_subcommand(1);

    ClusterCli cluster_cli;
    std::map<std::string, const CLI::Option*> cluster_opts;
    CLI::App* cluster = app.add_subcommand(
        "cluster", "Cluster spatial coordinates with attached time series");
    cluster->add_option("--config", cluster_cli.config_path,
                        "Flat key=value config file; flags override its values");
    cluster_opts["s_data"] = cluster->add_option(
        "--s_data", cluster_cli.s_data, "Spatial CSV (header id,lat,lon)");
    cluster_opts["t_data"] = cluster->add_option(
        "--t_data", cluster_cli.t_data, "Temporal CSV (header id,t1,...,tM)");
    cluster_opts["s_limit"] = cluster->add_option(
        "--s_limit", cluster_cli.s_limit,
        "Max intra-cluster spatial distance; omitted -> empirical heuristic");
    cluster_opts["t_limit"] = cluster->add_option(
        "--t_limit", cluster_cli.t_limit,
        "Max intra-cluster temporal distance; omitted -> temporal-matrix mean");
    cluster_opts["minimum_neighbors"] =
        cluster->add_option("--minimum_neighbors", cluster_cli.minimum_neighbors,
                            "Minimum neighbors for non-outlier status");
    cluster_opts["steepness"] = cluster->add_option(
        "--steepness", cluster_cli.steepness, "Logistic rescaling steepness k");
    cluster_opts["window_param"] =
        cluster->add_option("--window_param", cluster_cli.window_param,
                            "Sakoe-Chiba half-width; <1 means fraction of series length")
            ->capture_default_str();
    cluster_opts["distance_measure"] =
        cluster->add_option("--distance_measure", cluster_cli.distance_measure,
                            "orthodromic | euclidean")
            ->capture_default_str();
    cluster_opts["outlier_perc"] =
        cluster->add_option("--outlier_perc", cluster_cli.outlier_perc,
                            "Max outlier percentage; <100 enables reassignment")
            ->capture_default_str();
    cluster_opts["z_score"] = cluster->add_flag(
        "--z_score", cluster_cli.z_score, "z-normalize time series before DTW");
    cluster_opts["algorithm"] =
        cluster->add_option("--algorithm", cluster_cli.algorithm,
                            "scadda | stdbscan")
            ->capture_default_str();
    cluster_opts["bandwidth"] =
        cluster->add_option("--bandwidth", cluster_cli.bandwidth,
                            "scott | silverman | positive number")
            ->capture_default_str();
    cluster_opts["rescale_form"] =
        cluster->add_option("--rescale_form", cluster_cli.rescale_form,
                            "mean_of_weights | weight_of_mean_density")
            ->capture_default_str();
    cluster_opts["robust_z"] = cluster->add_flag(
        "--robust_z", cluster_cli.robust_z,
        "median/MAD z-normalization instead of mean/sigma");
    cluster_opts["workers"] =
        cluster->add_option("--workers", cluster_cli.workers,
                            "Threads for the distance-matrix stages")
            ->capture_default_str()
            ->check(CLI::Range(1, 512));
    cluster_opts["labels_out"] =
        cluster->add_option("--labels_out", cluster_cli.labels_out,
                            "Output labels CSV")
            ->capture_default_str();
    cluster_opts["summary_out"] =
        cluster->add_option("--summary_out", cluster_cli.summary_out,
                            "Output per-cluster summary CSV")
            ->capture_default_str();

    SynthCli synth_cli;
    CLI::App* synth = app.add_subcommand(
        "synth", "Write the eight-Gaussian synthetic validation dataset");
    synth->add_option("--seed", synth_cli.seed, "RNG seed")->capture_default_str();
    synth->add_option("--out_prefix", synth_cli.out_prefix,
                      "Prefix for _spatial/_temporal/_truth CSV files")->required();

    SampleGridCli grid_cli;
    CLI::App* sample = app.add_subcommand(
        "sample-grid", "Sample coordinates from a density grid CSV");
    sample->add_option("--grid", grid_cli.grid,
                       "Grid CSV (header lat,lon,value)")->required();
    sample->add_option("--n", grid_cli.n, "Number of samples")->required();
    sample->add_option("--seed", grid_cli.seed, "RNG seed")->capture_default_str();
    sample->add_option("--out", grid_cli.out, "Output spatial CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cluster->parsed()) {
            cluster_cli.s_limit_set = cluster_opts["s_limit"]->count() > 0;
            cluster_cli.t_limit_set = cluster_opts["t_limit"]->count() > 0;
            cluster_cli.minimum_neighbors_set =
                cluster_opts["minimum_neighbors"]->count() > 0;
            cluster_cli.steepness_set = cluster_opts["steepness"]->count() > 0;
            if (!cluster_cli.config_path.empty())
                apply_config_file(cluster_cli, cluster_opts);
            if (cluster_cli.s_data.empty())
                throw scadda::ConfigError("s_data is required (--s_data or config)");
            if (cluster_cli.t_data.empty())
                throw scadda::ConfigError("t_data is required (--t_data or config)");
            if (!cluster_cli.minimum_neighbors_set)
                throw scadda::ConfigError(
                    "minimum_neighbors is required (--minimum_neighbors or config)");
            if (!cluster_cli.steepness_set)
                throw scadda::ConfigError(
                    "steepness is required (--steepness or config)");
            return run_cluster(cluster_cli);
        }
        if (synth->parsed()) return run_synth(synth_cli);
        if (sample->parsed()) return run_sample_grid(grid_cli);
        return 1;
    } catch (const scadda::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const scadda::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
