#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <doctest.h>

#include "scadda/cluster.hpp"
#include "scadda/errors.hpp"
#include "scadda/io.hpp"
#include "scadda/rng.hpp"
#include "support/oracles.hpp"

using namespace scadda;

namespace {

DistanceMatrix zero_matrix(std::size_t n) { return DistanceMatrix(n); }

DistanceMatrix matrix_from(const std::vector<std::vector<double>>& rows) {
    DistanceMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) m.set(i, j, rows[i][j]);
    return m;
}

// Random instance over a unit box with short random series; steepness zero
// so the spatial table is the plain metric.
struct Instance {
    std::vector<GeoPoint> points;
    std::vector<std::vector<double>> series;
    DistanceMatrix spatial;
    DistanceMatrix temporal;
    ClusterParams params;
};

Instance random_instance(Rng& rng, int max_points = 30) {
    Instance inst;
    const int n = 5 + static_cast<int>(rng.uniform(0, max_points - 4));
    for (int i = 0; i < n; ++i)
        inst.points.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
    const std::size_t len = 3 + static_cast<std::size_t>(rng.uniform(0, 4));
    for (int i = 0; i < n; ++i) {
        std::vector<double> s(len);
        for (double& v : s) v = rng.uniform(0, 1);
        inst.series.push_back(std::move(s));
    }

    inst.spatial = spatial_distance_matrix(inst.points, 0.0, Metric::euclidean,
                                           {}, Algorithm::scadda);
    inst.temporal = temporal_distance_matrix(inst.series, WarpWindow::unconstrained());

    inst.params.s_limit = rng.uniform(0.05, 0.5);
    inst.params.t_limit = rng.uniform(0.2, 2.0);
    inst.params.min_neighbors = 1 + static_cast<int>(rng.uniform(0, 4));
    inst.params.steepness = 0.0;
    inst.params.metric = Metric::euclidean;
    inst.params.window = WarpWindow::unconstrained();
    return inst;
}

} // namespace

TEST_CASE("neighbors applies dual strict thresholds and skips the query point") {
    const auto delta = matrix_from({{0, 1, 5, 6},
                                    {1, 0, 4, 5},
                                    {5, 4, 0, 1},
                                    {6, 5, 1, 0}});
    const auto gamma = zero_matrix(4);

    CHECK(neighbors(0, delta, gamma, 2.0, 1.0) == std::vector<int>{1});
    CHECK(neighbors(0, delta, gamma, 0.0, 1.0).empty()); // strict <
    CHECK(neighbors(0, delta, gamma, 2.0, 0.0).empty());
    // All-zero temporal table reduces the query to the spatial threshold.
    CHECK(neighbors(2, delta, gamma, 4.5, 1.0) == std::vector<int>{1, 3});
    CHECK_THROWS_AS(neighbors(7, delta, gamma, 1.0, 1.0), ConfigError);
}

TEST_CASE("identical points with identical series form one cluster") {
    const std::vector<GeoPoint> pts(5, GeoPoint{1.0, 2.0});
    const std::vector<std::vector<double>> series(5, std::vector<double>{3, 1, 4});
    ClusterParams p;
    p.s_limit = 1.0;
    p.t_limit = 1.0;
    p.min_neighbors = 2;
    p.metric = Metric::euclidean;
    const auto result = cluster(pts, series, p);
    CHECK(result.labels == std::vector<int>{1, 1, 1, 1, 1});
    CHECK(result.cluster_count == 1);
    CHECK(result.outlier_count() == 0);
}

TEST_CASE("two well-separated triples become two clusters") {
    const std::vector<GeoPoint> pts{{0, 0},   {0, 0.1},   {0, 0.2},
                                    {0, 100}, {0, 100.1}, {0, 100.2}};
    const std::vector<std::vector<double>> series(6, std::vector<double>(4, 0.0));
    ClusterParams p;
    p.s_limit = 1.0;
    p.t_limit = 1.0;
    p.min_neighbors = 2;
    p.metric = Metric::euclidean;
    p.algorithm = Algorithm::stdbscan;
    const auto result = cluster(pts, series, p);
    CHECK(result.labels == std::vector<int>{1, 1, 1, 2, 2, 2});

    // Brute-force reference agrees.
    const auto delta = spatial_distance_matrix(pts, 0.0, Metric::euclidean, {},
                                               Algorithm::stdbscan);
    const auto naive = testing::naive_st_dbscan(delta, zero_matrix(6), 1.0, 1.0, 2);
    CHECK(testing::same_partition(result.labels, naive));
}

TEST_CASE("stdbscan and zero-steepness scadda produce identical labels") {
    Rng rng(606);
    for (int t = 0; t < 30; ++t) {
        auto inst = random_instance(rng);
        auto p_scadda = inst.params;
        p_scadda.algorithm = Algorithm::scadda;
        auto p_std = inst.params;
        p_std.algorithm = Algorithm::stdbscan;

        // Full pipeline for both, so each rebuilds its own spatial table.
        const auto a = cluster(inst.points, inst.series, p_scadda);
        const auto b = cluster(inst.points, inst.series, p_std);
        CHECK(a.labels == b.labels);
        CHECK(a.cluster_count == b.cluster_count);
    }
}

TEST_CASE("labels match the cubic-time reference on random instances") {
    Rng rng(424242);
    for (int t = 0; t < 50; ++t) {
        auto inst = random_instance(rng);
        const auto got = cluster_matrices(inst.spatial, inst.temporal, inst.params);
        const auto want = testing::naive_st_dbscan(inst.spatial, inst.temporal,
                                                   inst.params.s_limit,
                                                   inst.params.t_limit,
                                                   inst.params.min_neighbors);
        CHECK(testing::same_partition(got.labels, want));
    }
}

TEST_CASE("label vector is contiguous and every cluster has a core point") {
    Rng rng(90210);
    for (int t = 0; t < 25; ++t) {
        auto inst = random_instance(rng);
        const auto result = cluster_matrices(inst.spatial, inst.temporal, inst.params);

        std::set<int> used;
        for (int l : result.labels) {
            CHECK(l >= 0);
            CHECK(l <= result.cluster_count);
            if (l > 0) used.insert(l);
        }
        CHECK(static_cast<int>(used.size()) == result.cluster_count);

        for (int c = 1; c <= result.cluster_count; ++c) {
            bool has_core = false;
            for (std::size_t i = 0; i < result.labels.size() && !has_core; ++i) {
                if (result.labels[i] != c) continue;
                const auto nb = neighbors(i, inst.spatial, inst.temporal,
                                          inst.params.s_limit, inst.params.t_limit);
                has_core = static_cast<int>(nb.size()) >= inst.params.min_neighbors;
            }
            CHECK(has_core);
        }
    }
}

TEST_CASE("clustering is deterministic across repeats and worker counts") {
    Rng rng(1001);
    auto inst = random_instance(rng);
    std::vector<std::vector<double>> series;
    for (std::size_t i = 0; i < inst.points.size(); ++i)
        series.push_back({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)});

    ClusterParams p = inst.params;
    p.steepness = 4.0;
    ClusterOptions one;
    one.workers = 1;
    ClusterOptions many;
    many.workers = 8;

    const auto a = cluster(inst.points, series, p, one);
    const auto b = cluster(inst.points, series, p, many);
    const auto c = cluster(inst.points, series, p, one);
    CHECK(a.labels == b.labels);
    CHECK(a.labels == c.labels);
}

TEST_CASE("tightening the temporal limit never grows the assigned set") {
    Rng rng(7777);
    for (int t = 0; t < 20; ++t) {
        auto inst = random_instance(rng);
        auto tight = inst.params;
        tight.t_limit = inst.params.t_limit / 2.0;
        const auto loose = cluster_matrices(inst.spatial, inst.temporal, inst.params);
        const auto strict = cluster_matrices(inst.spatial, inst.temporal, tight);
        for (std::size_t i = 0; i < loose.labels.size(); ++i) {
            if (strict.labels[i] > 0) CHECK(loose.labels[i] > 0);
        }
    }
}

TEST_CASE("outlier cap of 100 disables reassignment") {
    Rng rng(31415);
    auto inst = random_instance(rng);
    inst.params.outlier_perc = 100.0;
    const auto base = cluster_matrices(inst.spatial, inst.temporal, inst.params);
    const auto again = reassign_outliers(base, inst.spatial, inst.temporal,
                                         inst.params);
    CHECK(again.labels == base.labels);
    CHECK(again.reassignment_passes == 0);
    CHECK_FALSE(again.cap_unreachable);
}

TEST_CASE("stragglers join a pseudo-cluster once the limits double") {
    // One tight trio plus three spaced stragglers; hand-checked thresholds.
    const std::vector<GeoPoint> pts{{0, 0},   {0, 0.1}, {0, 0.2},
                                    {0, 5.0}, {0, 6.5}, {0, 8.0}};
    ClusterParams p;
    p.s_limit = 1.0;
    p.t_limit = 1.0;
    p.min_neighbors = 2;
    p.metric = Metric::euclidean;
    p.algorithm = Algorithm::stdbscan;
    const auto delta = spatial_distance_matrix(pts, 0.0, Metric::euclidean, {},
                                               Algorithm::stdbscan);
    const auto gamma = zero_matrix(6);

    auto no_cap = p;
    const auto base = cluster_matrices(delta, gamma, no_cap);
    CHECK(base.labels == std::vector<int>{1, 1, 1, 0, 0, 0});

    // Straggler gaps are 1.5, inside the once-doubled limit of 2.
    p.outlier_perc = 10.0;
    const auto result = cluster_matrices(delta, gamma, p);
    CHECK(result.labels == std::vector<int>{1, 1, 1, 2, 2, 2});
    CHECK(result.reassignment_passes == 1);
    CHECK(result.first_pseudo_label == 2);
    CHECK(result.is_pseudo(2));
    CHECK_FALSE(result.is_pseudo(1));
    CHECK_FALSE(result.cap_unreachable);
}

TEST_CASE("an isolated outlier between an outlier pair joins on pass one") {
    // minimum_neighbors = 1: the pair at 10 and 13 is 3 apart, the middle
    // point 1.5 from each; nothing is within the initial limit of 1, but the
    // doubled limit of 2 makes the middle point a core between both.
    const std::vector<GeoPoint> pts{{0, 0}, {0, 0.5}, {0, 10}, {0, 11.5}, {0, 13}};
    ClusterParams p;
    p.s_limit = 1.0;
    p.t_limit = 1.0;
    p.min_neighbors = 1;
    p.metric = Metric::euclidean;
    p.algorithm = Algorithm::stdbscan;
    const auto delta = spatial_distance_matrix(pts, 0.0, Metric::euclidean, {},
                                               Algorithm::stdbscan);
    const auto gamma = zero_matrix(5);

    const auto base = cluster_matrices(delta, gamma, p);
    CHECK(base.labels == std::vector<int>{1, 1, 0, 0, 0});

    p.outlier_perc = 0.0;
    const auto result = cluster_matrices(delta, gamma, p);
    CHECK(result.labels == std::vector<int>{1, 1, 2, 2, 2});
    CHECK(result.reassignment_passes == 1);
    CHECK(result.is_pseudo(2));
}

TEST_CASE("reassignment raises the flag when the cap cannot be met") {
    const std::vector<GeoPoint> pts{{0, 0}, {0, 0.1}, {0, 0.2}, {0, 5.0}};
    ClusterParams p;
    p.s_limit = 1.0;
    p.t_limit = 1.0;
    p.min_neighbors = 10; // larger than the point count
    p.metric = Metric::euclidean;
    p.algorithm = Algorithm::stdbscan;
    p.outlier_perc = 0.0;
    const auto delta = spatial_distance_matrix(pts, 0.0, Metric::euclidean, {},
                                               Algorithm::stdbscan);
    const auto result = cluster_matrices(delta, zero_matrix(4), p);
    CHECK(result.labels == std::vector<int>{0, 0, 0, 0});
    CHECK(result.cap_unreachable);
    CHECK(result.cluster_count == 0);
}

TEST_CASE("reassignment never relabels assigned points or adds outliers") {
    Rng rng(2024);
    for (int t = 0; t < 20; ++t) {
        auto inst = random_instance(rng);
        const auto base = cluster_matrices(inst.spatial, inst.temporal, inst.params);
        auto capped = inst.params;
        capped.outlier_perc = 25.0;
        const auto after = reassign_outliers(base, inst.spatial, inst.temporal,
                                             capped);
        CHECK(after.outlier_count() <= base.outlier_count());
        for (std::size_t i = 0; i < base.labels.size(); ++i) {
            if (base.labels[i] > 0) CHECK(after.labels[i] == base.labels[i]);
        }
        for (int c = base.cluster_count + 1; c <= after.cluster_count; ++c)
            CHECK(after.is_pseudo(c));
    }
}

TEST_CASE("spatial limit heuristic") {
    const std::vector<GeoPoint> corners{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    CHECK(heuristic_s_limit(corners) == doctest::Approx(2.0).epsilon(1e-12));

    // Scaling all coordinates by c scales the result by 1/c.
    Rng rng(55);
    std::vector<GeoPoint> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({rng.uniform(0, 5), rng.uniform(0, 5)});
    std::vector<GeoPoint> scaled;
    for (const auto& p : pts) scaled.push_back({3.0 * p.lat, 3.0 * p.lon});
    CHECK(heuristic_s_limit(scaled) ==
          doctest::Approx(heuristic_s_limit(pts) / 3.0).epsilon(1e-12));

    const std::vector<GeoPoint> degenerate(4, GeoPoint{2, 2});
    CHECK_THROWS_AS(heuristic_s_limit(degenerate), DataError);
}

TEST_CASE("temporal limit heuristic is the full-matrix mean") {
    CHECK(heuristic_t_limit(zero_matrix(5)) == 0.0);

    DistanceMatrix two(2);
    two.set(0, 1, 4.0);
    CHECK(heuristic_t_limit(two) == 2.0);

    DistanceMatrix three(3);
    three.set(0, 1, 1.0);
    three.set(0, 2, 2.0);
    three.set(1, 2, 3.0);
    CHECK(heuristic_t_limit(three) == doctest::Approx(12.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("eight-gaussian toy: rescaling extends cluster coverage") {
    const ToyDataset toy = generate_toy_dataset(42);
    REQUIRE(toy.spatial.points.size() == 800);

    ClusterParams p;
    p.s_limit = 0.6;
    p.t_limit = 1.0;
    p.min_neighbors = 15;
    p.steepness = 5.0;
    p.metric = Metric::euclidean;

    auto p_scadda = p;
    p_scadda.algorithm = Algorithm::scadda;
    auto p_std = p;
    p_std.algorithm = Algorithm::stdbscan;

    const auto scadda_run = cluster(toy.spatial.points, toy.temporal.series, p_scadda);
    const auto std_run = cluster(toy.spatial.points, toy.temporal.series, p_std);

    CHECK(scadda_run.cluster_count == 4);
    CHECK(std_run.cluster_count == 4);
    CHECK(testing::majority_purity(scadda_run.labels, toy.quadrants) >= 0.95);
    CHECK(testing::majority_purity(std_run.labels, toy.quadrants) >= 0.95);
    // The rescaled run assigns strictly more of the Gaussian tails.
    CHECK(scadda_run.outlier_fraction() < std_run.outlier_fraction());
}

TEST_CASE("kilometer thresholds with the orthodromic metric") {
    // Two city-sized groups ~530 km apart; 5 km reach binds each group.
    const std::vector<GeoPoint> pts{
        {55.9533, -3.1883}, {55.9610, -3.1800}, {55.9450, -3.2000}, // Edinburgh
        {51.5074, -0.1278}, {51.5150, -0.1200}, {51.5000, -0.1400}, // London
    };
    const std::vector<std::vector<double>> series(6, std::vector<double>(4, 0.0));
    ClusterParams p;
    p.s_limit = 5.0; // km
    p.t_limit = 1.0;
    p.min_neighbors = 2;
    p.metric = Metric::orthodromic;
    p.algorithm = Algorithm::stdbscan;
    const auto result = cluster(pts, series, p);
    CHECK(result.labels == std::vector<int>{1, 1, 1, 2, 2, 2});

    // A 600 km reach merges everything into one cluster.
    p.s_limit = 600.0;
    CHECK(cluster(pts, series, p).cluster_count == 1);
}

TEST_CASE("input validation for clustering") {
    const std::vector<GeoPoint> pts{{0, 0}, {0, 1}};
    const std::vector<std::vector<double>> series{{0.0}};
    ClusterParams p;
    p.s_limit = 1.0;
    p.t_limit = 1.0;
    CHECK_THROWS_AS(cluster(pts, series, p), DataError); // row count mismatch

    ClusterParams bad = p;
    bad.s_limit = 0.0;
    const std::vector<std::vector<double>> ok{{0.0}, {0.0}};
    CHECK_THROWS_AS(cluster(pts, ok, bad), ConfigError);
    bad          = p;
    bad.min_neighbors = 0;
    CHECK_THROWS_AS(cluster(pts, ok, bad), ConfigError);
    bad = p;
    bad.outlier_perc = 101.0;
    CHECK_THROWS_AS(cluster(pts, ok, bad), ConfigError);
}
