#include <doctest.h>

#include <cmath>
#include <numeric>

#include "narrnet/common.hpp"
#include "narrnet/kmeans.hpp"
#include "oracles.hpp"

using namespace narrnet;

TEST_CASE("k=1 centroid is the mean") {
    std::vector<Vector> pts{{0, 0}, {2, 0}, {4, 6}};
    KMeansOptions o;
    o.k = 1;
    auto r = kmeans(pts, o);
    CHECK(r.centroids.size() == 1);
    CHECK(r.centroids[0][0] == doctest::Approx(2.0));
    CHECK(r.centroids[0][1] == doctest::Approx(2.0));
}

TEST_CASE("four points split into the two obvious pairs") {
    std::vector<Vector> pts{{0, 0}, {0, 1}, {10, 10}, {10, 11}};
    auto [sse, labels] = oracle::best_two_split(pts);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        KMeansOptions o;
        o.k = 2;
        o.seed = seed;
        auto r = kmeans(pts, o);
        CHECK(r.assignment[0] == r.assignment[1]);
        CHECK(r.assignment[2] == r.assignment[3]);
        CHECK(r.assignment[0] != r.assignment[2]);
        CHECK(r.objective == doctest::Approx(sse));
        const auto& low = r.centroids[r.assignment[0]];
        const auto& high = r.centroids[r.assignment[2]];
        CHECK(low[0] == doctest::Approx(0.0));
        CHECK(low[1] == doctest::Approx(0.5));
        CHECK(high[0] == doctest::Approx(10.0));
        CHECK(high[1] == doctest::Approx(10.5));
    }
}

TEST_CASE("k equal to n gives zero objective") {
    std::vector<Vector> pts{{1, 2}, {3, 4}, {5, 6}, {7, 9}};
    KMeansOptions o;
    o.k = 4;
    auto r = kmeans(pts, o);
    CHECK(r.objective == doctest::Approx(0.0));
    std::set<std::size_t> used(r.assignment.begin(), r.assignment.end());
    CHECK(used.size() == 4);
}

TEST_CASE("objective never increases across Lloyd iterations") {
    Rng rng(5);
    for (int round = 0; round < 30; ++round) {
        std::vector<Vector> pts;
        for (int i = 0; i < 60; ++i) pts.push_back({rng.normal() * 3, rng.normal(), rng.normal()});
        KMeansOptions o;
        o.k = 1 + rng.index(6);
        o.seed = static_cast<std::uint64_t>(round);
        auto r = kmeans(pts, o);
        for (std::size_t i = 1; i < r.objective_history.size(); ++i)
            CHECK(r.objective_history[i] <= r.objective_history[i - 1] + 1e-9);
        CHECK(r.objective == doctest::Approx(kmeans_objective(pts, r.assignment, r.centroids)));
    }
}

TEST_CASE("two-cluster k-means reaches the exhaustive optimum on separated data") {
    Rng rng(9);
    for (int round = 0; round < 20; ++round) {
        std::vector<Vector> pts;
        std::size_t n = 4 + rng.index(8);
        for (std::size_t i = 0; i < n; ++i) {
            double off = (i % 2) ? 20.0 : 0.0;
            pts.push_back({off + rng.normal(), rng.normal()});
        }
        auto [best, _] = oracle::best_two_split(pts);
        KMeansOptions o;
        o.k = 2;
        o.seed = static_cast<std::uint64_t>(round);
        CHECK(kmeans(pts, o).objective == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("same options reproduce the same result") {
    Rng rng(1);
    std::vector<Vector> pts;
    for (int i = 0; i < 100; ++i) pts.push_back({rng.normal(), rng.normal()});
    KMeansOptions o;
    o.k = 5;
    o.seed = 77;
    auto a = kmeans(pts, o), b = kmeans(pts, o);
    CHECK(a.assignment == b.assignment);
    CHECK(a.centroids == b.centroids);
}

TEST_CASE("edge cases") {
    KMeansOptions o;
    o.k = 3;
    CHECK(kmeans(std::vector<Vector>{}, o).assignment.empty());
    std::vector<Vector> two{{0.0}, {1.0}};
    auto r = kmeans(two, o);  // clamped to 2
    CHECK(r.centroids.size() == 2);
    std::vector<Vector> same{{1, 1}, {1, 1}, {1, 1}};
    o.k = 2;
    auto s = kmeans(same, o);
    CHECK(s.objective == doctest::Approx(0.0));
}

TEST_CASE("cosine mode ignores vector length") {
    std::vector<Vector> pts{{1, 0}, {100, 1}, {0, 1}, {1, 50}};
    KMeansOptions o;
    o.k = 2;
    o.distance = Distance::cosine;
    auto r = kmeans(pts, o);
    CHECK(r.assignment[0] == r.assignment[1]);
    CHECK(r.assignment[2] == r.assignment[3]);
    CHECK(r.assignment[0] != r.assignment[2]);
    CHECK(parse_distance("cosine") == Distance::cosine);
    CHECK_FALSE(parse_distance("manhattan"));
}
