#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace narrnet {

using Vector = std::vector<double>;

enum class Distance { euclidean, cosine };

std::optional<Distance> parse_distance(std::string_view text);
std::string_view to_string(Distance distance);

struct KMeansOptions {
    std::size_t k = 1;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 100;
    // Converged when every centroid moves less than tolerance * (1 + |centroid|).
    double tolerance = 1e-6;
    // Cosine mode L2-normalizes the inputs and then runs plain Lloyd.
    Distance distance = Distance::euclidean;
};

struct KMeansResult {
    std::vector<std::size_t> assignment;  // point -> cluster
    std::vector<Vector> centroids;
    // objective_history[0] is the SSE right after k-means++ seeding; one entry
    // per Lloyd iteration follows.
    std::vector<double> objective_history;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

// Sum of squared distances of each point to its assigned centroid.
double kmeans_objective(std::span<const Vector> points, std::span<const std::size_t> assignment,
                        std::span<const Vector> centroids);

// k-means++ seeding followed by Lloyd iterations. k is clamped to the number
// of points (with a warning); an empty input yields an empty result. The same
// options always reproduce the same result.
KMeansResult kmeans(std::span<const Vector> points, const KMeansOptions& options);

}  // namespace narrnet
