#include "narrnet/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "narrnet/common.hpp"

namespace narrnet {

std::optional<Distance> parse_distance(std::string_view text) {
    if (text == "euclidean") return Distance::euclidean;
    if (text == "cosine") return Distance::cosine;
    return std::nullopt;
}

std::string_view to_string(Distance distance) {
    return distance == Distance::euclidean ? "euclidean" : "cosine";
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

double kmeans_objective(std::span<const Vector> points, std::span<const std::size_t> assignment,
                        std::span<const Vector> centroids) {
    double sse = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        sse += squared_distance(points[i], centroids[assignment[i]]);
    return sse;
}

namespace {

std::vector<Vector> seed_plus_plus(std::span<const Vector> points, std::size_t k, Rng& rng) {
    const std::size_t n = points.size();
    std::vector<Vector> centers;
    std::vector<bool> chosen(n, false);
    std::size_t first = rng.index(n);
    centers.push_back(points[first]);
    chosen[first] = true;

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centers[0]);

    while (centers.size() < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick = n;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (d2[i] > 0.0 && acc > target) {
                    pick = i;
                    break;
                }
            }
            if (pick == n)  // rounding at the tail
                for (std::size_t i = n; i-- > 0;)
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
        } else {
            // Every remaining point duplicates a center: take an unused index.
            std::vector<std::size_t> unused;
            for (std::size_t i = 0; i < n; ++i)
                if (!chosen[i]) unused.push_back(i);
            pick = unused[rng.index(unused.size())];
        }
        chosen[pick] = true;
        centers.push_back(points[pick]);
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
    }
    return centers;
}

// Nearest centroid; keeps `current` on exact ties so assignments do not flap.
std::size_t nearest(const Vector& point, const std::vector<Vector>& centroids,
                    std::size_t current) {
    std::size_t best = current < centroids.size() ? current : 0;
    double best_d = squared_distance(point, centroids[best]);
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = squared_distance(point, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

KMeansResult kmeans(std::span<const Vector> input, const KMeansOptions& options) {
    KMeansResult result;
    if (input.empty()) return result;
    if (options.k == 0) throw ConfigError("k-means: k must be >= 1");
    std::size_t k = options.k;
    if (k > input.size()) {
        log::warn(fmt::format("k-means: k={} exceeds {} points, clamped", k, input.size()));
        k = input.size();
    }
    const std::size_t dim = input.front().size();
    for (const auto& p : input)
        if (p.size() != dim) throw InputError("k-means: points of differing dimension");

    std::vector<Vector> points(input.begin(), input.end());
    if (options.distance == Distance::cosine) {
        for (auto& p : points) {
            double norm = std::sqrt(squared_distance(p, Vector(dim, 0.0)));
            if (norm > 0.0)
                for (auto& v : p) v /= norm;
        }
    }

    Rng rng(options.seed);
    auto centroids = seed_plus_plus(points, k, rng);
    const std::size_t n = points.size();
    std::vector<std::size_t> assignment(n, std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < n; ++i) assignment[i] = nearest(points[i], centroids, 0);
    result.objective_history.push_back(kmeans_objective(points, assignment, centroids));

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        // Update step.
        std::vector<Vector> updated(k, Vector(dim, 0.0));
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++sizes[assignment[i]];
            for (std::size_t d = 0; d < dim; ++d) updated[assignment[i]][d] += points[i][d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;
            for (auto& v : updated[c]) v /= static_cast<double>(sizes[c]);
        }
        // An empty cluster takes the point farthest from its centroid, drawn
        // from a cluster that can spare it.
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) continue;
            std::size_t far = n;
            double far_d = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[assignment[i]] < 2) continue;
                double d = squared_distance(points[i], updated[assignment[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == n) {
                updated[c] = centroids[c];
                continue;
            }
            --sizes[assignment[far]];
            assignment[far] = c;
            sizes[c] = 1;
            updated[c] = points[far];
        }

        bool moved = false;
        for (std::size_t c = 0; c < k; ++c) {
            double shift = std::sqrt(squared_distance(updated[c], centroids[c]));
            double scale = std::sqrt(squared_distance(centroids[c], Vector(dim, 0.0)));
            if (shift >= options.tolerance * (1.0 + scale)) moved = true;
        }
        centroids = std::move(updated);

        // Assignment step.
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            auto best = nearest(points[i], centroids, assignment[i]);
            if (best != assignment[i]) {
                assignment[i] = best;
                changed = true;
            }
        }
        result.objective_history.push_back(kmeans_objective(points, assignment, centroids));
        result.iterations = iter + 1;
        if (!moved && !changed) {
            result.converged = true;
            break;
        }
    }

    // Leave centroids consistent with the final assignment.
    std::vector<Vector> final_centroids(k, Vector(dim, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++sizes[assignment[i]];
        for (std::size_t d = 0; d < dim; ++d) final_centroids[assignment[i]][d] += points[i][d];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0)
            final_centroids[c] = centroids[c];
        else
            for (auto& v : final_centroids[c]) v /= static_cast<double>(sizes[c]);
    }
    result.centroids = std::move(final_centroids);
    result.assignment = std::move(assignment);
    result.objective = kmeans_objective(points, result.assignment, result.centroids);
    return result;
}

}  // namespace narrnet
