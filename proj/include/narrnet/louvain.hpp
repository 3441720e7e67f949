#pragma once

#include <cstdint>
#include <vector>

namespace narrnet {

// Undirected weighted graph as symmetric adjacency lists. A self-loop (i, i, w)
// is stored once in adj[i] and contributes 2w to the degree of i.
class WeightedGraph {
public:
    struct Arc {
        std::size_t to;
        double weight;
    };

    explicit WeightedGraph(std::size_t n = 0) : adj_(n) {}

    std::size_t size() const { return adj_.size(); }
    // Adds w to the undirected edge {a, b}; merges with an existing arc.
    void add_edge(std::size_t a, std::size_t b, double w);
    const std::vector<Arc>& neighbors(std::size_t i) const { return adj_[i]; }
    double degree(std::size_t i) const;
    // Sum of undirected edge weights (each edge once, self-loops once).
    double total_weight() const;
    std::size_t edge_count() const;
    double weight(std::size_t a, std::size_t b) const;

private:
    std::vector<std::vector<Arc>> adj_;
};

using Partition = std::vector<std::size_t>;  // node -> community label

// Q = sum_c (e_c / m - (d_c / 2m)^2). 0 for an edgeless graph.
double modularity(const WeightedGraph& graph, const Partition& partition);

// Relabels communities 0.. in order of first appearance.
Partition canonical_partition(const Partition& partition);

struct LouvainResult {
    Partition partition;  // canonical labels
    double modularity = 0.0;
    // Modularity of the full-graph partition after each pass; starts with the
    // singleton partition.
    std::vector<double> pass_modularity;
};

// Multi-level Louvain at resolution 1. The node visit order is shuffled per
// level with `seed`, and exact ties between candidate communities are broken
// at random, so different seeds explore different optima.
LouvainResult louvain_once(const WeightedGraph& graph, std::uint64_t seed);

}  // namespace narrnet
