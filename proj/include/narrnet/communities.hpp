#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "narrnet/graph.hpp"
#include "narrnet/louvain.hpp"

namespace narrnet {

struct Community {
    int id = 0;
    std::vector<int> core;        // sub-node ids, sorted
    std::vector<int> peripheral;  // sub-node ids, sorted
    std::string label;

    std::size_t size() const { return core.size() + peripheral.size(); }
    std::vector<int> members() const;
};

struct EnsembleOptions {
    std::size_t runs = 100;
    double tau_core = 0.9;
    double tau_relax = 0.5;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

// Overlapping communities: cores are pairwise disjoint, peripheral members
// may sit in several communities.
struct CommunitySet {
    std::vector<Community> communities;
    EnsembleOptions parameters;

    // sub-node id -> ids of communities containing it (core first).
    std::map<int, std::vector<int>> node_index() const;
};

// Fraction of runs in which each pair of nodes shared a community.
class CoassignmentMatrix {
public:
    CoassignmentMatrix(std::size_t n, std::size_t runs) : n_(n), runs_(runs), counts_(n * n, 0) {}
    void add(const Partition& partition);
    double frequency(std::size_t a, std::size_t b) const {
        return static_cast<double>(counts_[a * n_ + b]) / static_cast<double>(runs_);
    }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::size_t runs_;
    std::vector<std::uint32_t> counts_;
};

// Cores are connected components of pairs co-assigned with frequency
// >= tau_core. A node joins community c as peripheral when its mean
// co-assignment frequency with c's core is >= tau_relax. Communities are
// returned over node indices, ordered by smallest core index.
std::vector<Community> cores_and_peripheries(const CoassignmentMatrix& freq, double tau_core,
                                             double tau_relax);

// `runs` seeded Louvain runs (seeds derive_seed(options.seed, "louvain", r)).
CoassignmentMatrix coassignment(const WeightedGraph& graph, const EnsembleOptions& options);

// Runs the ensemble on the undirected projection and maps indices back to
// sub-node ids.
CommunitySet ensemble_communities(const NarrativeGraph& graph, const EnsembleOptions& options);

// Ranks communities by size (descending; ties by smallest core id), renumbers
// them 0.., and labels each with its three members of highest weighted degree
// (ties: higher ner_score, then label text).
void label_communities(CommunitySet& cset, const NarrativeGraph& graph);

nlohmann::json communities_to_json(const CommunitySet& cset);
CommunitySet communities_from_json(const nlohmann::json& j);

}  // namespace narrnet
