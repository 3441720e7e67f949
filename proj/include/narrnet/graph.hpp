#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "narrnet/corpus.hpp"
#include "narrnet/louvain.hpp"
#include "narrnet/subnodes.hpp"

namespace narrnet {

struct NarrativeEdge {
    int source = 0;
    int target = 0;
    std::size_t weight = 0;
    std::map<std::string, std::size_t> relations;  // rel phrase -> count
    // Optional semantic partition of the distinct relation phrases.
    std::vector<std::vector<std::string>> relation_clusters;

    // Most frequent relation phrases, ties broken lexicographically.
    std::vector<std::string> top_relations(std::size_t n = 3) const;
};

// Directed, relationship-labeled graph over sub-nodes. Edges are kept sorted
// by (source, target) and every weight equals the size of its relation
// multiset.
struct NarrativeGraph {
    std::vector<Subnode> nodes;  // sorted by id
    std::vector<NarrativeEdge> edges;
    bool allow_self_loops = false;
    std::size_t dropped_tuples = 0;      // an arg phrase had no sub-node
    std::size_t skipped_self_loops = 0;  // sub-node pairs (a, a) not added

    const Subnode* node(int id) const;
    std::size_t total_weight() const;
};

// One edge increment per (sub-node of arg1, sub-node of arg2) pair of every
// tuple. Tuple order does not affect the result.
NarrativeGraph build_graph(const Corpus& corpus, const std::vector<Subnode>& subnodes,
                           bool allow_self_loops = false);

// Drops edges lighter than min_weight, then every node left without edges.
NarrativeGraph threshold_edges(const NarrativeGraph& graph, std::size_t min_weight);

// k-means over the embeddings of the edge's distinct relation phrases (those
// without a usable vector form their own trailing cluster). k is clamped.
std::vector<std::vector<std::string>> cluster_edge_relationships(const NarrativeEdge& edge,
                                                                 const EmbeddingTable& emb,
                                                                 std::size_t k,
                                                                 std::uint64_t seed);

// Undirected weight-summed projection; index i corresponds to graph.nodes[i].
WeightedGraph undirected_projection(const NarrativeGraph& graph);

using NodeCommunities = std::map<int, std::vector<int>>;  // sub-node id -> community ids

void write_graphml(std::ostream& out, const NarrativeGraph& graph, bool directed,
                   const NodeCommunities& communities = {});

nlohmann::json graph_to_json(const NarrativeGraph& graph);
NarrativeGraph graph_from_json(const nlohmann::json& j);

std::string xml_escape(std::string_view s);

}  // namespace narrnet
