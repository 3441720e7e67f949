#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "narrnet/corpus.hpp"
#include "narrnet/grouping.hpp"
#include "narrnet/kmeans.hpp"

namespace narrnet {

// A phrase cluster inside one contextual group; the node unit of the
// narrative graph.
struct Subnode {
    int id = 0;
    int group_id = 0;
    std::set<std::string> member_phrases;
    Vector centroid;
    std::vector<std::string> label;  // top TF-IDF words, best first
    double ner_score = 0.0;

    std::string label_text() const { return text::join(label, " "); }
};

struct ClusterOptions {
    std::uint64_t seed = 0;
    Distance distance = Distance::euclidean;
    std::size_t max_iterations = 100;
    double tolerance = 1e-6;
    std::optional<std::size_t> k_all;          // same k for every group
    std::map<int, std::size_t> k_per_group;    // wins over k_all
    std::size_t threads = 1;
};

// max(1, ceil(sqrt(n / 2)))
std::size_t default_k(std::size_t n_phrases);

std::size_t choose_k(const ClusterOptions& options, int group_id, std::size_t n_phrases);

// The phrase's own vector, else the mean of whichever of its tokens have one.
std::optional<Vector> phrase_vector(const std::string& phrase, const EmbeddingTable& emb);

// Clusters one group's phrases. Phrases with no usable vector are attached
// afterwards to the sub-node holding most phrases with the same head token,
// or to the largest sub-node. Returned ids are local (0..k-1), ordered by
// each sub-node's smallest member phrase.
std::vector<Subnode> kmeans_cluster(const ContextualGroup& group, const EmbeddingTable& emb,
                                    std::size_t k, std::uint64_t seed,
                                    Distance distance = Distance::euclidean,
                                    KMeansResult* diagnostics = nullptr);

// Clusters every group (in parallel when options.threads > 1) and numbers the
// sub-nodes globally in group order. Per-group seeds come from
// derive_seed(options.seed, "kmeans", group index).
std::vector<Subnode> cluster_groups(const std::vector<ContextualGroup>& groups,
                                    const EmbeddingTable& emb, const ClusterOptions& options);

// Labels each sub-node with its top-3 words by tf * log(N / (1 + df)), where tf
// counts the word over the corpus occurrences of the member phrases and df is
// the number of sub-nodes using the word. Stop words are skipped unless a
// sub-node has nothing else.
void label_tfidf(std::vector<Subnode>& subnodes, const Corpus& corpus,
                 const StopWords& stop_words = {}, std::size_t top = 3);

// Total corpus frequency of member phrases containing at least one seed.
double ner_score(const Subnode& subnode, const SeedEntityList& seeds,
                 const std::map<std::string, std::size_t>& phrase_freq);

using PhraseSubnodes = std::map<std::string, std::set<int>>;
PhraseSubnodes phrase_to_subnodes(const std::vector<Subnode>& subnodes);

nlohmann::json subnodes_to_json(const std::vector<Subnode>& subnodes);
std::vector<Subnode> subnodes_from_json(const nlohmann::json& j);
void write_subnodes_csv(std::ostream& out, const std::vector<Subnode>& subnodes);

}  // namespace narrnet
