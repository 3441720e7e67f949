#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "narrnet/corpus.hpp"
#include "narrnet/kmeans.hpp"

namespace narrnet {

// A generative narrative model: k hidden contexts, each a directed network
// over a subset of n actants whose edges carry a distribution over r
// relationship types. Posts pick a context, then draw edges from it.
struct GenerativeModel {
    struct Edge {
        std::size_t from = 0;  // actant index
        std::size_t to = 0;
        std::vector<double> relation_probs;  // size r, sums to 1
    };
    struct Context {
        std::vector<std::size_t> actants;  // sorted actant indices
        std::vector<Edge> edges;
    };

    std::vector<std::string> actants;    // names; also the NER seeds
    std::vector<std::string> relations;  // relationship phrases
    std::vector<Context> contexts;
    std::vector<double> prior;           // over contexts, sums to 1
    bool disjoint = true;

    // Embedding synthesizer: isotropic Gaussian around per-actant and
    // per-relation centers.
    std::vector<Vector> actant_centers;
    std::vector<Vector> relation_centers;
    double sigma = 1.0;
    double separation = 0.0;

    // Surface variation for arg phrases: "<modifier> <actant>".
    std::vector<std::string> modifiers;
    std::size_t phrases_per_actant = 4;
    // Probability that an arg phrase also names a second actant of the same
    // context ("<other> <actant>"), which is what links seeds into groups.
    double compound_prob = 0.1;

    std::size_t dimension() const { return actant_centers.empty() ? 0 : actant_centers[0].size(); }
};

struct ModelOptions {
    std::size_t k = 3;
    std::size_t n = 30;
    std::size_t r = 6;
    double separation = 6.0;  // center spacing in units of sigma
    std::uint64_t seed = 0;
    bool disjoint = true;
    double overlap = 0.2;     // overlap mode: chance an actant joins a 2nd context
    double sigma = 1.0;
    std::size_t dimension = 0;  // 0: max(n, r)
    double edge_prob = 0.5;
    std::vector<double> prior;  // empty: uniform
    std::size_t phrases_per_actant = 4;
    double compound_prob = 0.1;
};

GenerativeModel make_model(const ModelOptions& options);

struct SampleOptions {
    std::size_t num_posts = 1000;
    std::size_t tuples_per_post = 3;
    std::uint64_t seed = 0;
    Source source = Source::social;
    Day start = Day{std::chrono::year{2020} / 1 / 1};
    std::size_t days = 30;  // posts are spread evenly over [start, start + days)
    std::string doc_prefix = "post";
};

struct SyntheticCorpus {
    Corpus corpus;
    std::vector<std::size_t> post_context;  // planted context of each post
};

SyntheticCorpus sample_corpus(const GenerativeModel& model, const SampleOptions& options);

// Actant name -> context id. Disjoint: the only context; overlap: the member
// context with the largest prior (lowest id on ties).
std::map<std::string, int> planted_labels(const GenerativeModel& model);

// Actant names grouped by planted label, indexed by context id.
std::vector<std::vector<std::string>> planted_contexts(const GenerativeModel& model);

// One vector per distinct arg and relation phrase of the corpora: the centre
// of the phrase's actant (averaged for compound phrases) or relation, plus
// N(0, sigma^2) noise per component.
EmbeddingTable synthesize_embeddings(const GenerativeModel& model,
                                     const std::vector<const Corpus*>& corpora,
                                     std::uint64_t seed);

SeedEntityList model_seeds(const GenerativeModel& model, const Corpus& corpus);

struct CoupledOptions {
    std::size_t days = 60;
    std::size_t social_posts_per_day = 60;
    std::size_t news_posts_per_day = 60;
    std::size_t tuples_per_post = 3;
    int lag = 0;              // news follows social by this many days
    double volatility = 1.0;  // log-scale spread of daily context intensity
    std::uint64_t seed = 0;
    Day start = Day{std::chrono::year{2020} / 1 / 1};
};

struct CoupledStreams {
    Corpus social;
    Corpus news;
};

// Social day t samples contexts from prior * intensity(t); news day t uses
// intensity(t - lag). Intensities are independent log-normal draws per
// context and day.
CoupledStreams generate_coupled(const GenerativeModel& model, const CoupledOptions& options);

nlohmann::json truth_to_json(const GenerativeModel& model);
// Planted contexts (actant name lists) from a truth file.
std::vector<std::vector<std::string>> contexts_from_truth(const nlohmann::json& j);

}  // namespace narrnet
