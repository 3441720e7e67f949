#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "narrnet/communities.hpp"
#include "narrnet/corpus.hpp"
#include "narrnet/graph.hpp"
#include "narrnet/grouping.hpp"
#include "narrnet/kmeans.hpp"
#include "narrnet/news.hpp"
#include "narrnet/subnodes.hpp"
#include "narrnet/synthetic.hpp"

namespace narrnet {

inline constexpr const char* kVersion = "0.3.0";

struct RunConfig {
    // inputs
    std::filesystem::path social;      // tuples.jsonl, required
    std::filesystem::path embeddings;  // required
    std::filesystem::path seeds;       // required
    std::filesystem::path news;        // optional
    std::filesystem::path aliases;     // optional
    std::filesystem::path stop_words;  // optional; built-in English list otherwise
    std::filesystem::path reference;   // optional: truth.json or [[actant, ...], ...]

    std::filesystem::path output_dir = "narrnet-out";

    std::uint64_t seed = 0;  // master seed

    std::size_t min_cooc = 3;

    std::optional<std::size_t> k_override;
    std::map<int, std::size_t> k_per_group;
    std::optional<std::uint64_t> kmeans_seed;
    Distance distance = Distance::euclidean;

    std::size_t min_edge_weight = 1;
    bool allow_self_loops = false;
    bool directed_export = true;
    std::size_t edge_rel_k = 0;  // 0: no relationship clustering

    std::size_t runs = 100;
    double tau_core = 0.9;
    double tau_relax = 0.5;
    std::optional<std::uint64_t> community_seed;

    std::size_t width = 5;
    std::size_t shift = 1;
    std::size_t top_tfidf = 25;
    std::size_t top_freq = 100;
    std::vector<std::pair<std::string, std::string>> attachment_pairs;

    std::size_t baseline_samples = 20;
    std::size_t baseline_size = 500;
    std::optional<std::uint64_t> metric_seed;
    int max_lag = 14;
    std::size_t smoothing = 5;

    std::size_t threads = 1;  // never affects outputs

    // Fills every unset seed from the master seed.
    void resolve();
    // Throws ConfigError on out-of-range parameters.
    void validate() const;

    // Everything that can change outputs; runtime-only fields (threads,
    // output_dir) are left out.
    nlohmann::json to_json() const;
    // Unknown keys are a ConfigError.
    static RunConfig from_json(const nlohmann::json& j);
};

RunConfig load_config(const std::filesystem::path& path);

enum class Stage { ingest, group, cluster, graph, communities, newsnet, coverage, evaluate };
inline constexpr Stage kAllStages[] = {Stage::ingest,      Stage::group,   Stage::cluster,
                                       Stage::graph,       Stage::communities,
                                       Stage::newsnet,     Stage::coverage, Stage::evaluate};
std::string to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view text);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Runs every stage in order into config.output_dir and writes manifest.json.
// A failing stage leaves a manifest flagged partial and rethrows; errors
// other than ConfigError / InputError become StageError naming the stage.
std::filesystem::path run_pipeline(const RunConfig& config);

// Runs one stage against the artifacts already in config.output_dir. Upstream
// artifacts whose manifest fingerprint or checksum no longer matches are
// refused unless `force`.
void run_stage(Stage stage, const RunConfig& config, bool force = false);

// Distinct head words of the member phrases of a community, alias-folded.
// With a non-empty seed list only seed entities are kept.
std::vector<std::string> community_actants(const Community& community, const NarrativeGraph& graph,
                                           const std::map<std::string, std::string>& phrase_heads,
                                           const SeedEntityList& seeds, const AliasMap& aliases);
// Distinct non-stop-word tokens of the member phrases.
std::vector<std::string> community_words(const Community& community, const NarrativeGraph& graph,
                                         const StopWords& stop_words);
// Most frequent supplied head per arg phrase (ties: lexicographic).
std::map<std::string, std::string> phrase_heads(const Corpus& corpus);

// News-side communities of one window: Louvain over the co-occurrence counts,
// keeping classes with at least two entities.
std::vector<std::vector<std::string>> window_communities(const CooccurrenceNetwork& network,
                                                         std::uint64_t seed);

struct SimulationOptions {
    ModelOptions model;
    CoupledOptions streams;
    std::uint64_t seed = 0;  // overrides model/stream/embedding seeds
};

// Writes social.jsonl, news.jsonl, embeddings.tsv, seeds.txt, truth.json and
// a config.json (paths relative to `dir`, output into dir/run) that runs the
// pipeline on them.
void write_simulation(const std::filesystem::path& dir, const SimulationOptions& options);

}  // namespace narrnet
