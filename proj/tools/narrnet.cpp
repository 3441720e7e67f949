// narrnet: narrative networks from relation tuples.

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "narrnet/pipeline.hpp"

using namespace narrnet;
namespace fs = std::filesystem;

namespace {

// Flag values; unset ones leave the config file (or defaults) alone.
struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> out;
    std::optional<std::string> social, embeddings, seeds, news, aliases, stop_words, reference;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> min_cooc;
    std::optional<std::size_t> k_override;
    std::optional<std::uint64_t> kmeans_seed;
    std::optional<std::string> distance;
    std::optional<std::size_t> min_edge_weight;
    std::optional<bool> directed_export;
    std::optional<bool> allow_self_loops;
    std::optional<std::size_t> edge_rel_k;
    std::optional<std::size_t> runs;
    std::optional<double> tau_core, tau_relax;
    std::optional<std::uint64_t> community_seed;
    std::optional<std::size_t> width, shift, top_tfidf, top_freq;
    std::optional<std::size_t> baseline_samples, baseline_size;
    std::optional<std::uint64_t> metric_seed;
    std::optional<int> max_lag;
    std::optional<std::size_t> threads;
    bool force = false;
    bool verbose = false;
    bool quiet = false;
};

void add_pipeline_flags(CLI::App* cmd, Overrides& o, bool stage) {
    cmd->add_option("-c,--config", o.config, "JSON config file; flags override it");
    cmd->add_option("-o,--out", o.out, "output directory (env NARRNET_OUT; default narrnet-out)");

    auto* g = "Inputs";
    cmd->add_option("--social", o.social, "social-media tuples (JSONL)")->group(g);
    cmd->add_option("--embeddings", o.embeddings, "phrase embeddings (TSV with d=<dim> header)")->group(g);
    cmd->add_option("--seeds", o.seeds, "NER seed entities, one per line")->group(g);
    cmd->add_option("--news", o.news, "dated news tuples (JSONL)")->group(g);
    cmd->add_option("--aliases", o.aliases, "alias<TAB>canonical map")->group(g);
    cmd->add_option("--stop-words", o.stop_words, "stop-word list (default: built-in English)")->group(g);
    cmd->add_option("--reference", o.reference, "truth.json or reference communities for evaluate")->group(g);

    g = "Parameters";
    cmd->add_option("--seed", o.seed, "master seed; unset stage seeds derive from it")->group(g);
    cmd->add_option("--min-cooc", o.min_cooc, "seed co-occurrences needed to merge groups")->group(g);
    cmd->add_option("--k-override", o.k_override, "same k for every group")->group(g);
    cmd->add_option("--kmeans-seed", o.kmeans_seed)->group(g);
    cmd->add_option("--distance", o.distance, "euclidean | cosine")
        ->check(CLI::IsMember({"euclidean", "cosine"}))
        ->group(g);
    cmd->add_option("--min-edge-weight", o.min_edge_weight)->group(g);
    cmd->add_option("--directed-export", o.directed_export, "write directed GraphML (true|false)")->group(g);
    cmd->add_option("--allow-self-loops", o.allow_self_loops, "keep sub-node self-loops (true|false)")->group(g);
    cmd->add_option("--edge-rel-k", o.edge_rel_k, "cluster each edge's relationships into k groups (0: off)")
        ->group(g);
    cmd->add_option("--runs", o.runs, "Louvain runs in the ensemble")->group(g);
    cmd->add_option("--tau-core", o.tau_core)->group(g);
    cmd->add_option("--tau-relax", o.tau_relax)->group(g);
    cmd->add_option("--community-seed", o.community_seed)->group(g);
    cmd->add_option("--width", o.width, "news window width in days")->group(g);
    cmd->add_option("--shift", o.shift, "news window shift in days")->group(g);
    cmd->add_option("--top-tfidf", o.top_tfidf)->group(g);
    cmd->add_option("--top-freq", o.top_freq)->group(g);
    cmd->add_option("--baseline-samples", o.baseline_samples)->group(g);
    cmd->add_option("--baseline-size", o.baseline_size)->group(g);
    cmd->add_option("--metric-seed", o.metric_seed)->group(g);
    cmd->add_option("--max-lag", o.max_lag)->group(g);
    cmd->add_option("-j,--threads", o.threads, "worker threads (does not change results)");
    if (stage) cmd->add_flag("--force", o.force, "use upstream artifacts even if stale");
}

template <class T, class U>
void apply(const std::optional<T>& v, U& target) {
    if (v) target = *v;
}

RunConfig resolve_config(const Overrides& o) {
    RunConfig c;
    if (o.config) c = load_config(*o.config);
    apply(o.social, c.social);
    apply(o.embeddings, c.embeddings);
    apply(o.seeds, c.seeds);
    apply(o.news, c.news);
    apply(o.aliases, c.aliases);
    apply(o.stop_words, c.stop_words);
    apply(o.reference, c.reference);
    if (const char* env = std::getenv("NARRNET_OUT"); env && *env) c.output_dir = env;
    apply(o.out, c.output_dir);
    apply(o.seed, c.seed);
    apply(o.min_cooc, c.min_cooc);
    if (o.k_override) c.k_override = o.k_override;
    if (o.kmeans_seed) c.kmeans_seed = o.kmeans_seed;
    if (o.distance) c.distance = *parse_distance(*o.distance);
    apply(o.min_edge_weight, c.min_edge_weight);
    apply(o.directed_export, c.directed_export);
    apply(o.allow_self_loops, c.allow_self_loops);
    apply(o.edge_rel_k, c.edge_rel_k);
    apply(o.runs, c.runs);
    apply(o.tau_core, c.tau_core);
    apply(o.tau_relax, c.tau_relax);
    if (o.community_seed) c.community_seed = o.community_seed;
    apply(o.width, c.width);
    apply(o.shift, c.shift);
    apply(o.top_tfidf, c.top_tfidf);
    apply(o.top_freq, c.top_freq);
    apply(o.baseline_samples, c.baseline_samples);
    apply(o.baseline_size, c.baseline_size);
    if (o.metric_seed) c.metric_seed = o.metric_seed;
    apply(o.max_lag, c.max_lag);
    apply(o.threads, c.threads);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"narrnet: build narrative networks from relation tuples"};
    app.require_subcommand(1);
    app.fallthrough();
    Overrides o;
    app.add_flag("-v,--verbose", o.verbose, "progress messages on stderr");
    app.add_flag("-q,--quiet", o.quiet, "suppress warnings");

    auto* run = app.add_subcommand("run", "run every stage and write manifest.json");
    add_pipeline_flags(run, o, false);

    std::map<CLI::App*, Stage> stages;
    const std::pair<Stage, const char*> stage_help[] = {
        {Stage::ingest, "load and validate inputs; writes ingest.json"},
        {Stage::group, "contextual groups from seed co-occurrence; writes groups.json"},
        {Stage::cluster, "k-means sub-nodes per group; writes subnodes.json/.csv"},
        {Stage::graph, "relationship graph over sub-nodes; writes graph.json/.graphml"},
        {Stage::communities, "ensemble Louvain communities; writes communities.json/.graphml"},
        {Stage::newsnet, "windowed news co-occurrence networks; writes networks/, windows.json, attachment/"},
        {Stage::coverage, "relative coverage series and cross-correlation; writes series/"},
        {Stage::evaluate, "agreement with news windows and reference; writes agreement.csv, evaluation.json"},
    };
    for (const auto& [stage, help] : stage_help) {
        auto* cmd = app.add_subcommand(to_string(stage), help);
        add_pipeline_flags(cmd, o, true);
        stages[cmd] = stage;
    }

    SimulationOptions sim;
    std::string sim_dir = "simulation";
    bool overlap = false;
    auto* simulate = app.add_subcommand("simulate", "write a synthetic dataset with planted communities");
    simulate->add_option("-o,--out", sim_dir, "directory to write into")->capture_default_str();
    simulate->add_option("--seed", sim.seed)->capture_default_str();
    simulate->add_option("--k", sim.model.k, "contexts")->capture_default_str();
    simulate->add_option("--n", sim.model.n, "actants")->capture_default_str();
    simulate->add_option("--r", sim.model.r, "relationship types")->capture_default_str();
    simulate->add_option("--separation", sim.model.separation, "centre spacing in sigmas")->capture_default_str();
    simulate->add_option("--sigma", sim.model.sigma)->capture_default_str();
    simulate->add_flag("--overlap-mode", overlap, "let actants join a second context");
    simulate->add_option("--overlap", sim.model.overlap, "chance of a second context")->capture_default_str();
    simulate->add_option("--edge-prob", sim.model.edge_prob)->capture_default_str();
    simulate->add_option("--compound-prob", sim.model.compound_prob)->capture_default_str();
    simulate->add_option("--days", sim.streams.days)->capture_default_str();
    simulate->add_option("--social-posts-per-day", sim.streams.social_posts_per_day)->capture_default_str();
    simulate->add_option("--news-posts-per-day", sim.streams.news_posts_per_day)->capture_default_str();
    simulate->add_option("--tuples-per-post", sim.streams.tuples_per_post)->capture_default_str();
    simulate->add_option("--lag", sim.streams.lag, "days news trails social")->capture_default_str();
    simulate->add_option("--volatility", sim.streams.volatility)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    log::set_level(o.quiet ? log::Level::quiet : o.verbose ? log::Level::info : log::Level::warn);

    try {
        if (simulate->parsed()) {
            sim.model.disjoint = !overlap;
            write_simulation(sim_dir, sim);
            std::cout << fmt::format("wrote {}/config.json\n", sim_dir);
            return 0;
        }
        RunConfig config = resolve_config(o);
        if (run->parsed()) {
            auto dir = run_pipeline(config);
            std::cout << fmt::format("wrote {}\n", (dir / "manifest.json").string());
            return 0;
        }
        for (const auto& [cmd, stage] : stages) {
            if (!cmd->parsed()) continue;
            run_stage(stage, config, o.force);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "narrnet: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "narrnet: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
