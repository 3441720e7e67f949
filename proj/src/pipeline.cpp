#include "narrnet/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "narrnet/coverage.hpp"
#include "narrnet/louvain.hpp"
#include "narrnet/parallel.hpp"
#include "narrnet/series.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace narrnet {

// ---- config ---------------------------------------------------------------

void RunConfig::resolve() {
    if (!kmeans_seed) kmeans_seed = derive_seed(seed, "kmeans");
    if (!community_seed) community_seed = derive_seed(seed, "communities");
    if (!metric_seed) metric_seed = derive_seed(seed, "metrics");
}

void RunConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    require(!social.empty(), "no social-media tuple file given");
    require(!embeddings.empty(), "no embedding file given");
    require(!seeds.empty(), "no seed entity list given");
    require(min_cooc >= 1, "min_cooc must be >= 1");
    require(!k_override || *k_override >= 1, "k_override must be >= 1");
    for (const auto& [g, k] : k_per_group) require(k >= 1, fmt::format("k for group {} must be >= 1", g));
    require(min_edge_weight >= 1, "min_edge_weight must be >= 1");
    require(runs >= 1, "runs must be >= 1");
    require(tau_core > 0.0 && tau_core <= 1.0, "tau_core must lie in (0, 1]");
    require(tau_relax > 0.0 && tau_relax <= 1.0, "tau_relax must lie in (0, 1]");
    require(tau_relax <= tau_core,
            fmt::format("tau_relax ({}) must not exceed tau_core ({})", tau_relax, tau_core));
    require(width >= 1 && shift >= 1, "window width and shift must be >= 1");
    require(baseline_samples >= 1 && baseline_size >= 1, "baseline samples and size must be >= 1");
    require(max_lag >= 0, "max_lag must be >= 0");
    require(smoothing >= 1 && smoothing % 2 == 1, "smoothing width must be odd");
    require(threads >= 1, "threads must be >= 1");
}

namespace {

std::string path_text(const fs::path& p) { return p.generic_string(); }

json optional_json(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json RunConfig::to_json() const {
    json kpg = json::object();
    for (const auto& [g, k] : k_per_group) kpg[std::to_string(g)] = k;
    json pairs = json::array();
    for (const auto& [a, b] : attachment_pairs) pairs.push_back({a, b});
    return {
        {"social", path_text(social)},
        {"embeddings", path_text(embeddings)},
        {"seeds", path_text(seeds)},
        {"news", path_text(news)},
        {"aliases", path_text(aliases)},
        {"stop_words", path_text(stop_words)},
        {"reference", path_text(reference)},
        {"seed", seed},
        {"min_cooc", min_cooc},
        {"k_override", k_override ? json(*k_override) : json(nullptr)},
        {"k_per_group", kpg},
        {"kmeans_seed", optional_json(kmeans_seed)},
        {"distance", std::string(to_string(distance))},
        {"min_edge_weight", min_edge_weight},
        {"allow_self_loops", allow_self_loops},
        {"directed_export", directed_export},
        {"edge_rel_k", edge_rel_k},
        {"runs", runs},
        {"tau_core", tau_core},
        {"tau_relax", tau_relax},
        {"community_seed", optional_json(community_seed)},
        {"width", width},
        {"shift", shift},
        {"top_tfidf", top_tfidf},
        {"top_freq", top_freq},
        {"attachment_pairs", pairs},
        {"baseline_samples", baseline_samples},
        {"baseline_size", baseline_size},
        {"metric_seed", optional_json(metric_seed)},
        {"max_lag", max_lag},
        {"smoothing", smoothing},
    };
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    const std::map<std::string, std::function<void(const json&)>> setters = {
        {"social", [&](const json& v) { c.social = v.get<std::string>(); }},
        {"embeddings", [&](const json& v) { c.embeddings = v.get<std::string>(); }},
        {"seeds", [&](const json& v) { c.seeds = v.get<std::string>(); }},
        {"news", [&](const json& v) { c.news = v.get<std::string>(); }},
        {"aliases", [&](const json& v) { c.aliases = v.get<std::string>(); }},
        {"stop_words", [&](const json& v) { c.stop_words = v.get<std::string>(); }},
        {"reference", [&](const json& v) { c.reference = v.get<std::string>(); }},
        {"output_dir", [&](const json& v) { c.output_dir = v.get<std::string>(); }},
        {"seed", [&](const json& v) { c.seed = v.get<std::uint64_t>(); }},
        {"min_cooc", [&](const json& v) { c.min_cooc = v.get<std::size_t>(); }},
        {"k_override",
         [&](const json& v) {
             if (!v.is_null()) c.k_override = v.get<std::size_t>();
         }},
        {"k_per_group",
         [&](const json& v) {
             for (const auto& [key, k] : v.items()) {
                 try {
                     c.k_per_group[std::stoi(key)] = k.get<std::size_t>();
                 } catch (const std::logic_error&) {
                     throw ConfigError(fmt::format("k_per_group: bad group id \"{}\"", key));
                 }
             }
         }},
        {"kmeans_seed",
         [&](const json& v) {
             if (!v.is_null()) c.kmeans_seed = v.get<std::uint64_t>();
         }},
        {"distance",
         [&](const json& v) {
             auto d = parse_distance(v.get<std::string>());
             if (!d) throw ConfigError(fmt::format("unknown distance \"{}\"", v.get<std::string>()));
             c.distance = *d;
         }},
        {"min_edge_weight", [&](const json& v) { c.min_edge_weight = v.get<std::size_t>(); }},
        {"allow_self_loops", [&](const json& v) { c.allow_self_loops = v.get<bool>(); }},
        {"directed_export", [&](const json& v) { c.directed_export = v.get<bool>(); }},
        {"edge_rel_k", [&](const json& v) { c.edge_rel_k = v.get<std::size_t>(); }},
        {"runs", [&](const json& v) { c.runs = v.get<std::size_t>(); }},
        {"tau_core", [&](const json& v) { c.tau_core = v.get<double>(); }},
        {"tau_relax", [&](const json& v) { c.tau_relax = v.get<double>(); }},
        {"community_seed",
         [&](const json& v) {
             if (!v.is_null()) c.community_seed = v.get<std::uint64_t>();
         }},
        {"width", [&](const json& v) { c.width = v.get<std::size_t>(); }},
        {"shift", [&](const json& v) { c.shift = v.get<std::size_t>(); }},
        {"top_tfidf", [&](const json& v) { c.top_tfidf = v.get<std::size_t>(); }},
        {"top_freq", [&](const json& v) { c.top_freq = v.get<std::size_t>(); }},
        {"attachment_pairs",
         [&](const json& v) {
             for (const auto& p : v) {
                 if (!p.is_array() || p.size() != 2)
                     throw ConfigError("attachment_pairs entries must be [entity, entity]");
                 c.attachment_pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
             }
         }},
        {"baseline_samples", [&](const json& v) { c.baseline_samples = v.get<std::size_t>(); }},
        {"baseline_size", [&](const json& v) { c.baseline_size = v.get<std::size_t>(); }},
        {"metric_seed",
         [&](const json& v) {
             if (!v.is_null()) c.metric_seed = v.get<std::uint64_t>();
         }},
        {"max_lag", [&](const json& v) { c.max_lag = v.get<int>(); }},
        {"smoothing", [&](const json& v) { c.smoothing = v.get<std::size_t>(); }},
        {"threads", [&](const json& v) { c.threads = v.get<std::size_t>(); }},
    };
    for (const auto& [key, value] : j.items()) {
        auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(fmt::format("unknown config key \"{}\"", key));
        try {
            it->second(value);
        } catch (const json::exception& e) {
            throw ConfigError(fmt::format("config key \"{}\": {}", key, e.what()));
        }
    }
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    RunConfig c = RunConfig::from_json(j);
    // Relative paths in a config file are relative to the file.
    const fs::path base = path.parent_path();
    for (fs::path* p : {&c.social, &c.embeddings, &c.seeds, &c.news, &c.aliases, &c.stop_words,
                        &c.reference, &c.output_dir})
        if (!p->empty() && p->is_relative()) *p = (base / *p).lexically_normal();
    return c;
}

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::ingest: return "ingest";
        case Stage::group: return "group";
        case Stage::cluster: return "cluster";
        case Stage::graph: return "graph";
        case Stage::communities: return "communities";
        case Stage::newsnet: return "newsnet";
        case Stage::coverage: return "coverage";
        case Stage::evaluate: return "evaluate";
    }
    return "?";
}

std::optional<Stage> parse_stage(std::string_view text) {
    for (Stage s : kAllStages)
        if (to_string(s) == text) return s;
    return std::nullopt;
}

// ---- hashing ----------------------------------------------------------------

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256 init failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;
    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }
    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_, md, &len);
        std::string out;
        for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
        return out;
    }

private:
    EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot read {}", path.string()));
    Sha256 h;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) h.update(buf, static_cast<std::size_t>(in.gcount()));
    return h.hex();
}

// ---- helpers shared with tests -----------------------------------------------

std::map<std::string, std::string> phrase_heads(const Corpus& corpus) {
    std::map<std::string, std::map<std::string, std::size_t>> votes;
    for (const auto& t : corpus.tuples) {
        ++votes[t.arg1][t.arg1_head];
        ++votes[t.arg2][t.arg2_head];
    }
    std::map<std::string, std::string> heads;
    for (const auto& [phrase, counts] : votes) {
        auto best = counts.begin();
        for (auto it = counts.begin(); it != counts.end(); ++it)
            if (it->second > best->second) best = it;
        heads[phrase] = best->first;
    }
    return heads;
}

std::vector<std::string> community_actants(const Community& community, const NarrativeGraph& graph,
                                           const std::map<std::string, std::string>& heads,
                                           const SeedEntityList& seeds, const AliasMap& aliases) {
    std::set<std::string> out;
    for (int id : community.members()) {
        const Subnode* node = graph.node(id);
        if (!node) continue;
        for (const auto& phrase : node->member_phrases) {
            auto it = heads.find(phrase);
            std::string head = it != heads.end() ? it->second : resolve_head(phrase, "");
            head = aliases.canonical(head);
            if (seeds.size() == 0 || seeds.contains(head)) out.insert(head);
        }
    }
    return {out.begin(), out.end()};
}

std::vector<std::string> community_words(const Community& community, const NarrativeGraph& graph,
                                         const StopWords& stop_words) {
    std::set<std::string> out;
    for (int id : community.members())
        if (const Subnode* node = graph.node(id))
            for (const auto& phrase : node->member_phrases)
                for (auto& token : text::tokenize(phrase))
                    if (!stop_words.count(token)) out.insert(std::move(token));
    return {out.begin(), out.end()};
}

std::vector<std::vector<std::string>> window_communities(const CooccurrenceNetwork& network,
                                                         std::uint64_t seed) {
    const std::size_t n = network.entities.size();
    WeightedGraph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (network.counts[i][j] > 0) g.add_edge(i, j, static_cast<double>(network.counts[i][j]));
    if (g.edge_count() == 0) return {};
    auto result = louvain_once(g, seed);
    std::map<std::size_t, std::vector<std::string>> classes;
    for (std::size_t i = 0; i < n; ++i) classes[result.partition[i]].push_back(network.entities[i]);
    std::vector<std::vector<std::string>> out;
    for (auto& [_, members] : classes)
        if (members.size() >= 2) out.push_back(std::move(members));
    return out;
}

// ---- workspace ------------------------------------------------------------------

namespace {

std::vector<Stage> upstream_of(Stage s) {
    switch (s) {
        case Stage::ingest: return {};
        case Stage::group: return {Stage::ingest};
        case Stage::cluster: return {Stage::group};
        case Stage::graph: return {Stage::cluster};
        case Stage::communities: return {Stage::graph};
        case Stage::newsnet: return {Stage::ingest};
        case Stage::coverage: return {Stage::communities, Stage::newsnet};
        case Stage::evaluate: return {Stage::communities, Stage::newsnet};
    }
    return {};
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

std::string day_or_null(const std::optional<Day>& d) { return d ? format_day(*d) : std::string(); }

std::string padded_index(std::size_t i, std::size_t count) {
    std::size_t width = std::max<std::size_t>(3, std::to_string(count ? count - 1 : 0).size());
    return fmt::format("{:0{}d}", i, width);
}

std::string file_safe(const std::string& s) {
    std::string out;
    for (unsigned char c : s) out += std::isalnum(c) ? static_cast<char>(c) : '_';
    return out;
}

struct Inputs {
    Corpus social;
    std::optional<Corpus> news;
    EmbeddingTable embeddings;
    SeedEntityList seeds;
    AliasMap aliases;
    StopWords stop_words;
};

class Workspace {
public:
    Workspace(const RunConfig& config, bool standalone, bool force)
        : cfg_(config), dir_(config.output_dir), standalone_(standalone), force_(force) {
        fs::create_directories(dir_);
        if (standalone_) {
            std::ifstream in(dir_ / "manifest.json");
            if (in) {
                try {
                    previous_ = json::parse(in);
                } catch (const json::parse_error&) {
                    log::warn("existing manifest.json is unreadable; starting a new one");
                }
            }
        }
        if (previous_.is_object() && previous_.contains("stages")) stages_ = previous_["stages"];
        else stages_ = json::object();
    }

    const RunConfig& config() const { return cfg_; }

    const std::map<std::string, std::pair<fs::path, std::string>>& input_checksums() {
        if (!sums_) {
            sums_.emplace();
            const std::pair<const char*, const fs::path*> roles[] = {
                {"social", &cfg_.social},   {"embeddings", &cfg_.embeddings},
                {"seeds", &cfg_.seeds},     {"news", &cfg_.news},
                {"aliases", &cfg_.aliases}, {"stop_words", &cfg_.stop_words},
                {"reference", &cfg_.reference}};
            for (const auto& [role, path] : roles) {
                if (path->empty()) continue;
                // A missing file fails ingest with its own message; the
                // manifest still records it.
                (*sums_)[role] = {*path, fs::exists(*path) ? sha256_file(*path) : "missing"};
            }
        }
        return *sums_;
    }

    std::string fingerprint(Stage s) {
        if (auto it = fingerprints_.find(s); it != fingerprints_.end()) return it->second;
        const auto& c = cfg_;
        json params;
        auto input_sum = [&](const char* role) {
            auto& sums = input_checksums();
            auto it = sums.find(role);
            return it == sums.end() ? json(nullptr) : json(it->second.second);
        };
        switch (s) {
            case Stage::ingest:
                for (const char* role : {"social", "embeddings", "seeds", "news", "aliases", "stop_words"})
                    params[role] = input_sum(role);
                break;
            case Stage::group: params = {{"min_cooc", c.min_cooc}}; break;
            case Stage::cluster: {
                auto j = c.to_json();
                params = {{"k_override", j["k_override"]}, {"k_per_group", j["k_per_group"]},
                          {"kmeans_seed", j["kmeans_seed"]}, {"distance", j["distance"]}};
                break;
            }
            case Stage::graph:
                params = {{"min_edge_weight", c.min_edge_weight}, {"allow_self_loops", c.allow_self_loops},
                          {"directed_export", c.directed_export}, {"edge_rel_k", c.edge_rel_k},
                          {"seed", c.seed}};
                break;
            case Stage::communities:
                params = {{"runs", c.runs}, {"tau_core", c.tau_core}, {"tau_relax", c.tau_relax},
                          {"community_seed", optional_json(c.community_seed)}};
                break;
            case Stage::newsnet:
                params = {{"width", c.width}, {"shift", c.shift}, {"top_tfidf", c.top_tfidf},
                          {"top_freq", c.top_freq}, {"attachment_pairs", c.to_json()["attachment_pairs"]}};
                break;
            case Stage::coverage:
                params = {{"baseline_samples", c.baseline_samples}, {"baseline_size", c.baseline_size},
                          {"metric_seed", optional_json(c.metric_seed)}, {"max_lag", c.max_lag},
                          {"smoothing", c.smoothing}};
                break;
            case Stage::evaluate:
                params = {{"reference", input_sum("reference")},
                          {"community_seed", optional_json(c.community_seed)}};
                break;
        }
        json up = json::object();
        for (Stage u : upstream_of(s)) up[to_string(u)] = fingerprint(u);
        json doc = {{"stage", to_string(s)}, {"version", kVersion}, {"params", params}, {"upstream", up}};
        return fingerprints_[s] = sha256_hex(doc.dump());
    }

    // Standalone stages: every upstream stage must have run with the current
    // configuration and its outputs must be untouched since.
    void check_upstream(Stage s) {
        for (Stage u : upstream_of(s)) {
            const auto name = to_string(u);
            if (!stages_.contains(name))
                throw InputError(fmt::format("stage \"{}\" needs \"{}\" outputs in {}; run `narrnet {}` first",
                                             to_string(s), name, dir_.string(), name));
            const auto& entry = stages_[name];
            std::vector<std::string> problems;
            if (entry.value("status", "") == "failed") problems.push_back("it failed");
            if (entry.value("fingerprint", "") != fingerprint(u))
                problems.push_back("its configuration or inputs changed");
            const json outputs = entry.value("outputs", json::object());
            for (const auto& [file, sum] : outputs.items()) {
                fs::path p = dir_ / file;
                if (!fs::exists(p)) problems.push_back(fmt::format("{} is missing", file));
                else if (sha256_file(p) != sum.get<std::string>())
                    problems.push_back(fmt::format("{} was modified", file));
            }
            if (problems.empty()) continue;
            std::string why;
            for (const auto& p : problems) why += (why.empty() ? "" : "; ") + p;
            if (!force_)
                throw InputError(fmt::format("upstream stage \"{}\" is stale ({}); rerun it or pass --force",
                                             name, why));
            log::warn(fmt::format("using stale \"{}\" outputs ({})", name, why));
            forced_ = true;
        }
    }

    bool upstream_skipped(Stage u) const {
        return stages_.contains(to_string(u)) && stages_[to_string(u)].value("status", "") == "skipped";
    }

    void begin(Stage s) {
        current_ = s;
        outputs_ = json::object();
    }

    // Removes a directory the current stage owns, so outputs of an earlier run
    // with different settings do not linger.
    void clear_dir(const std::string& rel) { fs::remove_all(dir_ / rel); }

    void write(const std::string& rel, const std::string& content) {
        fs::path p = dir_ / rel;
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        if (!out) throw StageError(fmt::format("cannot write {}", p.string()));
        out << content;
        if (!out) throw StageError(fmt::format("write to {} failed", p.string()));
        outputs_[rel] = sha256_hex(content);
    }

    template <class Fn>
    void write_with(const std::string& rel, Fn&& fn) {
        std::ostringstream os;
        fn(os);
        write(rel, os.str());
    }

    void finish(const std::string& status) {
        json entry = {{"status", status}, {"fingerprint", fingerprint(current_)}, {"outputs", outputs_}};
        if (forced_) entry["forced"] = true;
        stages_[to_string(current_)] = entry;
    }

    void fail(Stage s, const std::string& message) {
        stages_[to_string(s)] = {{"status", "failed"}, {"error", message}};
        failed_ = s;
    }

    void write_manifest() {
        json inputs = json::object();
        for (const auto& [role, entry] : input_checksums())
            inputs[role] = {{"path", path_text(entry.first)}, {"sha256", entry.second}};
        json config = cfg_.to_json();
        bool partial = false;
        for (Stage s : kAllStages) {
            auto name = to_string(s);
            if (!stages_.contains(name) || stages_[name].value("status", "") == "failed") partial = true;
        }
        json manifest = {
            {"tool", "narrnet"},
            {"version", kVersion},
            {"libraries",
             {{"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                            NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH)},
              {"fmt", FMT_VERSION}}},
            {"config", config},
            {"config_hash", sha256_hex(config.dump())},
            {"inputs", inputs},
            {"stages", stages_},
            {"partial", partial},
            {"failed_stage", failed_ ? json(to_string(*failed_)) : json(nullptr)},
        };
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << json_text(manifest);
        if (!out) throw StageError("cannot write manifest.json");
    }

    const fs::path& dir() const { return dir_; }

    json read_json(const std::string& rel) const {
        std::ifstream in(dir_ / rel);
        if (!in) throw InputError(fmt::format("cannot open {}", (dir_ / rel).string()));
        try {
            return json::parse(in);
        } catch (const json::parse_error& e) {
            throw InputError(fmt::format("{}: {}", (dir_ / rel).string(), e.what()));
        }
    }

private:
    RunConfig cfg_;
    fs::path dir_;
    bool standalone_;
    bool force_;
    bool forced_ = false;
    json previous_;
    json stages_;
    std::optional<std::map<std::string, std::pair<fs::path, std::string>>> sums_;
    std::map<Stage, std::string> fingerprints_;
    Stage current_ = Stage::ingest;
    json outputs_;
    std::optional<Stage> failed_;
};

// Stage state. In a full run everything stays in memory; a standalone stage
// loads what it needs from the inputs and upstream artifacts.
struct State {
    explicit State(Workspace& w) : ws(w) {}

    Workspace& ws;
    std::optional<Inputs> inputs;
    std::optional<std::vector<ContextualGroup>> groups;
    std::optional<std::vector<Subnode>> subnodes;
    std::optional<NarrativeGraph> graph;
    std::optional<CommunitySet> communities;
    std::optional<std::vector<WindowSegment>> windows;  // empty optional: no news

    const RunConfig& cfg() const { return ws.config(); }

    Inputs& in() {
        if (!inputs) {
            const auto& c = cfg();
            Inputs x;
            x.social = load_tuples(c.social, Source::social);
            if (!c.news.empty()) x.news = load_tuples(c.news, Source::news);
            x.embeddings = load_embeddings(c.embeddings);
            x.seeds = load_seed_list(c.seeds);
            if (!c.aliases.empty()) x.aliases = load_alias_map(c.aliases);
            x.stop_words = c.stop_words.empty() ? default_stop_words() : load_word_list(c.stop_words);
            inputs = std::move(x);
        }
        return *inputs;
    }

    std::vector<ContextualGroup>& get_groups() {
        if (!groups) groups = groups_from_json(ws.read_json("groups.json"));
        return *groups;
    }
    std::vector<Subnode>& get_subnodes() {
        if (!subnodes) subnodes = subnodes_from_json(ws.read_json("subnodes.json"));
        return *subnodes;
    }
    NarrativeGraph& get_graph() {
        if (!graph) graph = graph_from_json(ws.read_json("graph.json"));
        return *graph;
    }
    CommunitySet& get_communities() {
        if (!communities) communities = communities_from_json(ws.read_json("communities.json"));
        return *communities;
    }
    // Windows with their tuples assigned; nullptr when there is no news corpus.
    std::vector<WindowSegment>* get_windows() {
        if (!in().news) return nullptr;
        if (!windows) {
            std::vector<WindowSegment> ws_;
            const auto& news = *in().news;
            if (news.t_min && news.t_max) {
                auto j = ws.read_json("windows.json");
                for (const auto& w : j.at("windows")) {
                    WindowSegment seg;
                    seg.index = w.at("index").get<std::size_t>();
                    seg.start = *parse_day(w.at("start").get<std::string>());
                    seg.end = *parse_day(w.at("end").get<std::string>());
                    seg.entities = w.at("entities").get<std::vector<std::string>>();
                    ws_.push_back(std::move(seg));
                }
                assign_tuples(ws_, news);
            }
            windows = std::move(ws_);
        }
        return &*windows;
    }
};

json corpus_summary(const Corpus& c) {
    return {{"tuples", c.tuples.size()},
            {"malformed", c.malformed_count},
            {"head_fallbacks", c.head_fallback_count},
            {"vocabulary", c.vocabulary.size()},
            {"t_min", day_or_null(c.t_min)},
            {"t_max", day_or_null(c.t_max)}};
}

void stage_ingest(State& st) {
    auto& in = st.in();
    std::size_t phrases = 0;
    std::size_t without_vector = 0;
    for (const auto& [phrase, _] : phrase_frequencies(in.social)) {
        ++phrases;
        if (!phrase_vector(phrase, in.embeddings)) ++without_vector;
    }
    if (without_vector > 0)
        log::warn(fmt::format("{} of {} arg phrases have no embedding (not even per token)",
                              without_vector, phrases));
    if (in.seeds.size() == 0) log::warn("seed entity list is empty; every phrase is residual");
    json summary = {
        {"social", corpus_summary(in.social)},
        {"news", in.news ? corpus_summary(*in.news) : json(nullptr)},
        {"embeddings",
         {{"dimension", in.embeddings.dimension},
          {"entries", in.embeddings.size()},
          {"duplicates", in.embeddings.duplicate_count},
          {"phrases_without_vector", without_vector}}},
        {"seeds", in.seeds.size()},
        {"aliases", in.aliases.entries().size()},
        {"stop_words", in.stop_words.size()},
    };
    st.ws.write("ingest.json", json_text(summary));
}

void stage_group(State& st) {
    auto& in = st.in();
    auto pairs = seed_cooccurrence(in.social, in.seeds);
    auto groups = form_groups(in.seeds, pairs, st.cfg().min_cooc);
    assign_phrases(in.social, in.seeds, groups);
    log::info(fmt::format("group: {} contextual group(s)", groups.size()));
    st.ws.write("groups.json", json_text(groups_to_json(groups)));
    st.groups = std::move(groups);
}

void stage_cluster(State& st) {
    auto& in = st.in();
    const auto& c = st.cfg();
    ClusterOptions opts;
    opts.seed = *c.kmeans_seed;
    opts.distance = c.distance;
    opts.k_all = c.k_override;
    opts.k_per_group = c.k_per_group;
    opts.threads = c.threads;
    auto subnodes = cluster_groups(st.get_groups(), in.embeddings, opts);
    label_tfidf(subnodes, in.social, in.stop_words);
    auto freq = phrase_frequencies(in.social);
    for (auto& s : subnodes) s.ner_score = ner_score(s, in.seeds, freq);
    log::info(fmt::format("cluster: {} sub-node(s)", subnodes.size()));
    st.ws.write("subnodes.json", json_text(subnodes_to_json(subnodes)));
    st.ws.write_with("subnodes.csv", [&](std::ostream& os) { write_subnodes_csv(os, subnodes); });
    st.subnodes = std::move(subnodes);
}

void stage_graph(State& st) {
    auto& in = st.in();
    const auto& c = st.cfg();
    auto full = build_graph(in.social, st.get_subnodes(), c.allow_self_loops);
    if (full.dropped_tuples > 0)
        log::warn(fmt::format("graph: {} tuple(s) had an arg phrase without a sub-node", full.dropped_tuples));
    auto g = threshold_edges(full, c.min_edge_weight);
    if (c.edge_rel_k > 0)
        for (std::size_t i = 0; i < g.edges.size(); ++i)
            g.edges[i].relation_clusters = cluster_edge_relationships(
                g.edges[i], in.embeddings, c.edge_rel_k, derive_seed(c.seed, "relations", i));
    log::info(fmt::format("graph: {} node(s), {} edge(s) after thresholding", g.nodes.size(), g.edges.size()));
    st.ws.write("graph.json", json_text(graph_to_json(g)));
    st.ws.write_with("graph.graphml", [&](std::ostream& os) { write_graphml(os, g, c.directed_export); });
    st.graph = std::move(g);
}

void stage_communities(State& st) {
    const auto& c = st.cfg();
    auto& g = st.get_graph();
    EnsembleOptions opts;
    opts.runs = c.runs;
    opts.tau_core = c.tau_core;
    opts.tau_relax = c.tau_relax;
    opts.seed = *c.community_seed;
    opts.threads = c.threads;
    auto cset = ensemble_communities(g, opts);
    label_communities(cset, g);
    log::info(fmt::format("communities: {}", cset.communities.size()));
    st.ws.write("communities.json", json_text(communities_to_json(cset)));
    st.ws.write_with("communities.graphml",
                     [&](std::ostream& os) { write_graphml(os, g, c.directed_export, cset.node_index()); });
    st.communities = std::move(cset);
}

std::vector<CooccurrenceNetwork> build_networks(const std::vector<WindowSegment>& windows,
                                                const Inputs& in, std::size_t threads) {
    std::vector<CooccurrenceNetwork> nets(windows.size());
    parallel_for(windows.size(), threads, [&](std::size_t i) {
        std::vector<const RelationTuple*> tuples;
        for (auto t : windows[i].tuples) tuples.push_back(&in.news->tuples[t]);
        nets[i] = cooccur_network(tuples, windows[i].entities, in.stop_words, in.aliases);
        nets[i].window = windows[i].index;
    });
    return nets;
}

bool stage_newsnet(State& st) {
    auto& in = st.in();
    const auto& c = st.cfg();
    st.ws.clear_dir("networks");
    st.ws.clear_dir("attachment");
    if (!in.news) {
        log::info("newsnet: no news corpus configured; skipped");
        return false;
    }
    const auto& news = *in.news;
    std::vector<WindowSegment> windows;
    if (news.t_min && news.t_max) windows = make_windows(*news.t_min, *news.t_max, c.width, c.shift);
    else log::warn("newsnet: news corpus has no dated tuples");
    assign_tuples(windows, news);

    auto vocab = entity_vocabulary(in.social.vocabulary, in.aliases, in.stop_words);
    auto tfidf = window_tfidf(windows, news, vocab, in.aliases);
    SelectionOptions sel{c.top_tfidf, c.top_freq};
    for (auto& w : windows) w.entities = select_entities(w.index, tfidf, vocab, in.aliases, sel);
    auto nets = build_networks(windows, in, c.threads);

    json wj = json::array();
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        auto stem = "networks/window_" + padded_index(i, windows.size());
        st.ws.write_with(stem + ".graphml", [&](std::ostream& os) { write_network_graphml(os, nets[i]); });
        st.ws.write_with(stem + ".csv", [&](std::ostream& os) { write_network_csv(os, nets[i], false); });
        st.ws.write_with(stem + "_norm.csv", [&](std::ostream& os) { write_network_csv(os, nets[i], true); });
        wj.push_back({{"index", w.index},
                      {"start", format_day(w.start)},
                      {"end", format_day(w.end)},
                      {"tuples", w.tuples.size()},
                      {"entities", w.entities}});
    }
    st.ws.write("windows.json", json_text({{"width", c.width}, {"shift", c.shift}, {"windows", wj}}));

    for (const auto& [a, b] : c.attachment_pairs) {
        auto series = attachment_series(windows, nets, in.aliases.canonical(a), in.aliases.canonical(b));
        st.ws.write_with(fmt::format("attachment/{}__{}.csv", file_safe(a), file_safe(b)),
                         [&](std::ostream& os) { write_series_csv(os, series, "common_neighbors"); });
    }
    log::info(fmt::format("newsnet: {} window(s)", windows.size()));
    st.windows = std::move(windows);
    return true;
}

void stage_coverage(State& st) {
    auto& in = st.in();
    const auto& c = st.cfg();
    const auto& cset = st.get_communities();
    const auto& g = st.get_graph();
    st.ws.clear_dir("series");

    auto vocab_map = entity_vocabulary(in.social.vocabulary, in.aliases, in.stop_words);
    std::vector<std::string> vocab;
    for (const auto& [w, _] : vocab_map) vocab.push_back(w);
    if (vocab.size() < c.baseline_size)
        log::warn(fmt::format("baseline vocabulary has {} words, fewer than {}; sampling with replacement",
                              vocab.size(), c.baseline_size));

    struct Result {
        TimeSeries social, news;
        std::optional<CrossCorrelation> xcorr;
    };
    const auto& comms = cset.communities;
    std::vector<Result> results(comms.size());
    parallel_for(comms.size(), c.threads, [&](std::size_t i) {
        auto words = community_words(comms[i], g, in.stop_words);
        BaselineOptions opts{c.baseline_samples, c.baseline_size, 0};
        auto& r = results[i];
        if (in.social.t_min) {
            opts.seed = derive_seed(*c.metric_seed, "social", static_cast<std::uint64_t>(comms[i].id));
            r.social = coverage_series(words, in.social, vocab, *in.social.t_min, *in.social.t_max, opts);
        }
        if (in.news && in.news->t_min) {
            opts.seed = derive_seed(*c.metric_seed, "news", static_cast<std::uint64_t>(comms[i].id));
            r.news = coverage_series(words, *in.news, vocab, *in.news->t_min, *in.news->t_max, opts);
            r.xcorr = cross_correlate(smooth(r.social, c.smoothing), smooth(r.news, c.smoothing), c.max_lag);
        }
    });

    json summary = json::array();
    for (std::size_t i = 0; i < comms.size(); ++i) {
        auto stem = "series/community_" + padded_index(static_cast<std::size_t>(comms[i].id), comms.size());
        const auto& r = results[i];
        st.ws.write_with(stem + "_social.csv",
                         [&](std::ostream& os) { write_series_csv(os, r.social, "relative_coverage"); });
        json entry = {{"community", comms[i].id}, {"label", comms[i].label}, {"social_days", r.social.size()}};
        if (in.news) {
            st.ws.write_with(stem + "_news.csv",
                             [&](std::ostream& os) { write_series_csv(os, r.news, "relative_coverage"); });
            entry["news_days"] = r.news.size();
        }
        if (r.xcorr) {
            st.ws.write_with(stem + "_xcorr.csv",
                             [&](std::ostream& os) { write_cross_correlation_csv(os, *r.xcorr); });
            entry["best_lag"] = r.xcorr->best_lag ? json(*r.xcorr->best_lag) : json(nullptr);
            entry["best_correlation"] = r.xcorr->best_lag ? json(r.xcorr->best_value) : json(nullptr);
        }
        summary.push_back(std::move(entry));
    }
    st.ws.write("series/summary.json", json_text(summary));
}

std::vector<std::vector<std::string>> load_reference(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open reference {}", path.string()));
    try {
        auto j = json::parse(in);
        if (j.is_object()) return contexts_from_truth(j);
        return j.get<std::vector<std::vector<std::string>>>();
    } catch (const json::exception& e) {
        throw InputError(fmt::format("{}: expected a truth file or a list of actant lists ({})",
                                     path.string(), e.what()));
    }
}

json report_json(const AgreementReport& r) {
    auto metric = [&](double v) { return r.defined ? json(v) : json(nullptr); };
    return {{"matched", r.matched},
            {"total", r.total},
            {"coverage", r.coverage},
            {"homogeneity", metric(r.scores.homogeneity)},
            {"completeness", metric(r.scores.completeness)},
            {"v_measure", metric(r.scores.v_measure)}};
}

void stage_evaluate(State& st) {
    auto& in = st.in();
    const auto& c = st.cfg();
    const auto& cset = st.get_communities();
    const auto& g = st.get_graph();
    auto heads = phrase_heads(in.social);
    std::vector<std::vector<std::string>> social_actants;
    for (const auto& comm : cset.communities)
        social_actants.push_back(community_actants(comm, g, heads, in.seeds, in.aliases));

    json evaluation = {{"communities", social_actants.size()}};
    if (!c.reference.empty()) {
        auto reference = load_reference(c.reference);
        auto report = evaluate_communities(social_actants, reference);
        evaluation["reference"] = report_json(report);
        evaluation["reference"]["contexts"] = reference.size();
        if (report.defined)
            log::info(fmt::format("evaluate: V-measure {:.4f} against {} reference communities",
                                  report.scores.v_measure, reference.size()));
    }

    if (auto* windows = st.get_windows()) {
        auto nets = build_networks(*windows, in, c.threads);
        std::vector<DailyAgreement> rows(windows->size());
        parallel_for(windows->size(), c.threads, [&](std::size_t i) {
            auto news_comms = window_communities(nets[i], derive_seed(*c.community_seed, "window", i));
            rows[i] = {(*windows)[i].start, evaluate_communities(news_comms, social_actants)};
        });
        st.ws.write_with("agreement.csv", [&](std::ostream& os) { write_agreement_csv(os, rows); });
        evaluation["windows"] = rows.size();
    }
    st.ws.write("evaluation.json", json_text(evaluation));
}

// Returns false when the stage had nothing to do.
bool dispatch(Stage s, State& st) {
    switch (s) {
        case Stage::ingest: stage_ingest(st); return true;
        case Stage::group: stage_group(st); return true;
        case Stage::cluster: stage_cluster(st); return true;
        case Stage::graph: stage_graph(st); return true;
        case Stage::communities: stage_communities(st); return true;
        case Stage::newsnet: return stage_newsnet(st);
        case Stage::coverage: stage_coverage(st); return true;
        case Stage::evaluate: stage_evaluate(st); return true;
    }
    return false;
}

void execute(Workspace& ws, State& st, Stage s) {
    ws.begin(s);
    try {
        bool ran = dispatch(s, st);
        ws.finish(ran ? "complete" : "skipped");
    } catch (const Error& e) {
        ws.fail(s, e.what());
        ws.write_manifest();
        if (dynamic_cast<const StageError*>(&e))
            throw StageError(fmt::format("stage {}: {}", to_string(s), e.what()));
        throw;
    } catch (const std::exception& e) {
        ws.fail(s, e.what());
        ws.write_manifest();
        throw StageError(fmt::format("stage {}: {}", to_string(s), e.what()));
    }
}

RunConfig prepared(RunConfig config) {
    config.resolve();
    config.validate();
    return config;
}

}  // namespace

fs::path run_pipeline(const RunConfig& raw) {
    RunConfig config = prepared(raw);
    Workspace ws(config, false, false);
    State st(ws);
    for (Stage s : kAllStages) execute(ws, st, s);
    ws.write_manifest();
    return ws.dir();
}

void run_stage(Stage stage, const RunConfig& raw, bool force) {
    RunConfig config = prepared(raw);
    Workspace ws(config, true, force);
    State st(ws);
    ws.check_upstream(stage);
    execute(ws, st, stage);
    ws.write_manifest();
}

void write_simulation(const fs::path& dir, const SimulationOptions& options) {
    ModelOptions mo = options.model;
    mo.seed = derive_seed(options.seed, "model");
    CoupledOptions co = options.streams;
    co.seed = derive_seed(options.seed, "streams");
    auto model = make_model(mo);
    auto streams = generate_coupled(model, co);
    auto emb = synthesize_embeddings(model, {&streams.social, &streams.news},
                                     derive_seed(options.seed, "embeddings"));
    auto seeds = model_seeds(model, streams.social);

    fs::create_directories(dir);
    save_tuples(dir / "social.jsonl", streams.social);
    save_tuples(dir / "news.jsonl", streams.news);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw InputError(fmt::format("cannot write {}", (dir / name).string()));
        return out;
    };
    {
        auto out = open("embeddings.tsv");
        write_embeddings(out, emb);
    }
    {
        auto out = open("seeds.txt");
        write_seed_list(out, seeds);
    }
    {
        auto out = open("truth.json");
        json truth = truth_to_json(model);
        truth["lag"] = co.lag;
        truth["days"] = co.days;
        out << json_text(truth);
    }
    {
        auto out = open("config.json");
        json config = {{"social", "social.jsonl"},   {"news", "news.jsonl"},
                       {"embeddings", "embeddings.tsv"}, {"seeds", "seeds.txt"},
                       {"reference", "truth.json"},   {"output_dir", "run"},
                       {"seed", options.seed}};
        out << json_text(config);
    }
}

}  // namespace narrnet
