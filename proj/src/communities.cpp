#include "narrnet/communities.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "narrnet/parallel.hpp"

namespace narrnet {

using nlohmann::json;

std::vector<int> Community::members() const {
    std::vector<int> all = core;
    all.insert(all.end(), peripheral.begin(), peripheral.end());
    std::sort(all.begin(), all.end());
    return all;
}

std::map<int, std::vector<int>> CommunitySet::node_index() const {
    std::map<int, std::vector<int>> index;
    for (const auto& c : communities)
        for (int n : c.core) index[n].push_back(c.id);
    for (const auto& c : communities)
        for (int n : c.peripheral) index[n].push_back(c.id);
    return index;
}

void CoassignmentMatrix::add(const Partition& partition) {
    for (std::size_t a = 0; a < n_; ++a)
        for (std::size_t b = 0; b < n_; ++b)
            if (partition[a] == partition[b]) ++counts_[a * n_ + b];
}

std::vector<Community> cores_and_peripheries(const CoassignmentMatrix& freq, double tau_core,
                                             double tau_relax) {
    if (!(tau_relax > 0.0 && tau_relax <= tau_core && tau_core <= 1.0))
        throw ConfigError(fmt::format("need 0 < tau_relax <= tau_core <= 1 (got {}, {})",
                                      tau_relax, tau_core));
    const std::size_t n = freq.size();
    // Frequencies are ratios of small integers; allow for their rounding.
    constexpr double eps = 1e-9;

    std::vector<std::size_t> comp(n, n);
    std::vector<Community> out;
    for (std::size_t start = 0; start < n; ++start) {
        if (comp[start] != n) continue;
        std::size_t cid = out.size();
        Community c;
        std::vector<std::size_t> stack{start};
        comp[start] = cid;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            c.core.push_back(static_cast<int>(v));
            for (std::size_t u = 0; u < n; ++u)
                if (comp[u] == n && u != v && freq.frequency(v, u) >= tau_core - eps) {
                    comp[u] = cid;
                    stack.push_back(u);
                }
        }
        std::sort(c.core.begin(), c.core.end());
        out.push_back(std::move(c));
    }

    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t cid = 0; cid < out.size(); ++cid) {
            if (comp[v] == cid) continue;
            double sum = 0.0;
            for (int u : out[cid].core) sum += freq.frequency(v, static_cast<std::size_t>(u));
            if (sum / static_cast<double>(out[cid].core.size()) >= tau_relax - eps)
                out[cid].peripheral.push_back(static_cast<int>(v));
        }
    }
    for (std::size_t cid = 0; cid < out.size(); ++cid) out[cid].id = static_cast<int>(cid);
    return out;
}

CoassignmentMatrix coassignment(const WeightedGraph& graph, const EnsembleOptions& options) {
    if (options.runs < 1) throw ConfigError("runs must be >= 1");
    std::vector<Partition> partitions(options.runs);
    parallel_for(options.runs, options.threads, [&](std::size_t r) {
        partitions[r] = louvain_once(graph, derive_seed(options.seed, "louvain", r)).partition;
    });
    CoassignmentMatrix freq(graph.size(), options.runs);
    for (const auto& p : partitions) freq.add(p);
    return freq;
}

CommunitySet ensemble_communities(const NarrativeGraph& graph, const EnsembleOptions& options) {
    if (!(options.tau_relax > 0.0 && options.tau_relax <= options.tau_core &&
          options.tau_core <= 1.0))
        throw ConfigError("need 0 < tau_relax <= tau_core <= 1");
    CommunitySet cset;
    cset.parameters = options;
    auto projection = undirected_projection(graph);
    auto freq = coassignment(projection, options);
    cset.communities = cores_and_peripheries(freq, options.tau_core, options.tau_relax);
    for (auto& c : cset.communities) {
        for (auto& v : c.core) v = graph.nodes[static_cast<std::size_t>(v)].id;
        for (auto& v : c.peripheral) v = graph.nodes[static_cast<std::size_t>(v)].id;
        std::sort(c.core.begin(), c.core.end());
        std::sort(c.peripheral.begin(), c.peripheral.end());
    }
    return cset;
}

void label_communities(CommunitySet& cset, const NarrativeGraph& graph) {
    std::map<int, double> degree;
    for (const auto& e : graph.edges) {
        degree[e.source] += static_cast<double>(e.weight);
        degree[e.target] += static_cast<double>(e.weight);
    }

    std::stable_sort(cset.communities.begin(), cset.communities.end(),
                     [](const Community& a, const Community& b) {
                         if (a.size() != b.size()) return a.size() > b.size();
                         return a.core.front() < b.core.front();
                     });
    for (std::size_t i = 0; i < cset.communities.size(); ++i) {
        auto& c = cset.communities[i];
        c.id = static_cast<int>(i);
        std::vector<const Subnode*> members;
        for (int id : c.members())
            if (const auto* s = graph.node(id)) members.push_back(s);
        std::sort(members.begin(), members.end(), [&](const Subnode* a, const Subnode* b) {
            double da = degree[a->id];
            double db = degree[b->id];
            if (da != db) return da > db;
            if (a->ner_score != b->ner_score) return a->ner_score > b->ner_score;
            if (a->label_text() != b->label_text()) return a->label_text() < b->label_text();
            return a->id < b->id;
        });
        std::vector<std::string> parts;
        for (std::size_t k = 0; k < members.size() && k < 3; ++k)
            parts.push_back(members[k]->label_text());
        c.label = text::join(parts, ", ");
    }
}

json communities_to_json(const CommunitySet& cset) {
    json items = json::array();
    for (const auto& c : cset.communities)
        items.push_back({{"id", c.id},
                         {"size", c.size()},
                         {"label", c.label},
                         {"core", c.core},
                         {"peripheral", c.peripheral}});
    json index = json::object();
    for (const auto& [node, ids] : cset.node_index()) index[std::to_string(node)] = ids;
    return {{"parameters",
             {{"runs", cset.parameters.runs},
              {"tau_core", cset.parameters.tau_core},
              {"tau_relax", cset.parameters.tau_relax},
              {"seed", cset.parameters.seed}}},
            {"communities", std::move(items)},
            {"node_communities", std::move(index)}};
}

CommunitySet communities_from_json(const json& j) {
    CommunitySet cset;
    const auto& p = j.at("parameters");
    cset.parameters.runs = p.at("runs").get<std::size_t>();
    cset.parameters.tau_core = p.at("tau_core").get<double>();
    cset.parameters.tau_relax = p.at("tau_relax").get<double>();
    cset.parameters.seed = p.at("seed").get<std::uint64_t>();
    for (const auto& item : j.at("communities")) {
        Community c;
        c.id = item.at("id").get<int>();
        c.label = item.at("label").get<std::string>();
        c.core = item.at("core").get<std::vector<int>>();
        c.peripheral = item.at("peripheral").get<std::vector<int>>();
        cset.communities.push_back(std::move(c));
    }
    return cset;
}

}  // namespace narrnet
