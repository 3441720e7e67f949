#include "narrnet/graph.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include <fmt/format.h>

namespace narrnet {

using nlohmann::json;

std::vector<std::string> NarrativeEdge::top_relations(std::size_t n) const {
    std::vector<std::pair<std::string, std::size_t>> items(relations.begin(), relations.end());
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < items.size() && i < n; ++i) out.push_back(items[i].first);
    return out;
}

const Subnode* NarrativeGraph::node(int id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const Subnode& s, int v) { return s.id < v; });
    return it != nodes.end() && it->id == id ? &*it : nullptr;
}

std::size_t NarrativeGraph::total_weight() const {
    std::size_t sum = 0;
    for (const auto& e : edges) sum += e.weight;
    return sum;
}

NarrativeGraph build_graph(const Corpus& corpus, const std::vector<Subnode>& subnodes,
                           bool allow_self_loops) {
    NarrativeGraph graph;
    graph.nodes = subnodes;
    std::sort(graph.nodes.begin(), graph.nodes.end(),
              [](const Subnode& a, const Subnode& b) { return a.id < b.id; });
    graph.allow_self_loops = allow_self_loops;

    auto lookup = phrase_to_subnodes(subnodes);
    std::map<std::pair<int, int>, NarrativeEdge> edges;
    for (const auto& t : corpus.tuples) {
        auto a = lookup.find(t.arg1);
        auto b = lookup.find(t.arg2);
        if (a == lookup.end() || b == lookup.end()) {
            ++graph.dropped_tuples;
            continue;
        }
        for (int src : a->second)
            for (int dst : b->second) {
                if (src == dst && !allow_self_loops) {
                    ++graph.skipped_self_loops;
                    continue;
                }
                auto& e = edges[{src, dst}];
                e.source = src;
                e.target = dst;
                ++e.weight;
                ++e.relations[t.rel];
            }
    }
    for (auto& [_, e] : edges) graph.edges.push_back(std::move(e));
    return graph;
}

NarrativeGraph threshold_edges(const NarrativeGraph& graph, std::size_t min_weight) {
    if (min_weight < 1) throw ConfigError("min_weight must be >= 1");
    NarrativeGraph out;
    out.allow_self_loops = graph.allow_self_loops;
    out.dropped_tuples = graph.dropped_tuples;
    out.skipped_self_loops = graph.skipped_self_loops;
    std::set<int> used;
    for (const auto& e : graph.edges) {
        if (e.weight < min_weight) continue;
        out.edges.push_back(e);
        used.insert(e.source);
        used.insert(e.target);
    }
    for (const auto& n : graph.nodes)
        if (used.count(n.id)) out.nodes.push_back(n);
    return out;
}

std::vector<std::vector<std::string>> cluster_edge_relationships(const NarrativeEdge& edge,
                                                                 const EmbeddingTable& emb,
                                                                 std::size_t k,
                                                                 std::uint64_t seed) {
    std::vector<std::string> phrases;
    std::vector<std::string> missing;
    std::vector<Vector> points;
    for (const auto& [rel, _] : edge.relations) {
        if (auto v = phrase_vector(rel, emb)) {
            phrases.push_back(rel);
            points.push_back(std::move(*v));
        } else {
            missing.push_back(rel);
        }
    }
    std::vector<std::vector<std::string>> clusters;
    if (!points.empty()) {
        KMeansOptions opts;
        opts.k = std::min(std::max<std::size_t>(k, 1), points.size());
        opts.seed = seed;
        auto result = kmeans(points, opts);
        clusters.resize(result.centroids.size());
        for (std::size_t i = 0; i < phrases.size(); ++i)
            clusters[result.assignment[i]].push_back(phrases[i]);
        std::erase_if(clusters, [](const auto& c) { return c.empty(); });
        std::sort(clusters.begin(), clusters.end());
    }
    if (!missing.empty()) clusters.push_back(std::move(missing));
    return clusters;
}

WeightedGraph undirected_projection(const NarrativeGraph& graph) {
    WeightedGraph g(graph.nodes.size());
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) index[graph.nodes[i].id] = i;
    for (const auto& e : graph.edges)
        g.add_edge(index.at(e.source), index.at(e.target), static_cast<double>(e.weight));
    return g;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

void write_graphml(std::ostream& out, const NarrativeGraph& graph, bool directed,
                   const NodeCommunities& communities) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
        << "  <key id=\"group\" for=\"node\" attr.name=\"group\" attr.type=\"int\"/>\n"
        << "  <key id=\"ner_score\" for=\"node\" attr.name=\"ner_score\" attr.type=\"double\"/>\n"
        << "  <key id=\"communities\" for=\"node\" attr.name=\"communities\" attr.type=\"string\"/>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <key id=\"relations\" for=\"edge\" attr.name=\"relations\" attr.type=\"string\"/>\n"
        << "  <graph id=\"narrative\" edgedefault=\"" << (directed ? "directed" : "undirected")
        << "\">\n";
    for (const auto& n : graph.nodes) {
        std::string comm;
        if (auto it = communities.find(n.id); it != communities.end()) {
            for (std::size_t i = 0; i < it->second.size(); ++i)
                comm += (i ? ";" : "") + std::to_string(it->second[i]);
        }
        out << "    <node id=\"n" << n.id << "\">\n"
            << "      <data key=\"label\">" << xml_escape(n.label_text()) << "</data>\n"
            << "      <data key=\"group\">" << n.group_id << "</data>\n"
            << "      <data key=\"ner_score\">" << fmt::format("{}", n.ner_score) << "</data>\n"
            << "      <data key=\"communities\">" << comm << "</data>\n"
            << "    </node>\n";
    }

    auto write_edge = [&](int src, int dst, std::size_t weight, const std::vector<std::string>& rels) {
        out << "    <edge source=\"n" << src << "\" target=\"n" << dst << "\">\n"
            << "      <data key=\"weight\">" << weight << "</data>\n"
            << "      <data key=\"relations\">" << xml_escape(text::join(rels, "; ")) << "</data>\n"
            << "    </edge>\n";
    };
    if (directed) {
        for (const auto& e : graph.edges) write_edge(e.source, e.target, e.weight, e.top_relations());
    } else {
        std::map<std::pair<int, int>, NarrativeEdge> merged;
        for (const auto& e : graph.edges) {
            auto key = std::minmax(e.source, e.target);
            auto& m = merged[{key.first, key.second}];
            m.source = key.first;
            m.target = key.second;
            m.weight += e.weight;
            for (const auto& [rel, c] : e.relations) m.relations[rel] += c;
        }
        for (const auto& [_, e] : merged) write_edge(e.source, e.target, e.weight, e.top_relations());
    }
    out << "  </graph>\n</graphml>\n";
}

json graph_to_json(const NarrativeGraph& graph) {
    json edges = json::array();
    for (const auto& e : graph.edges) {
        json item = {{"source", e.source},
                     {"target", e.target},
                     {"weight", e.weight},
                     {"relations", e.relations}};
        if (!e.relation_clusters.empty()) item["relation_clusters"] = e.relation_clusters;
        edges.push_back(std::move(item));
    }
    return {{"directed", true},
            {"allow_self_loops", graph.allow_self_loops},
            {"dropped_tuples", graph.dropped_tuples},
            {"skipped_self_loops", graph.skipped_self_loops},
            {"nodes", subnodes_to_json(graph.nodes)},
            {"edges", std::move(edges)}};
}

NarrativeGraph graph_from_json(const json& j) {
    NarrativeGraph graph;
    graph.allow_self_loops = j.value("allow_self_loops", false);
    graph.dropped_tuples = j.value("dropped_tuples", std::size_t{0});
    graph.skipped_self_loops = j.value("skipped_self_loops", std::size_t{0});
    graph.nodes = subnodes_from_json(j.at("nodes"));
    for (const auto& item : j.at("edges")) {
        NarrativeEdge e;
        e.source = item.at("source").get<int>();
        e.target = item.at("target").get<int>();
        e.weight = item.at("weight").get<std::size_t>();
        e.relations = item.at("relations").get<std::map<std::string, std::size_t>>();
        if (item.contains("relation_clusters"))
            e.relation_clusters = item["relation_clusters"].get<std::vector<std::vector<std::string>>>();
        graph.edges.push_back(std::move(e));
    }
    return graph;
}

}  // namespace narrnet
