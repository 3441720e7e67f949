#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "narrnet/graph.hpp"

using namespace narrnet;
using fixture::tuple;

namespace {
Subnode node(int id, std::set<std::string> phrases, std::string label = "") {
    Subnode s;
    s.id = id;
    s.member_phrases = std::move(phrases);
    if (!label.empty()) s.label = {label};
    return s;
}
}  // namespace

TEST_CASE("one tuple between two sub-nodes makes one edge") {
    auto c = fixture::corpus({tuple("bill gates", "invented", "5g")});
    auto g = build_graph(c, {node(0, {"bill gates"}), node(1, {"5g"})});
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].source == 0);
    CHECK(g.edges[0].target == 1);
    CHECK(g.edges[0].weight == 1);
    CHECK(g.edges[0].relations == std::map<std::string, std::size_t>{{"invented", 1}});
}

TEST_CASE("repeated tuples aggregate and weight equals the relation multiset") {
    auto c = fixture::corpus({tuple("a", "r1", "b"), tuple("a", "r2", "b"), tuple("a", "r1", "b"),
                              tuple("b", "r3", "a")});
    auto g = build_graph(c, {node(0, {"a"}), node(1, {"b"})});
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].weight == 3);
    CHECK(g.edges[0].top_relations(3) == std::vector<std::string>{"r1", "r2"});
    for (const auto& e : g.edges) {
        std::size_t sum = 0;
        for (const auto& [_, n] : e.relations) sum += n;
        CHECK(sum == e.weight);
    }
}

TEST_CASE("a phrase in two sub-nodes fans out") {
    auto c = fixture::corpus({tuple("bill gates foundation", "funds", "vaccine")});
    auto g = build_graph(c, {node(0, {"bill gates foundation"}), node(1, {"bill gates foundation"}),
                             node(2, {"vaccine"})});
    CHECK(g.edges.size() == 2);
    CHECK(g.total_weight() == 2);
}

TEST_CASE("self-loops are skipped unless allowed; unknown phrases are dropped") {
    auto c = fixture::corpus({tuple("a", "r", "a2"), tuple("a", "r", "zzz")});
    std::vector<Subnode> subs{node(0, {"a", "a2"})};
    auto g = build_graph(c, subs);
    CHECK(g.edges.empty());
    CHECK(g.skipped_self_loops == 1);
    CHECK(g.dropped_tuples == 1);
    CHECK(build_graph(c, subs, true).edges.size() == 1);
}

TEST_CASE("tuple order does not change the graph") {
    std::vector<RelationTuple> ts{tuple("a", "r1", "b"), tuple("b", "r2", "c"), tuple("a", "r3", "c"),
                                  tuple("a", "r1", "b")};
    std::vector<Subnode> subs{node(0, {"a"}), node(1, {"b"}), node(2, {"c"})};
    auto g1 = build_graph(fixture::corpus(ts), subs);
    std::reverse(ts.begin(), ts.end());
    auto g2 = build_graph(fixture::corpus(ts), subs);
    CHECK(graph_to_json(g1) == graph_to_json(g2));
}

TEST_CASE("thresholding") {
    auto c = fixture::corpus({tuple("a", "r", "b"), tuple("b", "r", "c"), tuple("b", "r", "c"), tuple("c", "r", "d"),
                              tuple("c", "r", "d"), tuple("c", "r", "d"), tuple("c", "r", "d"), tuple("c", "r", "d")});
    auto g = build_graph(c, {node(0, {"a"}), node(1, {"b"}), node(2, {"c"}), node(3, {"d"})});
    CHECK(graph_to_json(threshold_edges(g, 1)) == graph_to_json(g));  // no isolated nodes here
    auto t2 = threshold_edges(g, 2);
    CHECK(t2.edges.size() == 2);
    CHECK(t2.nodes.size() == 3);
    auto t9 = threshold_edges(g, 9);
    CHECK(t9.edges.empty());
    CHECK(t9.nodes.empty());
    CHECK_THROWS_AS(threshold_edges(g, 0), ConfigError);
}

TEST_CASE("relationship clusters follow the embedding") {
    NarrativeEdge e;
    e.relations = {{"causes", 2}, {"creates", 1}, {"cures", 1}, {"heals", 3}};
    EmbeddingTable emb;
    emb.dimension = 2;
    emb.entries = {{"causes", {0, 0}}, {"creates", {0.3, 0.1}}, {"cures", {9, 9}}, {"heals", {9.2, 8.8}}};
    auto clusters = cluster_edge_relationships(e, emb, 2, 5);
    std::set<std::set<std::string>> got;
    for (const auto& c : clusters) got.emplace(c.begin(), c.end());
    CHECK(got == std::set<std::set<std::string>>{{"causes", "creates"}, {"cures", "heals"}});
    NarrativeEdge one;
    one.relations = {{"causes", 1}};
    CHECK(cluster_edge_relationships(one, emb, 2, 0).size() == 1);
    CHECK(cluster_edge_relationships(e, emb, 4, 0).size() == 4);
}

TEST_CASE("GraphML carries labels, weights and community ids") {
    auto c = fixture::corpus({tuple("a b", "likes", "c"), tuple("a b", "hates", "c")});
    auto g = build_graph(c, {node(0, {"a b"}, "a&b"), node(1, {"c"}, "c")});
    std::ostringstream os;
    write_graphml(os, g, true, {{0, {2, 5}}});
    auto xml = os.str();
    CHECK(xml.find("edgedefault=\"directed\"") != std::string::npos);
    CHECK(xml.find("<data key=\"communities\">2;5</data>") != std::string::npos);
    CHECK(xml.find(">2</data>") != std::string::npos);
    CHECK(xml.find("hates; likes") != std::string::npos);
    CHECK(xml.find("a&amp;b") != std::string::npos);
    CHECK(xml_escape("a<b>&\"'") == "a&lt;b&gt;&amp;&quot;&apos;");
    std::ostringstream un;
    write_graphml(un, g, false);
    CHECK(un.str().find("edgedefault=\"undirected\"") != std::string::npos);
}

TEST_CASE("graph JSON round trip") {
    auto c = fixture::corpus({tuple("a", "r1", "b"), tuple("b", "r2", "a")});
    auto g = build_graph(c, {node(0, {"a"}, "a"), node(1, {"b"}, "b")});
    g.edges[0].relation_clusters = {{"r1"}};
    auto j = graph_to_json(g);
    CHECK(graph_to_json(graph_from_json(j)) == j);
}
