#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "narrnet/news.hpp"
#include "oracles.hpp"

using namespace narrnet;
using fixture::tuple;

namespace {

Day day(const char* s) { return *parse_day(s); }

std::vector<const RelationTuple*> pointers(const Corpus& c) {
    std::vector<const RelationTuple*> out;
    for (const auto& t : c.tuples) out.push_back(&t);
    return out;
}

}  // namespace

TEST_CASE("window counts") {
    CHECK(make_windows(day("2020-01-01"), day("2020-04-14")).size() == 101);
    CHECK(make_windows(day("2020-01-01"), day("2020-01-05")).size() == 1);
    auto w = make_windows(day("2020-01-01"), day("2020-01-10"), 5, 2);
    REQUIRE(w.size() == 3);
    CHECK(w[0].start == day("2020-01-01"));
    CHECK(w[1].start == day("2020-01-03"));
    CHECK(w[2].start == day("2020-01-05"));
    CHECK(w[2].end == day("2020-01-10"));
    CHECK(make_windows(day("2020-01-01"), day("2020-01-03")).empty());
    CHECK_THROWS_AS(make_windows(day("2020-01-02"), day("2020-01-01")), ConfigError);
}

TEST_CASE("window count sweep against enumeration") {
    const Day t0 = day("2021-03-01");
    for (int span = 1; span <= 40; ++span)
        for (std::size_t width = 1; width <= 9; ++width)
            for (std::size_t shift = 1; shift <= 6; ++shift) {
                auto t1 = t0 + std::chrono::days{span - 1};
                std::size_t expected = 0;
                for (auto s = t0; s + std::chrono::days{static_cast<int>(width) - 1} <= t1;
                     s += std::chrono::days{static_cast<int>(shift)})
                    ++expected;
                CHECK(make_windows(t0, t1, width, shift).size() == expected);
            }
}

TEST_CASE("tuples are assigned to every window covering their day") {
    auto news = fixture::corpus({tuple("a", "r", "b", "2020-01-03"), tuple("a", "r", "b"),
                                 tuple("a", "r", "b", "2020-01-07")},
                                Source::news);
    auto w = make_windows(day("2020-01-01"), day("2020-01-07"), 5, 1);
    assign_tuples(w, news);
    CHECK(w[0].tuples == std::vector<std::size_t>{0});
    CHECK(w[2].tuples == std::vector<std::size_t>{0, 2});
}

TEST_CASE("entity vocabulary folds aliases and drops stop words") {
    AliasMap aliases;
    aliases.add("trump", "donald trump");
    aliases.add("donald", "donald trump");
    auto v = entity_vocabulary({{"trump", 3}, {"donald", 2}, {"the", 9}, {"virus", 1}}, aliases, {"the"});
    CHECK(v == EntityVocabulary{{"donald trump", 5}, {"virus", 1}});
}

TEST_CASE("selection takes everything below the cutoffs and merges aliases") {
    EntityVocabulary vocab;
    for (int i = 0; i < 30; ++i) vocab["e" + std::to_string(100 + i)] = 1 + i;
    TfidfMatrix m;
    for (const auto& [e, _] : vocab) m.entities.push_back(e);
    m.tf.assign(1, std::vector<double>(30, 1.0));
    m.score.assign(1, std::vector<double>(30, 0.5));
    auto all = select_entities(0, m, vocab, {});
    CHECK(all.size() == 30);

    SelectionOptions tight{2, 1};
    // top tf-idf ties break on frequency: e129, e128; top frequency: e129 again
    CHECK(select_entities(0, m, vocab, {}, tight) == std::vector<std::string>{"e128", "e129"});

    AliasMap aliases;
    aliases.add("trump", "donald trump");
    aliases.add("donald", "donald trump");
    TfidfMatrix t;
    t.entities = {"donald", "trump", "virus"};
    t.tf = {{1, 1, 0}};
    t.score = {{2, 1, 0}};
    auto sel = select_entities(0, t, {{"donald", 1}, {"trump", 1}, {"virus", 1}}, aliases, SelectionOptions{25, 0});
    CHECK(sel == std::vector<std::string>{"donald trump"});
}

TEST_CASE("tf-idf uses the smooth idf") {
    auto news = fixture::corpus({tuple("virus", "r", "china", "2020-01-01"), tuple("virus", "r", "lab", "2020-01-08")},
                                Source::news);
    auto w = make_windows(day("2020-01-01"), day("2020-01-12"), 5, 5);  // 2 windows: [1,6), [6,11)
    assign_tuples(w, news);
    auto m = window_tfidf(w, news, {{"china", 1}, {"lab", 1}, {"virus", 2}}, {});
    REQUIRE(m.entities == std::vector<std::string>{"china", "lab", "virus"});
    CHECK(m.tf[0] == std::vector<double>{1, 0, 1});
    CHECK(m.score[0][0] == doctest::Approx(std::log(2.0 / 2.0)));
    CHECK(m.score[0][2] == doctest::Approx(std::log(2.0 / 3.0)));
}

TEST_CASE("co-occurrence: hand-run example and guards") {
    auto c = fixture::corpus({tuple("bill gates", "funds", "vaccine research")}, Source::news);
    auto net = cooccur_network(pointers(c), {"gates", "research"}, default_stop_words());
    CHECK(net.counts == std::vector<std::vector<std::size_t>>{{0, 1}, {1, 0}});
    CHECK(net.normalized == std::vector<std::vector<double>>{{0, 1}, {1, 0}});

    auto stopped = fixture::corpus({tuple("gates", "is", "research")}, Source::news);
    auto n2 = cooccur_network(pointers(stopped), {"gates", "research"}, default_stop_words());
    CHECK(n2.counts[0][1] == 0);

    AliasMap aliases;
    aliases.add("trump", "donald trump");
    auto self = fixture::corpus({tuple("trump", "met", "donald trump")}, Source::news);
    auto n3 = cooccur_network(pointers(self), {"donald trump", "trump"}, {}, aliases);
    for (const auto& row : n3.counts)
        for (auto v : row) CHECK(v == 0);
}

TEST_CASE("co-occurrence matches the double-loop oracle") {
    Rng rng(31);
    const StopWords stop{"is", "was"};
    for (int round = 0; round < 100; ++round) {
        std::vector<std::string> pool;
        for (int i = 0; i < 10; ++i) pool.push_back("ent" + std::to_string(i));
        std::vector<std::string> rels{"is", "was", "funds", "hates", "spreads"};
        std::vector<RelationTuple> ts;
        std::vector<oracle::Triple> triples;
        std::size_t count = rng.index(51);
        for (std::size_t i = 0; i < count; ++i) {
            auto s = pool[rng.index(pool.size())], o = pool[rng.index(pool.size())];
            auto r = rels[rng.index(rels.size())];
            ts.push_back(tuple("the " + s, r, o));
            triples.push_back({s, r, o});
        }
        std::vector<std::string> entities;
        for (const auto& e : pool)
            if (rng.uniform() < 0.7) entities.push_back(e);
        auto c = fixture::corpus(ts, Source::news);
        auto net = cooccur_network(pointers(c), entities, stop);
        auto ref = oracle::cooccurrence(triples, entities, stop);
        REQUIRE(net.entities == ref.entities);
        for (std::size_t i = 0; i < ref.entities.size(); ++i) {
            double row = 0;
            for (std::size_t j = 0; j < ref.entities.size(); ++j) {
                CHECK(static_cast<long>(net.counts[i][j]) == ref.m[i][j]);
                CHECK(net.counts[i][j] == net.counts[j][i]);
                CHECK(std::abs(net.normalized[i][j] - ref.norm[i][j]) <= 1e-12);
                row += net.normalized[i][j];
            }
            CHECK(net.counts[i][i] == 0);
            if (row > 0) CHECK(std::abs(row - 1.0) <= 1e-12);
        }
        for (const auto& a : ref.entities)
            for (const auto& b : ref.entities)
                CHECK(static_cast<long>(common_neighbors(net, a, b)) == oracle::common_neighbors(ref, a, b));
    }
}

TEST_CASE("common neighbours") {
    auto c = fixture::corpus({tuple("a1", "r", "x"), tuple("a1", "r", "y"), tuple("a2", "r", "x"), tuple("a2", "r", "z")},
                             Source::news);
    auto net = cooccur_network(pointers(c), {"a1", "a2", "x", "y", "z"}, {});
    CHECK(common_neighbors(net, "a1", "a2") == 1);
    CHECK(common_neighbors(net, "y", "z") == 0);
    log::set_level(log::Level::quiet);
    CHECK(common_neighbors(net, "a1", "nobody") == 0);
    log::set_level(log::Level::warn);
}

TEST_CASE("attachment series is indexed by window start") {
    auto news = fixture::corpus({tuple("a1", "r", "x", "2020-01-01"), tuple("a2", "r", "x", "2020-01-01"),
                                 tuple("a1", "r", "y", "2020-01-06"), tuple("a2", "r", "y", "2020-01-06"),
                                 tuple("a2", "r", "x", "2020-01-06")},
                                Source::news);
    auto w = make_windows(day("2020-01-01"), day("2020-01-10"), 5, 5);
    assign_tuples(w, news);
    std::vector<CooccurrenceNetwork> nets;
    for (auto& win : w) {
        std::vector<const RelationTuple*> ts;
        for (auto i : win.tuples) ts.push_back(&news.tuples[i]);
        nets.push_back(cooccur_network(ts, {"a1", "a2", "x", "y"}, {}));
    }
    auto s = attachment_series(w, nets, "a1", "a2");
    REQUIRE(s.size() == 2);
    CHECK(s.points()[0].day == day("2020-01-01"));
    CHECK(s.points()[0].value == 1);
    CHECK(s.points()[1].value == 1);
}

TEST_CASE("network exports") {
    auto c = fixture::corpus({tuple("a", "r", "b"), tuple("a", "r", "c")}, Source::news);
    auto net = cooccur_network(pointers(c), {"a", "b", "c"}, {});
    std::ostringstream raw, norm, xml;
    write_network_csv(raw, net);
    write_network_csv(norm, net, true);
    write_network_graphml(xml, net);
    CHECK(raw.str().find("a,0,1,1") != std::string::npos);
    CHECK(norm.str().find("a,0,0.5,0.5") != std::string::npos);
    CHECK(xml.str().find("edgedefault=\"undirected\"") != std::string::npos);
}
