#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "narrnet/coverage.hpp"
#include "oracles.hpp"

using namespace narrnet;
using fixture::tuple;

namespace {

Day day(const char* s) { return *parse_day(s); }

SubCorpus tokens(std::vector<std::string> ts) { return make_subcorpus({std::move(ts)}); }

TimeSeries noisy_series(Rng& rng, Day start, int length) {
    TimeSeries s;
    for (int i = 0; i < length; ++i) s.push_back(start + std::chrono::days{i}, rng.normal());
    return s;
}

}  // namespace

TEST_CASE("coverage score examples") {
    CHECK(coverage_score({"5g", "tower"}, tokens({"5g", "tower", "5g", "virus"})) == doctest::Approx(0.375));
    CHECK(coverage_score({"5g", "tower"}, tokens({"virus", "lab"})) == 0.0);
    CHECK(coverage_score({"5g", "tower", "radio"}, tokens({"tower", "tower", "tower"})) == doctest::Approx(1.0 / 3));
    CHECK(coverage_score({"5g"}, tokens({})) == 0.0);
    // duplicates in the community are one entry
    CHECK(coverage_score({"5g", "5g", "tower"}, tokens({"5g", "tower", "5g", "virus"})) == doctest::Approx(0.375));
}

TEST_CASE("multi-word entries match contiguous tokens inside one phrase") {
    auto sub = make_subcorpus({{"bill", "gates", "foundation"}, {"bill"}, {"gates"}});
    CHECK(coverage_score({"bill gates"}, sub) == doctest::Approx(1.0 / 5));
}

TEST_CASE("coverage score matches the indicator double loop") {
    Rng rng(12);
    for (int round = 0; round < 100; ++round) {
        std::vector<std::string> vocab;
        for (int i = 0; i < 25; ++i) vocab.push_back("w" + std::to_string(i));
        std::vector<std::string> c;
        std::size_t len = rng.index(1000);
        for (std::size_t i = 0; i < len; ++i) c.push_back(vocab[rng.index(vocab.size())]);
        std::vector<std::string> community;
        std::size_t size = 1 + rng.index(8);
        for (std::size_t i = 0; i < size; ++i) community.push_back(vocab[rng.index(vocab.size())]);
        CHECK(coverage_score(community, tokens(c)) == doctest::Approx(oracle::coverage(community, c)).epsilon(1e-12));
    }
}

TEST_CASE("relative coverage of a random-looking community is near 1") {
    Rng rng(4);
    std::vector<std::string> vocab;
    for (int i = 0; i < 1000; ++i) vocab.push_back("v" + std::to_string(i));
    std::vector<std::string> c;
    for (int i = 0; i < 200000; ++i) c.push_back(vocab[rng.index(vocab.size())]);
    auto sub = tokens(c);
    double sum = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        std::vector<std::string> community;
        for (int i = 0; i < 50; ++i) community.push_back(vocab[rng.index(vocab.size())]);
        auto rc = relative_coverage(community, sub, vocab, {20, 500, static_cast<std::uint64_t>(t)});
        CHECK_FALSE(rc.with_replacement);
        sum += rc.ratio;
    }
    CHECK(sum / trials == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("relative coverage edge cases and determinism") {
    auto sub = tokens({"a", "b", "c", "a"});
    std::vector<std::string> vocab{"c", "a", "b", "d"};
    auto r = relative_coverage({"zzz"}, sub, vocab, {5, 2, 9});
    CHECK(r.ratio == 0.0);
    auto r1 = relative_coverage({"a"}, sub, vocab, {5, 2, 9});
    auto r2 = relative_coverage({"a"}, sub, {"d", "b", "a", "c"}, {5, 2, 9});
    CHECK(r1.baseline_mean == r2.baseline_mean);
    CHECK(r1.ratio == r2.ratio);
    CHECK(r1.score == doctest::Approx(0.5));

    auto small = relative_coverage({"a"}, sub, vocab, {3, 10, 1});
    CHECK(small.with_replacement);

    auto none = relative_coverage({"a"}, sub, {"q"}, {3, 1, 1});
    CHECK(none.infinite);
    CHECK(std::isinf(none.ratio));
}

TEST_CASE("self cross-correlation peaks at zero") {
    Rng rng(5);
    for (int round = 0; round < 10; ++round) {
        auto a = noisy_series(rng, day("2020-02-01"), 40);
        auto cc = cross_correlate(a, a, 7);
        REQUIRE(cc.best_lag);
        CHECK(*cc.best_lag == 0);
        CHECK(cc.best_value == doctest::Approx(1.0));
        CHECK(cc.lags.size() == 15);
    }
}

TEST_CASE("a series shifted by three days peaks at lag 3") {
    Rng rng(6);
    auto a = noisy_series(rng, day("2020-02-01"), 50);
    TimeSeries b;
    for (const auto& p : a.points()) b.push_back(p.day + std::chrono::days{3}, p.value);
    auto cc = cross_correlate(a, b, 10);
    REQUIRE(cc.best_lag);
    CHECK(*cc.best_lag == 3);
    CHECK(cc.best_value == doctest::Approx(1.0));
    auto back = cross_correlate(b, a, 10);
    CHECK(*back.best_lag == -3);
}

TEST_CASE("constant series leave correlations undefined") {
    TimeSeries a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back(day("2020-01-01") + std::chrono::days{i}, 2.0);
        b.push_back(day("2020-01-01") + std::chrono::days{i}, i);
    }
    auto cc = cross_correlate(a, b, 2);
    for (const auto& l : cc.lags) CHECK_FALSE(l.defined);
    CHECK_FALSE(cc.best_lag);
    std::ostringstream os;
    write_cross_correlation_csv(os, cc);
    CHECK(os.str().find("lag") != std::string::npos);
}

TEST_CASE("clustering scores") {
    auto s = clustering_scores({0, 0, 1, 1}, {0, 0, 0, 1});
    auto ref = oracle::hcv({0, 0, 1, 1}, {0, 0, 0, 1});
    CHECK(s.homogeneity == doctest::Approx(0.3113).epsilon(1e-3));
    CHECK(s.completeness == doctest::Approx(0.3837).epsilon(1e-3));
    CHECK(s.v_measure == doctest::Approx(0.3437).epsilon(1e-3));
    CHECK(s.homogeneity == doctest::Approx(ref.h).epsilon(1e-12));
    CHECK(s.completeness == doctest::Approx(ref.c).epsilon(1e-12));

    auto single = clustering_scores({0, 0, 1, 1}, {0, 0, 0, 0});
    CHECK(single.homogeneity == 0.0);
    CHECK(single.completeness == 1.0);
    CHECK(single.v_measure == 0.0);

    auto perm = clustering_scores({0, 0, 1, 1, 2}, {7, 7, 3, 3, 5});
    CHECK(perm.homogeneity == doctest::Approx(1.0));
    CHECK(perm.completeness == doctest::Approx(1.0));
    CHECK(perm.v_measure == doctest::Approx(1.0));
}

TEST_CASE("h/c swap identity and bounds on random labelings") {
    Rng rng(17);
    for (int round = 0; round < 100; ++round) {
        std::size_t n = 1 + rng.index(30);
        std::vector<int> a(n), b(n);
        for (auto& x : a) x = static_cast<int>(rng.index(4));
        for (auto& x : b) x = static_cast<int>(rng.index(4));
        auto ab = clustering_scores(a, b);
        auto ba = clustering_scores(b, a);
        CHECK(ab.homogeneity == doctest::Approx(ba.completeness).epsilon(1e-12));
        CHECK(ab.v_measure == doctest::Approx(ba.v_measure).epsilon(1e-12));
        auto ref = oracle::hcv(a, b);
        CHECK(ab.homogeneity == doctest::Approx(ref.h).epsilon(1e-9));
        CHECK(ab.completeness == doctest::Approx(ref.c).epsilon(1e-9));
        for (double v : {ab.homogeneity, ab.completeness, ab.v_measure}) {
            CHECK(v >= -1e-12);
            CHECK(v <= 1 + 1e-12);
        }
    }
}

TEST_CASE("agreement walks predicted communities in order") {
    std::vector<std::vector<std::string>> predicted{{"virus", "china", "lab"}, {"5g", "tower", "virus"}};
    std::vector<std::vector<std::string>> reference{{"china", "virus"}, {"5g", "tower", "virus"}};
    auto r = evaluate_communities(predicted, reference);
    // virus appears in both references: lowest index wins; lab has no reference
    CHECK(r.total == 5);
    CHECK(r.matched == 4);
    CHECK(r.coverage == doctest::Approx(0.8));
    CHECK(r.labels_true == std::vector<int>{0, 0, 1, 1});
    CHECK(r.labels_pred == std::vector<int>{0, 0, 1, 1});
    CHECK(r.defined);
    CHECK(r.scores.v_measure == doctest::Approx(1.0));

    auto none = evaluate_communities({{"x"}}, {{"y"}});
    CHECK_FALSE(none.defined);
    CHECK(none.coverage == 0.0);
}

TEST_CASE("daily coverage series over a corpus") {
    auto c = fixture::corpus({tuple("5g tower", "r", "virus", "2020-01-01"), tuple("lab", "r", "china", "2020-01-02"),
                              tuple("5g", "r", "radio", "2020-01-02"), tuple("bat", "r", "soup")});
    auto series = coverage_series({"5g", "tower"}, c, {"5g", "tower", "virus", "lab", "china", "radio"},
                                  day("2020-01-01"), day("2020-01-03"), {10, 2, 3});
    CHECK(series.size() <= 3);
    CHECK(series.size() >= 2);
    auto sub = subcorpus_between(c, day("2020-01-01"), day("2020-01-02"));
    CHECK(sub.token_count == 3);
    CHECK(coverage_score({"5g", "tower"}, sub) == doctest::Approx(2.0 / 6));
}
