#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "narrnet/pipeline.hpp"

using namespace narrnet;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / fmt_name(name);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static std::string fmt_name(const std::string& name) {
        return "narrnet-test-" + name + "-" + std::to_string(::getpid());
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

SimulationOptions small_sim(std::uint64_t seed, std::size_t days = 20) {
    SimulationOptions s;
    s.seed = seed;
    s.streams.days = days;
    s.streams.social_posts_per_day = 30;
    s.streams.news_posts_per_day = 20;
    return s;
}

RunConfig simulated(const fs::path& dir, const SimulationOptions& sim) {
    write_simulation(dir, sim);
    auto c = load_config(dir / "config.json");
    c.runs = 20;
    c.baseline_samples = 5;
    c.baseline_size = 50;
    return c;
}

int run_cli(const std::string& args) {
    int status = std::system((std::string(NARRNET_CLI) + " -q " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Quiet {
    Quiet() { log::set_level(log::Level::quiet); }
    ~Quiet() { log::set_level(log::Level::warn); }
};

}  // namespace

TEST_CASE("config files: unknown keys, ranges, relative paths") {
    TempDir t("config");
    {
        std::ofstream(t.path / "bad.json") << R"({"social": "s.jsonl", "min_coocc": 3})";
        std::ofstream(t.path / "range.json") << R"({"tau_core": 0.4, "tau_relax": 0.6})";
        std::ofstream(t.path / "ok.json") << R"({"social": "in/s.jsonl", "runs": 7})";
    }
    CHECK_THROWS_AS(load_config(t.path / "bad.json"), ConfigError);
    CHECK_THROWS_AS(load_config(t.path / "range.json").validate(), ConfigError);
    auto ok = load_config(t.path / "ok.json");
    CHECK(ok.runs == 7);
    CHECK(ok.social == t.path / "in/s.jsonl");
    CHECK_THROWS_AS(load_config(t.path / "missing.json"), ConfigError);
}

TEST_CASE("seeds resolve from the master seed and the config round trips") {
    RunConfig c;
    c.seed = 11;
    c.resolve();
    CHECK(c.kmeans_seed == derive_seed(11, "kmeans"));
    CHECK(c.community_seed == derive_seed(11, "communities"));
    CHECK(c.metric_seed == derive_seed(11, "metrics"));
    auto j = c.to_json();
    CHECK_FALSE(j.contains("threads"));
    CHECK_FALSE(j.contains("output_dir"));
    CHECK(RunConfig::from_json(j).to_json() == j);
}

TEST_CASE("stage names") {
    for (auto s : kAllStages) CHECK(parse_stage(to_string(s)) == s);
    CHECK_FALSE(parse_stage("simulate"));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("missing embeddings fail ingest with an input error") {
    Quiet q;
    TempDir t("missing");
    auto c = simulated(t.path, small_sim(1));
    c.embeddings = t.path / "nope.tsv";
    CHECK_THROWS_AS(run_pipeline(c), InputError);
    auto m = read_json(c.output_dir / "manifest.json");
    CHECK(m["partial"] == true);
    CHECK(m["failed_stage"] == "ingest");
    CHECK(run_cli("run -c " + (t.path / "config.json").string() + " --embeddings " +
                  (t.path / "nope.tsv").string()) == 3);
}

TEST_CASE("cli exit codes") {
    Quiet q;
    TempDir t("cli");
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("run --runs notanumber") == 2);
    CHECK(run_cli("bogus") == 2);
    std::ofstream(t.path / "cfg.json") << R"({"what": 1})";
    CHECK(run_cli("run -c " + (t.path / "cfg.json").string()) == 2);
    CHECK(run_cli("simulate -o " + (t.path / "sim").string() + " --days 10 --social-posts-per-day 20 "
                  "--news-posts-per-day 10") == 0);
    CHECK(run_cli("graph -c " + (t.path / "sim/config.json").string()) == 3);  // nothing upstream yet
    CHECK(run_cli("run --runs 5 -c " + (t.path / "sim/config.json").string()) == 0);
    CHECK(fs::exists(t.path / "sim/run/manifest.json"));
}

TEST_CASE("end to end on a simulation: reruns reproduce the manifest") {
    Quiet q;
    TempDir t("e2e");
    auto c = simulated(t.path, small_sim(7));
    auto dir = run_pipeline(c);
    for (const char* f : {"ingest.json", "groups.json", "subnodes.json", "subnodes.csv", "graph.json",
                          "graph.graphml", "communities.json", "communities.graphml", "windows.json",
                          "series/summary.json", "agreement.csv", "evaluation.json", "manifest.json"})
        CHECK_MESSAGE(fs::exists(dir / f), f);
    auto first = slurp(dir / "manifest.json");
    auto m = json::parse(first);
    CHECK(m["partial"] == false);
    CHECK(m["inputs"]["social"]["sha256"] == sha256_file(c.social));
    for (auto s : kAllStages) CHECK(m["stages"][to_string(s)]["status"] == "complete");

    auto comms = read_json(dir / "communities.json");
    CHECK(comms["communities"].size() == 3);
    auto eval = read_json(dir / "evaluation.json");
    CHECK(eval["reference"]["v_measure"].get<double>() >= 0.9);

    run_pipeline(c);
    CHECK(slurp(dir / "manifest.json") == first);
}

TEST_CASE("stage subcommands refuse stale upstream artifacts") {
    Quiet q;
    TempDir t("stale");
    auto c = simulated(t.path, small_sim(3));
    CHECK_THROWS_AS(run_stage(Stage::group, c), InputError);  // no ingest yet
    run_stage(Stage::ingest, c);
    run_stage(Stage::group, c);
    run_stage(Stage::cluster, c);

    // a parameter change makes the recorded group stage stale for cluster
    auto changed = c;
    changed.min_cooc = 5;
    CHECK_THROWS_AS(run_stage(Stage::cluster, changed), InputError);

    // an edited artifact too
    { std::ofstream(c.output_dir / "groups.json", std::ios::app) << "\n"; }
    CHECK_THROWS_AS(run_stage(Stage::cluster, c), InputError);
    run_stage(Stage::cluster, c, true);
    auto m = read_json(c.output_dir / "manifest.json");
    CHECK(m["stages"]["cluster"]["forced"] == true);

    run_stage(Stage::group, c);
    run_stage(Stage::cluster, c);
    m = read_json(c.output_dir / "manifest.json");
    CHECK_FALSE(m["stages"]["cluster"].contains("forced"));
}

TEST_CASE("an unreachable co-occurrence threshold leaves singleton groups") {
    Quiet q;
    TempDir t("singletons");
    auto c = simulated(t.path, small_sim(5));
    c.min_cooc = 999999;
    run_stage(Stage::ingest, c);
    run_stage(Stage::group, c);
    auto groups = read_json(c.output_dir / "groups.json");
    REQUIRE(groups.size() > 0);
    for (const auto& g : groups)
        if (!g["seeds"].empty()) CHECK(g["seeds"].size() == 1);
}

TEST_CASE("newsnet on 105 days of news writes 101 networks") {
    Quiet q;
    TempDir t("newsnet");
    auto sim = small_sim(9, 105);
    sim.streams.social_posts_per_day = 3;
    sim.streams.news_posts_per_day = 3;
    auto c = simulated(t.path, sim);
    run_stage(Stage::ingest, c);
    run_stage(Stage::newsnet, c);
    std::size_t graphml = 0, csv = 0;
    for (const auto& e : fs::directory_iterator(c.output_dir / "networks")) {
        graphml += e.path().extension() == ".graphml";
        csv += e.path().extension() == ".csv";
    }
    CHECK(graphml == 101);
    CHECK(csv == 202);  // raw and row-normalized
    CHECK(read_json(c.output_dir / "windows.json")["windows"].size() == 101);
}

TEST_CASE("thread count does not change outputs") {
    Quiet q;
    TempDir t("threads");
    auto c1 = simulated(t.path, small_sim(2));
    auto c4 = c1;
    c1.output_dir = t.path / "j1";
    c4.output_dir = t.path / "j4";
    c4.threads = 4;
    run_pipeline(c1);
    run_pipeline(c4);
    for (const char* f : {"groups.json", "subnodes.json", "graph.json", "communities.json", "agreement.csv",
                          "series/summary.json", "manifest.json"})
        CHECK_MESSAGE(slurp(c1.output_dir / f) == slurp(c4.output_dir / f), f);
}
