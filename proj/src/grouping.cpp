#include "narrnet/grouping.hpp"

#include <algorithm>
#include <numeric>

namespace narrnet {

using nlohmann::json;

std::vector<std::string> seeds_in_phrase(const std::string& phrase, const SeedEntityList& seeds) {
    auto tokens = text::tokenize(phrase);
    std::vector<std::string> found;
    for (const auto& token : tokens)
        if (seeds.contains(token)) found.push_back(token);
    for (const auto& seed : seeds.entities) {
        if (seed.find(' ') != std::string::npos &&
            text::contains_sequence(tokens, text::tokenize(seed)))
            found.push_back(seed);
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

SeedPairCounts seed_cooccurrence(const Corpus& corpus, const SeedEntityList& seeds) {
    // Each distinct phrase is scanned once, then weighted by its occurrences.
    SeedPairCounts counts;
    for (const auto& [phrase, freq] : phrase_frequencies(corpus)) {
        auto found = seeds_in_phrase(phrase, seeds);
        for (std::size_t i = 0; i < found.size(); ++i)
            for (std::size_t j = i + 1; j < found.size(); ++j)
                counts[{found[i], found[j]}] += freq;
    }
    return counts;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

std::vector<ContextualGroup> form_groups(const SeedEntityList& seeds,
                                         const SeedPairCounts& pair_counts,
                                         std::size_t min_cooc) {
    if (min_cooc < 1) throw ConfigError("min_cooc must be >= 1");
    const auto& names = seeds.entities;
    auto index_of = [&](const std::string& s) -> std::optional<std::size_t> {
        auto it = std::lower_bound(names.begin(), names.end(), s);
        if (it == names.end() || *it != s) return std::nullopt;
        return static_cast<std::size_t>(it - names.begin());
    };

    UnionFind uf(names.size());
    for (const auto& [pair, count] : pair_counts) {
        if (count < min_cooc) continue;
        auto a = index_of(pair.first);
        auto b = index_of(pair.second);
        if (a && b) uf.unite(*a, *b);
    }

    // Roots are the smallest index in their component, and names are sorted,
    // so walking indices in order yields groups ordered by smallest seed.
    std::vector<ContextualGroup> groups;
    std::map<std::size_t, std::size_t> root_to_group;
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto root = uf.find(i);
        auto [it, inserted] = root_to_group.try_emplace(root, groups.size());
        if (inserted) {
            ContextualGroup g;
            g.id = static_cast<int>(groups.size());
            groups.push_back(std::move(g));
        }
        groups[it->second].seeds.insert(names[i]);
    }
    return groups;
}

PhraseGroups assign_phrases(const Corpus& corpus, const SeedEntityList& seeds,
                            std::vector<ContextualGroup>& groups) {
    std::erase_if(groups, [](const ContextualGroup& g) { return g.id == kResidualGroup; });
    std::map<std::string, int> seed_to_group;
    for (auto& g : groups) {
        g.member_phrases.clear();
        g.frequency = 0;
        for (const auto& s : g.seeds) seed_to_group[s] = g.id;
    }
    std::map<int, ContextualGroup*> by_id;
    for (auto& g : groups) by_id[g.id] = &g;

    ContextualGroup residual;
    residual.id = kResidualGroup;

    PhraseGroups assignment;
    for (const auto& [phrase, freq] : phrase_frequencies(corpus)) {
        std::set<int> ids;
        for (const auto& seed : seeds_in_phrase(phrase, seeds)) {
            if (auto it = seed_to_group.find(seed); it != seed_to_group.end())
                ids.insert(it->second);
        }
        if (ids.empty()) ids.insert(kResidualGroup);
        for (int id : ids) {
            ContextualGroup& g = id == kResidualGroup ? residual : *by_id.at(id);
            g.member_phrases.insert(phrase);
            g.frequency += freq;
        }
        assignment.emplace(phrase, std::move(ids));
    }
    if (!residual.member_phrases.empty()) groups.push_back(std::move(residual));
    return assignment;
}

json groups_to_json(const std::vector<ContextualGroup>& groups) {
    json out = json::array();
    for (const auto& g : groups) {
        out.push_back({{"id", g.id},
                       {"seeds", g.seeds},
                       {"members", g.member_phrases},
                       {"frequency", g.frequency}});
    }
    return out;
}

std::vector<ContextualGroup> groups_from_json(const json& j) {
    std::vector<ContextualGroup> groups;
    for (const auto& item : j) {
        ContextualGroup g;
        g.id = item.at("id").get<int>();
        g.seeds = item.at("seeds").get<std::set<std::string>>();
        g.member_phrases = item.at("members").get<std::set<std::string>>();
        g.frequency = item.at("frequency").get<std::size_t>();
        groups.push_back(std::move(g));
    }
    return groups;
}

}  // namespace narrnet
