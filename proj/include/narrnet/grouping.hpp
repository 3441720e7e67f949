#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "narrnet/corpus.hpp"

namespace narrnet {

inline constexpr int kResidualGroup = -1;

// An NER-seeded macro-context of noun phrases. The residual group (id -1)
// collects phrases that contain no seed at all.
struct ContextualGroup {
    int id = 0;
    std::set<std::string> seeds;
    std::set<std::string> member_phrases;
    std::size_t frequency = 0;

    bool operator==(const ContextualGroup&) const = default;
};

// Unordered seed pair, stored with first < second.
using SeedPair = std::pair<std::string, std::string>;
using SeedPairCounts = std::map<SeedPair, std::size_t>;

// Seeds (single or multi-token) occurring in a normalized phrase, sorted.
std::vector<std::string> seeds_in_phrase(const std::string& phrase, const SeedEntityList& seeds);

// Counts, for every unordered pair of distinct seeds, the arg phrase
// occurrences that contain both.
SeedPairCounts seed_cooccurrence(const Corpus& corpus, const SeedEntityList& seeds);

// Connected components of the seed graph keeping only pairs with
// count >= min_cooc. Every seed lands in exactly one group; ids are assigned
// in order of each group's lexicographically smallest seed.
std::vector<ContextualGroup> form_groups(const SeedEntityList& seeds,
                                         const SeedPairCounts& pair_counts,
                                         std::size_t min_cooc);

using PhraseGroups = std::map<std::string, std::set<int>>;

// Maps each distinct arg phrase to every group with a seed inside it, or to
// the residual group. Fills member_phrases and frequency of `groups` and
// appends the residual group when it is non-empty.
PhraseGroups assign_phrases(const Corpus& corpus, const SeedEntityList& seeds,
                            std::vector<ContextualGroup>& groups);

nlohmann::json groups_to_json(const std::vector<ContextualGroup>& groups);
std::vector<ContextualGroup> groups_from_json(const nlohmann::json& j);

}  // namespace narrnet
