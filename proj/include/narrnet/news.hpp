#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "narrnet/corpus.hpp"
#include "narrnet/series.hpp"

namespace narrnet {

// A sliding window [start, end) over the dated news corpus.
struct WindowSegment {
    std::size_t index = 0;
    Day start;
    Day end;                               // exclusive, start + width
    std::vector<std::size_t> tuples;       // indices into the news corpus
    std::vector<std::string> entities;     // selected entities, sorted
};

// Windows of `width` days starting at t0, t0 + shift, ... while the window
// still ends on or before t1 (both inclusive). That is
// floor((days(t0, t1) - width) / shift) + 1 windows, or none when the span is
// shorter than one window.
std::vector<WindowSegment> make_windows(Day t0, Day t1, std::size_t width = 5,
                                        std::size_t shift = 1);

// Fills each window's member tuples (dated within [start, end)).
void assign_tuples(std::vector<WindowSegment>& windows, const Corpus& news);

// Canonical entity -> frequency. Built from the social-media vocabulary with
// stop words removed and aliases folded into their canonical name.
using EntityVocabulary = std::map<std::string, std::size_t>;
EntityVocabulary entity_vocabulary(const TokenCounts& social_vocabulary, const AliasMap& aliases,
                                   const StopWords& stop_words);

// s x v TF-IDF over windows. tf counts canonical arg heads in the window's
// tuples; idf = log(s / (1 + number of windows where the entity occurs)).
struct TfidfMatrix {
    std::vector<std::string> entities;           // columns, sorted
    std::vector<std::vector<double>> tf;         // rows x columns
    std::vector<std::vector<double>> score;      // rows x columns
};

TfidfMatrix window_tfidf(const std::vector<WindowSegment>& windows, const Corpus& news,
                         const EntityVocabulary& vocabulary, const AliasMap& aliases);

struct SelectionOptions {
    std::size_t top_tfidf = 25;
    std::size_t top_freq = 100;
};

// Top TF-IDF entities of row `window` (among those occurring in it; ties by
// global frequency, then lexicographic) united with the globally most
// frequent entities. Returned sorted and canonical.
std::vector<std::string> select_entities(std::size_t window, const TfidfMatrix& matrix,
                                         const EntityVocabulary& global_freq,
                                         const AliasMap& aliases,
                                         const SelectionOptions& options = {});

// Symmetric co-occurrence counts of entity heads, plus the row-normalized
// copy. Row/column i corresponds to entities[i].
struct CooccurrenceNetwork {
    std::size_t window = 0;
    std::vector<std::string> entities;
    std::vector<std::vector<std::size_t>> counts;
    std::vector<std::vector<double>> normalized;

    std::optional<std::size_t> index_of(const std::string& entity) const;
    std::set<std::string> neighbors(const std::string& entity) const;
};

// For each tuple, s = H(arg1), o = H(arg2), r = H(rel) (s and o alias
// canonicalized): when s and o are both entities, s != o and r is not a stop
// word, counts[s][o] and counts[o][s] each gain one.
CooccurrenceNetwork cooccur_network(std::span<const RelationTuple* const> tuples,
                                    const std::vector<std::string>& entities,
                                    const StopWords& stop_words, const AliasMap& aliases = {});

// |N(a1) ∩ N(a2)| where N(x) are entities with a positive count against x.
// Unknown entities give 0 and a warning.
std::size_t common_neighbors(const CooccurrenceNetwork& network, const std::string& a1,
                             const std::string& a2);

TimeSeries attachment_series(const std::vector<WindowSegment>& windows,
                             const std::vector<CooccurrenceNetwork>& networks,
                             const std::string& a1, const std::string& a2);

void write_network_graphml(std::ostream& out, const CooccurrenceNetwork& network);
// Matrix CSV: header row of entities, then one row per entity. `normalized`
// selects the row-normalized matrix.
void write_network_csv(std::ostream& out, const CooccurrenceNetwork& network,
                       bool normalized = false);

}  // namespace narrnet
