#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "narrnet/common.hpp"

namespace narrnet {

enum class Source { social, news };

std::string to_string(Source source);
std::optional<Source> parse_source(std::string_view text);

// One extracted (arg1, rel, arg2) observation. Phrases are stored normalized;
// heads are single tokens of their phrase.
struct RelationTuple {
    std::string doc_id;
    Source source = Source::social;
    std::optional<Day> date;
    std::string arg1;
    std::string arg1_head;
    std::string rel;
    std::string rel_head;
    std::string arg2;
    std::string arg2_head;

    bool operator==(const RelationTuple&) const = default;
};

using TokenCounts = std::map<std::string, std::size_t>;

struct Corpus {
    Source source = Source::social;
    std::vector<RelationTuple> tuples;
    TokenCounts vocabulary;
    std::optional<Day> t_min;
    std::optional<Day> t_max;
    std::size_t malformed_count = 0;
    std::size_t head_fallback_count = 0;

    bool operator==(const Corpus&) const = default;
};

// Builds a corpus from already-normalized tuples, filling vocabulary and span.
Corpus make_corpus(Source source, std::vector<RelationTuple> tuples);

// Line-delimited JSON, one tuple per line. Blank lines are ignored. Malformed
// records are skipped and counted; if more than half of the non-blank lines are
// malformed the input is rejected as a whole.
Corpus read_tuples(std::istream& in, Source source, const std::string& name = "<stream>");
Corpus load_tuples(const std::filesystem::path& path, Source source);

void write_tuples(std::ostream& out, const Corpus& corpus);
void save_tuples(const std::filesystem::path& path, const Corpus& corpus);

// Token -> occurrence count over every arg1/arg2 phrase.
TokenCounts build_vocabulary(const Corpus& corpus);

// Phrase -> number of arg1/arg2 slots it fills.
std::map<std::string, std::size_t> phrase_frequencies(const Corpus& corpus);

// Resolves the head of a normalized phrase: the supplied head if it is one of
// the phrase's tokens, otherwise the last token.
std::string resolve_head(const std::string& phrase, std::string_view supplied,
                         bool* fell_back = nullptr);

struct EmbeddingTable {
    std::size_t dimension = 0;
    std::map<std::string, std::vector<double>> entries;
    std::size_t duplicate_count = 0;

    const std::vector<double>* find(const std::string& phrase) const;
    std::size_t size() const { return entries.size(); }
};

// Header line "d=<int>" (further tab-separated key=value fields are allowed),
// then "phrase<TAB>v1<TAB>...<TAB>vd" rows.
EmbeddingTable read_embeddings(std::istream& in, const std::string& name = "<stream>");
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void write_embeddings(std::ostream& out, const EmbeddingTable& table);

struct SeedEntityList {
    std::vector<std::string> entities;  // sorted, unique
    std::map<std::string, std::size_t> frequency;

    bool contains(const std::string& entity) const { return frequency.count(entity) > 0; }
    std::size_t size() const { return entities.size(); }
};

SeedEntityList make_seed_list(const std::map<std::string, std::size_t>& counts);
// "entity" or "entity<TAB>count" per line; repeated entities are merged.
SeedEntityList read_seed_list(std::istream& in, const std::string& name = "<stream>");
SeedEntityList load_seed_list(const std::filesystem::path& path);
void write_seed_list(std::ostream& out, const SeedEntityList& seeds);

class AliasMap {
public:
    AliasMap() = default;

    // Throws InputError if the mapping is not idempotent (a canonical name is
    // itself an alias of something else).
    void add(const std::string& alias, const std::string& canonical);
    const std::string& canonical(const std::string& surface) const;
    const std::map<std::string, std::string>& entries() const { return map_; }
    bool empty() const { return map_.empty(); }

private:
    std::map<std::string, std::string> map_;
};

AliasMap read_alias_map(std::istream& in, const std::string& name = "<stream>");
AliasMap load_alias_map(const std::filesystem::path& path);

using StopWords = std::set<std::string>;

StopWords default_stop_words();
StopWords read_word_list(std::istream& in);
StopWords load_word_list(const std::filesystem::path& path);

}  // namespace narrnet
