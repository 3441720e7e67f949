#include "narrnet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace narrnet {

using nlohmann::json;

std::string to_string(Source source) {
    return source == Source::social ? "social" : "news";
}

std::optional<Source> parse_source(std::string_view text) {
    if (text == "social") return Source::social;
    if (text == "news") return Source::news;
    return std::nullopt;
}

std::string resolve_head(const std::string& phrase, std::string_view supplied,
                         bool* fell_back) {
    auto tokens = text::tokenize(phrase);
    if (tokens.empty()) return {};
    auto head = text::normalize(supplied);
    bool ok = !head.empty() && head.find(' ') == std::string::npos &&
              std::find(tokens.begin(), tokens.end(), head) != tokens.end();
    if (fell_back) *fell_back = !ok;
    return ok ? head : tokens.back();
}

TokenCounts build_vocabulary(const Corpus& corpus) {
    TokenCounts counts;
    for (const auto& t : corpus.tuples) {
        for (const auto* phrase : {&t.arg1, &t.arg2})
            for (auto& token : text::tokenize(*phrase)) ++counts[token];
    }
    return counts;
}

std::map<std::string, std::size_t> phrase_frequencies(const Corpus& corpus) {
    std::map<std::string, std::size_t> counts;
    for (const auto& t : corpus.tuples) {
        ++counts[t.arg1];
        ++counts[t.arg2];
    }
    return counts;
}

Corpus make_corpus(Source source, std::vector<RelationTuple> tuples) {
    Corpus corpus;
    corpus.source = source;
    corpus.tuples = std::move(tuples);
    corpus.vocabulary = build_vocabulary(corpus);
    for (const auto& t : corpus.tuples) {
        if (!t.date) continue;
        if (!corpus.t_min || *t.date < *corpus.t_min) corpus.t_min = t.date;
        if (!corpus.t_max || *t.date > *corpus.t_max) corpus.t_max = t.date;
    }
    return corpus;
}

namespace {

std::optional<std::string> string_field(const json& record, const char* key) {
    auto it = record.find(key);
    if (it == record.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

// Returns nullopt for a malformed record.
std::optional<RelationTuple> parse_record(const std::string& line, Source source,
                                          std::size_t& head_fallbacks) {
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!record.is_object()) return std::nullopt;

    RelationTuple t;
    t.source = source;
    auto doc_id = string_field(record, "doc_id");
    if (!doc_id || doc_id->empty()) return std::nullopt;
    t.doc_id = *doc_id;

    if (auto it = record.find("source"); it != record.end() && !it->is_null()) {
        if (!it->is_string()) return std::nullopt;
        auto parsed = parse_source(it->get<std::string>());
        if (!parsed || *parsed != source) return std::nullopt;
    }

    if (auto it = record.find("date"); it != record.end() && !it->is_null()) {
        if (!it->is_string()) return std::nullopt;
        t.date = parse_day(it->get<std::string>());
        if (!t.date) return std::nullopt;
    }
    if (source == Source::news && !t.date) return std::nullopt;

    struct Slot {
        const char* text_key;
        const char* head_key;
        std::string* text;
        std::string* head;
    };
    for (auto slot : {Slot{"arg1", "arg1_head", &t.arg1, &t.arg1_head},
                      Slot{"rel", "rel_head", &t.rel, &t.rel_head},
                      Slot{"arg2", "arg2_head", &t.arg2, &t.arg2_head}}) {
        auto raw = string_field(record, slot.text_key);
        if (!raw) return std::nullopt;
        *slot.text = text::normalize(*raw);
        if (slot.text->empty()) return std::nullopt;
        auto head_it = record.find(slot.head_key);
        std::string supplied;
        if (head_it != record.end() && head_it->is_string()) supplied = head_it->get<std::string>();
        bool fell_back = false;
        *slot.head = resolve_head(*slot.text, supplied, &fell_back);
        // A missing head is the documented fallback; a wrong one is worth counting.
        if (fell_back && !supplied.empty()) ++head_fallbacks;
    }
    return t;
}

}  // namespace

Corpus read_tuples(std::istream& in, Source source, const std::string& name) {
    std::vector<RelationTuple> tuples;
    std::size_t malformed = 0;
    std::size_t records = 0;
    std::size_t head_fallbacks = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++records;
        auto parsed = parse_record(line, source, head_fallbacks);
        if (!parsed) {
            ++malformed;
            log::info(fmt::format("{}:{}: malformed tuple record skipped", name, line_no));
            continue;
        }
        tuples.push_back(std::move(*parsed));
    }
    if (in.bad()) throw InputError(fmt::format("{}: read error", name));
    if (records > 0 && malformed * 2 > records)
        throw InputError(fmt::format("{}: {} of {} records malformed; wrong file?", name,
                                     malformed, records));
    if (malformed > 0)
        log::warn(fmt::format("{}: skipped {} malformed record(s)", name, malformed));
    if (head_fallbacks > 0)
        log::warn(fmt::format("{}: {} head(s) not found in their phrase, used last token",
                              name, head_fallbacks));

    Corpus corpus = make_corpus(source, std::move(tuples));
    corpus.malformed_count = malformed;
    corpus.head_fallback_count = head_fallbacks;
    return corpus;
}

Corpus load_tuples(const std::filesystem::path& path, Source source) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open tuple file {}", path.string()));
    return read_tuples(in, source, path.string());
}

void write_tuples(std::ostream& out, const Corpus& corpus) {
    for (const auto& t : corpus.tuples) {
        json record = json::object();
        record["doc_id"] = t.doc_id;
        record["source"] = to_string(t.source);
        record["date"] = t.date ? json(format_day(*t.date)) : json(nullptr);
        record["arg1"] = t.arg1;
        record["arg1_head"] = t.arg1_head;
        record["rel"] = t.rel;
        record["rel_head"] = t.rel_head;
        record["arg2"] = t.arg2;
        record["arg2_head"] = t.arg2_head;
        out << record.dump() << '\n';
    }
}

void save_tuples(const std::filesystem::path& path, const Corpus& corpus) {
    std::ofstream out(path);
    if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
    write_tuples(out, corpus);
}

const std::vector<double>* EmbeddingTable::find(const std::string& phrase) const {
    auto it = entries.find(phrase);
    return it == entries.end() ? nullptr : &it->second;
}

EmbeddingTable read_embeddings(std::istream& in, const std::string& name) {
    EmbeddingTable table;
    std::string line;
    if (!std::getline(in, line))
        throw InputError(fmt::format("{}: missing \"d=<int>\" header", name));
    {
        auto first = line.substr(0, line.find('\t'));
        if (!first.empty() && first.back() == '\r') first.pop_back();
        long long d = 0;
        if (first.rfind("d=", 0) != 0 || (d = std::atoll(first.c_str() + 2)) <= 0 ||
            std::to_string(d) != first.substr(2))
            throw InputError(fmt::format("{}:1: bad header, expected \"d=<int>\"", name));
        table.dimension = static_cast<std::size_t>(d);
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, '\t')) fields.push_back(field);
        if (fields.size() != table.dimension + 1)
            throw InputError(fmt::format("{}:{}: expected {} values, found {}", name, line_no,
                                         table.dimension,
                                         fields.empty() ? 0 : fields.size() - 1));
        auto phrase = text::normalize(fields[0]);
        if (phrase.empty())
            throw InputError(fmt::format("{}:{}: empty phrase", name, line_no));
        std::vector<double> vec(table.dimension);
        for (std::size_t i = 0; i < table.dimension; ++i) {
            const auto& f = fields[i + 1];
            char* end = nullptr;
            double v = std::strtod(f.c_str(), &end);
            if (f.empty() || end != f.c_str() + f.size())
                throw InputError(fmt::format("{}:{}: value {} is not a number", name, line_no, i + 1));
            if (!std::isfinite(v))
                throw InputError(fmt::format("{}:{}: non-finite value {}", name, line_no, i + 1));
            vec[i] = v;
        }
        if (table.entries.count(phrase)) {
            ++table.duplicate_count;
            log::warn(fmt::format("{}:{}: duplicate phrase \"{}\", last row wins", name, line_no,
                                  phrase));
        }
        table.entries[phrase] = std::move(vec);
    }
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open embedding file {}", path.string()));
    return read_embeddings(in, path.string());
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
    out << "d=" << table.dimension << '\n';
    for (const auto& [phrase, vec] : table.entries) {
        out << phrase;
        for (double v : vec) out << '\t' << fmt::format("{:.17g}", v);
        out << '\n';
    }
}

SeedEntityList make_seed_list(const std::map<std::string, std::size_t>& counts) {
    SeedEntityList seeds;
    for (const auto& [entity, count] : counts) {
        if (entity.empty()) continue;
        seeds.entities.push_back(entity);
        seeds.frequency[entity] = std::max<std::size_t>(count, 1);
    }
    return seeds;
}

SeedEntityList read_seed_list(std::istream& in, const std::string& name) {
    std::map<std::string, std::size_t> counts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tab = line.find('\t');
        auto entity = text::normalize(line.substr(0, tab));
        if (entity.empty()) continue;
        std::size_t count = 1;
        if (tab != std::string::npos) {
            auto field = line.substr(tab + 1);
            char* end = nullptr;
            long long v = std::strtoll(field.c_str(), &end, 10);
            if (field.empty() || end != field.c_str() + field.size() || v < 1)
                throw InputError(fmt::format("{}:{}: frequency must be a positive integer", name,
                                             line_no));
            count = static_cast<std::size_t>(v);
        }
        if (counts.count(entity))
            log::warn(fmt::format("{}:{}: repeated seed \"{}\" merged", name, line_no, entity));
        counts[entity] += count;
    }
    return make_seed_list(counts);
}

SeedEntityList load_seed_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open seed list {}", path.string()));
    return read_seed_list(in, path.string());
}

void write_seed_list(std::ostream& out, const SeedEntityList& seeds) {
    for (const auto& e : seeds.entities) out << e << '\t' << seeds.frequency.at(e) << '\n';
}

void AliasMap::add(const std::string& alias, const std::string& canonical) {
    if (alias.empty() || canonical.empty()) throw InputError("empty alias entry");
    if (auto it = map_.find(canonical); it != map_.end() && it->second != canonical)
        throw InputError(fmt::format("alias chain: canonical \"{}\" is an alias of \"{}\"",
                                     canonical, it->second));
    if (auto it = map_.find(alias); it != map_.end() && it->second != canonical)
        throw InputError(fmt::format("alias \"{}\" maps to both \"{}\" and \"{}\"", alias,
                                     it->second, canonical));
    for (const auto& [a, c] : map_)
        if (c == alias && a != alias)
            throw InputError(fmt::format("alias chain: \"{}\" is canonical for \"{}\"", alias, a));
    map_[alias] = canonical;
    map_[canonical] = canonical;
}

const std::string& AliasMap::canonical(const std::string& surface) const {
    auto it = map_.find(surface);
    return it == map_.end() ? surface : it->second;
}

AliasMap read_alias_map(std::istream& in, const std::string& name) {
    AliasMap aliases;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw InputError(fmt::format("{}:{}: expected alias<TAB>canonical", name, line_no));
        auto alias = text::normalize(line.substr(0, tab));
        auto canonical = text::normalize(line.substr(tab + 1));
        try {
            aliases.add(alias, canonical);
        } catch (const InputError& e) {
            throw InputError(fmt::format("{}:{}: {}", name, line_no, e.what()));
        }
    }
    return aliases;
}

AliasMap load_alias_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open alias map {}", path.string()));
    return read_alias_map(in, path.string());
}

StopWords default_stop_words() {
    static const char* const kWords[] = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any",
        "are", "as", "at", "be", "because", "been", "before", "being", "below", "between",
        "both", "but", "by", "can", "could", "did", "do", "does", "doing", "down", "during",
        "each", "few", "for", "from", "further", "get", "got", "had", "has", "have", "having",
        "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "i", "if",
        "in", "into", "is", "it", "its", "itself", "just", "let", "me", "more", "most", "my",
        "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "only", "or",
        "other", "our", "ours", "ourselves", "out", "over", "own", "same", "say", "said",
        "says", "she", "should", "so", "some", "such", "than", "that", "the", "their",
        "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those",
        "through", "to", "too", "under", "until", "up", "very", "was", "we", "were", "what",
        "when", "where", "which", "while", "who", "whom", "why", "will", "with", "would",
        "you", "your", "yours", "yourself", "yourselves"};
    return StopWords(std::begin(kWords), std::end(kWords));
}

StopWords read_word_list(std::istream& in) {
    StopWords words;
    std::string line;
    while (std::getline(in, line)) {
        auto word = text::normalize(line);
        if (!word.empty()) words.insert(word);
    }
    return words;
}

StopWords load_word_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open word list {}", path.string()));
    return read_word_list(in);
}

}  // namespace narrnet
