#pragma once

#include <string>
#include <vector>

#include "narrnet/corpus.hpp"

namespace fixture {

inline narrnet::RelationTuple tuple(const std::string& a1, const std::string& rel, const std::string& a2,
                                    const std::string& date = "") {
    narrnet::RelationTuple t;
    t.doc_id = "doc";
    t.arg1 = narrnet::text::normalize(a1);
    t.rel = narrnet::text::normalize(rel);
    t.arg2 = narrnet::text::normalize(a2);
    t.arg1_head = narrnet::resolve_head(t.arg1, "");
    t.rel_head = narrnet::resolve_head(t.rel, "");
    t.arg2_head = narrnet::resolve_head(t.arg2, "");
    if (!date.empty()) t.date = narrnet::parse_day(date);
    return t;
}

inline narrnet::Corpus corpus(std::vector<narrnet::RelationTuple> tuples,
                              narrnet::Source source = narrnet::Source::social) {
    for (auto& t : tuples) t.source = source;
    return narrnet::make_corpus(source, std::move(tuples));
}

inline narrnet::SeedEntityList seeds(const std::vector<std::string>& names) {
    std::map<std::string, std::size_t> counts;
    for (const auto& n : names) counts[n] = 1;
    return narrnet::make_seed_list(counts);
}

}  // namespace fixture
