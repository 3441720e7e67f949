#include "narrnet/news.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "narrnet/graph.hpp"

namespace narrnet {

std::vector<WindowSegment> make_windows(Day t0, Day t1, std::size_t width, std::size_t shift) {
    if (t1 < t0) throw ConfigError("window span: end precedes start");
    if (width < 1 || shift < 1) throw ConfigError("window width and shift must be >= 1");
    const auto span = static_cast<std::size_t>((t1 - t0).count()) + 1;
    std::vector<WindowSegment> windows;
    if (span < width) {
        log::warn(fmt::format("span of {} day(s) is shorter than the {}-day window", span, width));
        return windows;
    }
    const std::size_t count = (span - width) / shift + 1;
    for (std::size_t i = 0; i < count; ++i) {
        WindowSegment w;
        w.index = i;
        w.start = t0 + std::chrono::days{static_cast<int>(i * shift)};
        w.end = w.start + std::chrono::days{static_cast<int>(width)};
        windows.push_back(std::move(w));
    }
    return windows;
}

void assign_tuples(std::vector<WindowSegment>& windows, const Corpus& news) {
    for (auto& w : windows) w.tuples.clear();
    for (std::size_t t = 0; t < news.tuples.size(); ++t) {
        const auto& date = news.tuples[t].date;
        if (!date) continue;
        for (auto& w : windows)
            if (*date >= w.start && *date < w.end) w.tuples.push_back(t);
    }
}

EntityVocabulary entity_vocabulary(const TokenCounts& social_vocabulary, const AliasMap& aliases,
                                   const StopWords& stop_words) {
    EntityVocabulary vocab;
    for (const auto& [token, count] : social_vocabulary) {
        if (stop_words.count(token)) continue;
        vocab[aliases.canonical(token)] += count;
    }
    return vocab;
}

TfidfMatrix window_tfidf(const std::vector<WindowSegment>& windows, const Corpus& news,
                         const EntityVocabulary& vocabulary, const AliasMap& aliases) {
    TfidfMatrix m;
    std::map<std::string, std::size_t> column;
    for (const auto& [entity, _] : vocabulary) {
        column[entity] = m.entities.size();
        m.entities.push_back(entity);
    }
    const std::size_t s = windows.size();
    const std::size_t v = m.entities.size();
    m.tf.assign(s, std::vector<double>(v, 0.0));
    m.score.assign(s, std::vector<double>(v, 0.0));
    for (std::size_t i = 0; i < s; ++i) {
        for (auto t : windows[i].tuples) {
            const auto& tuple = news.tuples[t];
            for (const auto* head : {&tuple.arg1_head, &tuple.arg2_head})
                if (auto it = column.find(aliases.canonical(*head)); it != column.end())
                    m.tf[i][it->second] += 1.0;
        }
    }
    for (std::size_t c = 0; c < v; ++c) {
        std::size_t df = 0;
        for (std::size_t i = 0; i < s; ++i)
            if (m.tf[i][c] > 0.0) ++df;
        double idf = std::log(static_cast<double>(s) / (1.0 + static_cast<double>(df)));
        for (std::size_t i = 0; i < s; ++i) m.score[i][c] = m.tf[i][c] * idf;
    }
    return m;
}

std::vector<std::string> select_entities(std::size_t window, const TfidfMatrix& matrix,
                                         const EntityVocabulary& global_freq,
                                         const AliasMap& aliases,
                                         const SelectionOptions& options) {
    auto freq = [&](const std::string& e) {
        auto it = global_freq.find(e);
        return it == global_freq.end() ? std::size_t{0} : it->second;
    };
    std::vector<std::size_t> present;
    const auto& tf = matrix.tf.at(window);
    const auto& score = matrix.score.at(window);
    for (std::size_t c = 0; c < matrix.entities.size(); ++c)
        if (tf[c] > 0.0) present.push_back(c);
    std::sort(present.begin(), present.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        auto fa = freq(matrix.entities[a]);
        auto fb = freq(matrix.entities[b]);
        if (fa != fb) return fa > fb;
        return matrix.entities[a] < matrix.entities[b];
    });

    std::vector<std::pair<std::string, std::size_t>> by_freq(global_freq.begin(), global_freq.end());
    std::stable_sort(by_freq.begin(), by_freq.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    std::set<std::string> selected;
    for (std::size_t i = 0; i < present.size() && i < options.top_tfidf; ++i)
        selected.insert(aliases.canonical(matrix.entities[present[i]]));
    for (std::size_t i = 0; i < by_freq.size() && i < options.top_freq; ++i)
        selected.insert(aliases.canonical(by_freq[i].first));
    return {selected.begin(), selected.end()};
}

std::optional<std::size_t> CooccurrenceNetwork::index_of(const std::string& entity) const {
    auto it = std::lower_bound(entities.begin(), entities.end(), entity);
    if (it == entities.end() || *it != entity) return std::nullopt;
    return static_cast<std::size_t>(it - entities.begin());
}

std::set<std::string> CooccurrenceNetwork::neighbors(const std::string& entity) const {
    std::set<std::string> out;
    if (auto i = index_of(entity))
        for (std::size_t j = 0; j < entities.size(); ++j)
            if (counts[*i][j] > 0) out.insert(entities[j]);
    return out;
}

CooccurrenceNetwork cooccur_network(std::span<const RelationTuple* const> tuples,
                                    const std::vector<std::string>& entities,
                                    const StopWords& stop_words, const AliasMap& aliases) {
    CooccurrenceNetwork net;
    net.entities = entities;
    std::sort(net.entities.begin(), net.entities.end());
    net.entities.erase(std::unique(net.entities.begin(), net.entities.end()), net.entities.end());
    const std::size_t n = net.entities.size();
    net.counts.assign(n, std::vector<std::size_t>(n, 0));

    for (const auto* t : tuples) {
        auto s = net.index_of(aliases.canonical(t->arg1_head));
        auto o = net.index_of(aliases.canonical(t->arg2_head));
        if (!s || !o || *s == *o || stop_words.count(t->rel_head)) continue;
        ++net.counts[*s][*o];
        ++net.counts[*o][*s];
    }

    net.normalized.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t row = 0;
        for (auto c : net.counts[i]) row += c;
        if (row == 0) continue;
        for (std::size_t j = 0; j < n; ++j)
            net.normalized[i][j] = static_cast<double>(net.counts[i][j]) / static_cast<double>(row);
    }
    return net;
}

namespace {
std::size_t shared_neighbors(const CooccurrenceNetwork& network, const std::string& a1,
                             const std::string& a2) {
    auto n1 = network.neighbors(a1);
    auto n2 = network.neighbors(a2);
    std::size_t shared = 0;
    for (const auto& x : n1) shared += n2.count(x);
    return shared;
}
}  // namespace

std::size_t common_neighbors(const CooccurrenceNetwork& network, const std::string& a1,
                             const std::string& a2) {
    for (const auto* a : {&a1, &a2})
        if (!network.index_of(*a)) {
            log::warn(fmt::format("window {}: entity \"{}\" not in network", network.window, *a));
            return 0;
        }
    return shared_neighbors(network, a1, a2);
}

TimeSeries attachment_series(const std::vector<WindowSegment>& windows,
                             const std::vector<CooccurrenceNetwork>& networks,
                             const std::string& a1, const std::string& a2) {
    TimeSeries series;
    std::size_t unknown = 0;
    for (std::size_t i = 0; i < windows.size() && i < networks.size(); ++i) {
        if (!networks[i].index_of(a1) || !networks[i].index_of(a2)) ++unknown;
        series.push_back(windows[i].start,
                         static_cast<double>(shared_neighbors(networks[i], a1, a2)));
    }
    if (unknown > 0)
        log::warn(fmt::format("\"{}\"/\"{}\" missing from {} of {} window network(s); counted as 0",
                              a1, a2, unknown, windows.size()));
    return series;
}

void write_network_graphml(std::ostream& out, const CooccurrenceNetwork& network) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <key id=\"weight_norm\" for=\"edge\" attr.name=\"weight_norm\" attr.type=\"double\"/>\n"
        << "  <graph id=\"window" << network.window << "\" edgedefault=\"undirected\">\n";
    const auto n = network.entities.size();
    for (std::size_t i = 0; i < n; ++i)
        out << "    <node id=\"e" << i << "\"><data key=\"label\">"
            << xml_escape(network.entities[i]) << "</data></node>\n";
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (network.counts[i][j] == 0) continue;
            out << "    <edge source=\"e" << i << "\" target=\"e" << j << "\">"
                << "<data key=\"weight\">" << network.counts[i][j] << "</data>"
                << "<data key=\"weight_norm\">" << fmt::format("{}", network.normalized[i][j])
                << "</data></edge>\n";
        }
    out << "  </graph>\n</graphml>\n";
}

namespace {
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}
}  // namespace

void write_network_csv(std::ostream& out, const CooccurrenceNetwork& network, bool normalized) {
    const auto n = network.entities.size();
    out << "entity";
    for (const auto& e : network.entities) out << ',' << csv_field(e);
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out << csv_field(network.entities[i]);
        for (std::size_t j = 0; j < n; ++j) {
            out << ',';
            if (normalized)
                out << fmt::format("{}", network.normalized[i][j]);
            else
                out << network.counts[i][j];
        }
        out << '\n';
    }
}

}  // namespace narrnet
