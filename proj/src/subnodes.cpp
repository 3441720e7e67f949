#include "narrnet/subnodes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "narrnet/parallel.hpp"

namespace narrnet {

using nlohmann::json;

std::size_t default_k(std::size_t n_phrases) {
    auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_phrases) / 2.0)));
    return std::max<std::size_t>(1, k);
}

std::size_t choose_k(const ClusterOptions& options, int group_id, std::size_t n_phrases) {
    if (auto it = options.k_per_group.find(group_id); it != options.k_per_group.end())
        return it->second;
    if (options.k_all) return *options.k_all;
    return default_k(n_phrases);
}

std::optional<Vector> phrase_vector(const std::string& phrase, const EmbeddingTable& emb) {
    if (const auto* v = emb.find(phrase)) return *v;
    Vector sum(emb.dimension, 0.0);
    std::size_t found = 0;
    for (const auto& token : text::tokenize(phrase)) {
        if (const auto* v = emb.find(token)) {
            for (std::size_t d = 0; d < emb.dimension; ++d) sum[d] += (*v)[d];
            ++found;
        }
    }
    if (found == 0) return std::nullopt;
    for (auto& v : sum) v /= static_cast<double>(found);
    return sum;
}

namespace {

std::string head_token(const std::string& phrase) {
    auto pos = phrase.rfind(' ');
    return pos == std::string::npos ? phrase : phrase.substr(pos + 1);
}

}  // namespace

std::vector<Subnode> kmeans_cluster(const ContextualGroup& group, const EmbeddingTable& emb,
                                    std::size_t k, std::uint64_t seed, Distance distance,
                                    KMeansResult* diagnostics) {
    if (group.member_phrases.empty()) return {};
    if (k == 0) throw ConfigError("k must be >= 1");
    if (k > group.member_phrases.size()) {
        log::warn(fmt::format("group {}: k={} exceeds {} phrases, clamped", group.id, k,
                              group.member_phrases.size()));
        k = group.member_phrases.size();
    }

    std::vector<std::string> embedded;
    std::vector<std::string> missing;
    std::vector<Vector> points;
    for (const auto& phrase : group.member_phrases) {
        if (auto v = phrase_vector(phrase, emb)) {
            embedded.push_back(phrase);
            points.push_back(std::move(*v));
        } else {
            missing.push_back(phrase);
        }
    }

    std::vector<Subnode> clusters;
    if (points.empty()) {
        Subnode s;
        s.group_id = group.id;
        s.member_phrases = group.member_phrases;
        s.centroid.assign(emb.dimension, 0.0);
        clusters.push_back(std::move(s));
        return clusters;
    }

    KMeansOptions opts;
    opts.k = std::min(k, points.size());
    opts.seed = seed;
    opts.distance = distance;
    auto result = kmeans(points, opts);

    clusters.resize(result.centroids.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        clusters[c].group_id = group.id;
        clusters[c].centroid = result.centroids[c];
    }
    for (std::size_t i = 0; i < embedded.size(); ++i)
        clusters[result.assignment[i]].member_phrases.insert(embedded[i]);
    if (diagnostics) *diagnostics = std::move(result);
    std::erase_if(clusters, [](const Subnode& s) { return s.member_phrases.empty(); });

    for (const auto& phrase : missing) {
        auto head = head_token(phrase);
        std::size_t best = 0;
        std::size_t best_shared = 0;
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            std::size_t shared = 0;
            for (const auto& m : clusters[c].member_phrases)
                if (head_token(m) == head) ++shared;
            if (shared > best_shared) {
                best_shared = shared;
                best = c;
            }
        }
        if (best_shared == 0) {
            for (std::size_t c = 0; c < clusters.size(); ++c)
                if (clusters[c].member_phrases.size() > clusters[best].member_phrases.size())
                    best = c;
        }
        clusters[best].member_phrases.insert(phrase);
    }

    std::sort(clusters.begin(), clusters.end(), [](const Subnode& a, const Subnode& b) {
        return *a.member_phrases.begin() < *b.member_phrases.begin();
    });
    for (std::size_t c = 0; c < clusters.size(); ++c) clusters[c].id = static_cast<int>(c);
    return clusters;
}

std::vector<Subnode> cluster_groups(const std::vector<ContextualGroup>& groups,
                                    const EmbeddingTable& emb, const ClusterOptions& options) {
    std::vector<std::vector<Subnode>> per_group(groups.size());
    parallel_for(groups.size(), options.threads, [&](std::size_t g) {
        const auto& group = groups[g];
        if (group.member_phrases.empty()) return;
        auto k = choose_k(options, group.id, group.member_phrases.size());
        auto seed = derive_seed(options.seed, "kmeans", static_cast<std::uint64_t>(g));
        per_group[g] = kmeans_cluster(group, emb, k, seed, options.distance);
    });

    std::vector<Subnode> all;
    for (auto& list : per_group)
        for (auto& s : list) {
            s.id = static_cast<int>(all.size());
            all.push_back(std::move(s));
        }
    return all;
}

void label_tfidf(std::vector<Subnode>& subnodes, const Corpus& corpus,
                 const StopWords& stop_words, std::size_t top) {
    auto freq = phrase_frequencies(corpus);
    const std::size_t n_sub = subnodes.size();

    std::vector<std::map<std::string, double>> tf(n_sub);
    std::map<std::string, std::size_t> df;
    for (std::size_t s = 0; s < n_sub; ++s) {
        std::map<std::string, double> all_words;
        for (const auto& phrase : subnodes[s].member_phrases) {
            auto it = freq.find(phrase);
            double occurrences = it == freq.end() ? 0.0 : static_cast<double>(it->second);
            for (const auto& token : text::tokenize(phrase)) {
                all_words[token] += occurrences;
                if (!stop_words.count(token)) tf[s][token] += occurrences;
            }
        }
        if (tf[s].empty()) tf[s] = std::move(all_words);
        for (const auto& [word, _] : tf[s]) ++df[word];
    }

    for (std::size_t s = 0; s < n_sub; ++s) {
        struct Scored {
            std::string word;
            double score;
            double tf;
        };
        std::vector<Scored> scored;
        for (const auto& [word, count] : tf[s]) {
            double idf = std::log(static_cast<double>(n_sub) / (1.0 + static_cast<double>(df[word])));
            scored.push_back({word, count * idf, count});
        }
        // With a single sub-node idf is one negative constant for every word,
        // which would invert the ranking; rank by frequency instead.
        const bool degenerate = n_sub == 1;
        std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
            double ka = degenerate ? a.tf : a.score;
            double kb = degenerate ? b.tf : b.score;
            if (ka != kb) return ka > kb;
            return a.word < b.word;
        });
        subnodes[s].label.clear();
        for (std::size_t i = 0; i < scored.size() && i < top; ++i)
            subnodes[s].label.push_back(scored[i].word);
    }
}

double ner_score(const Subnode& subnode, const SeedEntityList& seeds,
                 const std::map<std::string, std::size_t>& phrase_freq) {
    double score = 0.0;
    for (const auto& phrase : subnode.member_phrases) {
        if (seeds_in_phrase(phrase, seeds).empty()) continue;
        if (auto it = phrase_freq.find(phrase); it != phrase_freq.end())
            score += static_cast<double>(it->second);
    }
    return score;
}

PhraseSubnodes phrase_to_subnodes(const std::vector<Subnode>& subnodes) {
    PhraseSubnodes out;
    for (const auto& s : subnodes)
        for (const auto& p : s.member_phrases) out[p].insert(s.id);
    return out;
}

json subnodes_to_json(const std::vector<Subnode>& subnodes) {
    json out = json::array();
    for (const auto& s : subnodes) {
        out.push_back({{"id", s.id},
                       {"group", s.group_id},
                       {"label", s.label},
                       {"ner_score", s.ner_score},
                       {"member_count", s.member_phrases.size()},
                       {"members", s.member_phrases},
                       {"centroid", s.centroid}});
    }
    return out;
}

std::vector<Subnode> subnodes_from_json(const json& j) {
    std::vector<Subnode> out;
    for (const auto& item : j) {
        Subnode s;
        s.id = item.at("id").get<int>();
        s.group_id = item.at("group").get<int>();
        s.label = item.at("label").get<std::vector<std::string>>();
        s.ner_score = item.at("ner_score").get<double>();
        s.member_phrases = item.at("members").get<std::set<std::string>>();
        s.centroid = item.at("centroid").get<Vector>();
        out.push_back(std::move(s));
    }
    return out;
}

void write_subnodes_csv(std::ostream& out, const std::vector<Subnode>& subnodes) {
    out << "id,group,label,ner_score,member_count\n";
    for (const auto& s : subnodes)
        out << s.id << ',' << s.group_id << ",\"" << s.label_text() << "\","
            << fmt::format("{}", s.ner_score) << ',' << s.member_phrases.size() << '\n';
}

}  // namespace narrnet
