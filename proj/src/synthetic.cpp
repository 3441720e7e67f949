#include "narrnet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace narrnet {

using nlohmann::json;

namespace {

std::string padded(const char* stem, std::size_t i, std::size_t count) {
    std::size_t width = std::max<std::size_t>(2, std::to_string(count ? count - 1 : 0).size());
    return fmt::format("{}{:0{}d}", stem, i, width);
}

std::vector<double> exponential_weights(std::size_t r, Rng& rng) {
    std::vector<double> w(r);
    double total = 0.0;
    for (auto& v : w) {
        double u;
        do {
            u = rng.uniform();
        } while (u <= 0.0);
        v = -std::log(u);
        total += v;
    }
    for (auto& v : w) v /= total;
    return w;
}

// Centres at mutual distance >= spacing: scaled basis vectors when the
// dimension allows, otherwise rejection sampling in a box.
std::vector<Vector> place_centers(std::size_t count, std::size_t dim, double spacing, Rng& rng) {
    std::vector<Vector> centers(count, Vector(dim, 0.0));
    if (spacing <= 0.0) return centers;
    if (dim >= count) {
        for (std::size_t i = 0; i < count; ++i) centers[i][i] = spacing / std::sqrt(2.0);
        return centers;
    }
    const double side = spacing * std::pow(static_cast<double>(count), 1.0 / static_cast<double>(dim)) * 2.0;
    for (std::size_t i = 0; i < count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
            for (auto& v : centers[i]) v = (rng.uniform() - 0.5) * side;
            placed = true;
            for (std::size_t j = 0; j < i && placed; ++j)
                placed = squared_distance(centers[i], centers[j]) >= spacing * spacing;
        }
        if (!placed)
            throw ConfigError(fmt::format("cannot place {} centres {} apart in {} dimensions", count,
                                          spacing, dim));
    }
    return centers;
}

std::size_t draw(const std::vector<double>& probs, Rng& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    // Rounding left u past the last boundary; fall back to the last non-zero.
    for (std::size_t i = probs.size(); i-- > 0;)
        if (probs[i] > 0.0) return i;
    return 0;
}

std::string arg_phrase(const GenerativeModel& model, const GenerativeModel::Context& ctx,
                       std::size_t actant, Rng& rng) {
    const auto& name = model.actants[actant];
    std::size_t variant = rng.index(model.phrases_per_actant);
    if (ctx.actants.size() >= 2 && rng.uniform() < model.compound_prob) {
        std::size_t other;
        do {
            other = ctx.actants[rng.index(ctx.actants.size())];
        } while (other == actant);
        return model.actants[other] + " " + name;
    }
    if (variant == 0 || model.modifiers.empty()) return name;
    return model.modifiers[(variant - 1) % model.modifiers.size()] + " " + name;
}

void emit_post(const GenerativeModel& model, std::size_t context, std::size_t tuples_per_post,
               Rng& rng, const std::string& doc_id, std::optional<Day> date, Source source,
               std::vector<RelationTuple>& out) {
    const auto& ctx = model.contexts[context];
    for (std::size_t t = 0; t < tuples_per_post; ++t) {
        const auto& edge = ctx.edges[rng.index(ctx.edges.size())];
        std::size_t rel = draw(edge.relation_probs, rng);
        RelationTuple tuple;
        tuple.doc_id = doc_id;
        tuple.source = source;
        tuple.date = date;
        tuple.arg1 = arg_phrase(model, ctx, edge.from, rng);
        tuple.arg1_head = model.actants[edge.from];
        tuple.rel = model.relations[rel];
        tuple.rel_head = model.relations[rel];
        tuple.arg2 = arg_phrase(model, ctx, edge.to, rng);
        tuple.arg2_head = model.actants[edge.to];
        out.push_back(std::move(tuple));
    }
}

// Prior restricted to contexts that have edges, renormalized.
std::vector<double> usable_prior(const GenerativeModel& model, std::vector<double> weights) {
    double total = 0.0;
    std::size_t dropped = 0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (model.contexts[c].edges.empty()) {
            weights[c] = 0.0;
            ++dropped;
        }
        total += weights[c];
    }
    if (total <= 0.0) throw ConfigError("no context with edges to sample from");
    if (dropped > 0)
        log::warn(fmt::format("{} context(s) without edges are never sampled", dropped));
    for (auto& w : weights) w /= total;
    return weights;
}

}  // namespace

GenerativeModel make_model(const ModelOptions& o) {
    if (o.k < 1 || o.n < 1 || o.r < 1) throw ConfigError("k, n and r must be >= 1");
    if (o.n < o.k) throw ConfigError(fmt::format("n={} actants cannot fill k={} contexts", o.n, o.k));
    if (!(o.separation >= 0.0)) throw ConfigError("separation must be >= 0");
    if (!(o.sigma > 0.0)) throw ConfigError("sigma must be > 0");
    if (o.phrases_per_actant < 1) throw ConfigError("phrases_per_actant must be >= 1");
    if (!o.prior.empty() && o.prior.size() != o.k) throw ConfigError("prior needs k entries");

    Rng rng(o.seed);
    GenerativeModel m;
    m.disjoint = o.disjoint;
    m.sigma = o.sigma;
    m.separation = o.separation;
    m.phrases_per_actant = o.phrases_per_actant;
    m.compound_prob = o.compound_prob;
    m.modifiers = {"big", "old", "new", "secret", "fake", "evil", "real", "local", "hidden", "foreign"};
    for (std::size_t i = 0; i < o.n; ++i) m.actants.push_back(padded("actant", i, o.n));
    for (std::size_t i = 0; i < o.r; ++i) m.relations.push_back(padded("rel", i, o.r));

    if (o.prior.empty()) {
        m.prior.assign(o.k, 1.0 / static_cast<double>(o.k));
    } else {
        double total = 0.0;
        for (double p : o.prior) {
            if (!(p >= 0.0)) throw ConfigError("prior entries must be >= 0");
            total += p;
        }
        if (total <= 0.0) throw ConfigError("prior must have positive mass");
        for (double p : o.prior) m.prior.push_back(p / total);
    }

    m.contexts.resize(o.k);
    for (std::size_t a = 0; a < o.n; ++a) m.contexts[a * o.k / o.n].actants.push_back(a);
    if (!o.disjoint && o.k > 1) {
        for (std::size_t a = 0; a < o.n; ++a) {
            if (rng.uniform() >= o.overlap) continue;
            std::size_t home = a * o.k / o.n;
            std::size_t other = (home + 1 + rng.index(o.k - 1)) % o.k;
            m.contexts[other].actants.push_back(a);
        }
        for (auto& ctx : m.contexts) std::sort(ctx.actants.begin(), ctx.actants.end());
    }

    for (auto& ctx : m.contexts) {
        const auto& v = ctx.actants;
        std::set<std::pair<std::size_t, std::size_t>> pairs;
        if (v.size() >= 2)
            for (std::size_t i = 0; i < v.size(); ++i) pairs.insert({v[i], v[(i + 1) % v.size()]});
        for (std::size_t a : v)
            for (std::size_t b : v)
                if (a != b && rng.uniform() < o.edge_prob) pairs.insert({a, b});
        for (const auto& [a, b] : pairs)
            ctx.edges.push_back({a, b, exponential_weights(o.r, rng)});
    }

    std::size_t dim = o.dimension ? o.dimension : std::max(o.n, o.r);
    m.actant_centers = place_centers(o.n, dim, o.separation * o.sigma, rng);
    m.relation_centers = place_centers(o.r, dim, o.separation * o.sigma, rng);
    return m;
}

SyntheticCorpus sample_corpus(const GenerativeModel& model, const SampleOptions& options) {
    SyntheticCorpus out;
    std::vector<RelationTuple> tuples;
    if (options.num_posts > 0) {
        auto prior = usable_prior(model, model.prior);
        Rng rng(options.seed);
        for (std::size_t p = 0; p < options.num_posts; ++p) {
            std::size_t ctx = draw(prior, rng);
            out.post_context.push_back(ctx);
            auto offset = options.days ? p * options.days / options.num_posts : 0;
            Day date = options.start + std::chrono::days{static_cast<int>(offset)};
            emit_post(model, ctx, options.tuples_per_post, rng,
                      fmt::format("{}{}", options.doc_prefix, p), date, options.source, tuples);
        }
    }
    out.corpus = make_corpus(options.source, std::move(tuples));
    return out;
}

std::map<std::string, int> planted_labels(const GenerativeModel& model) {
    std::map<std::string, int> labels;
    for (std::size_t a = 0; a < model.actants.size(); ++a) {
        int best = -1;
        for (std::size_t c = 0; c < model.contexts.size(); ++c) {
            const auto& v = model.contexts[c].actants;
            if (!std::binary_search(v.begin(), v.end(), a)) continue;
            if (best < 0 || model.prior[c] > model.prior[static_cast<std::size_t>(best)])
                best = static_cast<int>(c);
        }
        labels[model.actants[a]] = best;
    }
    return labels;
}

std::vector<std::vector<std::string>> planted_contexts(const GenerativeModel& model) {
    std::vector<std::vector<std::string>> out(model.contexts.size());
    for (const auto& [name, label] : planted_labels(model))
        if (label >= 0) out[static_cast<std::size_t>(label)].push_back(name);
    return out;
}

EmbeddingTable synthesize_embeddings(const GenerativeModel& model,
                                     const std::vector<const Corpus*>& corpora,
                                     std::uint64_t seed) {
    std::map<std::string, std::size_t> actant_index;
    for (std::size_t i = 0; i < model.actants.size(); ++i) actant_index[model.actants[i]] = i;
    std::map<std::string, std::size_t> relation_index;
    for (std::size_t i = 0; i < model.relations.size(); ++i) relation_index[model.relations[i]] = i;

    std::set<std::string> phrases;
    for (const auto* c : corpora)
        for (const auto& t : c->tuples) {
            phrases.insert(t.arg1);
            phrases.insert(t.arg2);
            phrases.insert(t.rel);
        }

    EmbeddingTable table;
    table.dimension = model.dimension();
    for (const auto& phrase : phrases) {
        Vector center(table.dimension, 0.0);
        std::size_t found = 0;
        for (const auto& token : text::tokenize(phrase)) {
            const Vector* c = nullptr;
            if (auto it = actant_index.find(token); it != actant_index.end())
                c = &model.actant_centers[it->second];
            else if (auto rt = relation_index.find(token); rt != relation_index.end())
                c = &model.relation_centers[rt->second];
            if (!c) continue;
            for (std::size_t d = 0; d < table.dimension; ++d) center[d] += (*c)[d];
            ++found;
        }
        if (found > 1)
            for (auto& v : center) v /= static_cast<double>(found);
        // Seeded per phrase so a vector does not depend on which other
        // phrases happen to exist.
        Rng rng(derive_seed(seed, phrase));
        for (auto& v : center) v += model.sigma * rng.normal();
        table.entries.emplace(phrase, std::move(center));
    }
    return table;
}

SeedEntityList model_seeds(const GenerativeModel& model, const Corpus& corpus) {
    std::map<std::string, std::size_t> counts;
    for (const auto& name : model.actants) {
        auto it = corpus.vocabulary.find(name);
        counts[name] = it == corpus.vocabulary.end() ? 1 : it->second;
    }
    return make_seed_list(counts);
}

CoupledStreams generate_coupled(const GenerativeModel& model, const CoupledOptions& options) {
    const std::size_t k = model.contexts.size();
    const std::size_t back = static_cast<std::size_t>(std::abs(options.lag));
    const std::size_t span = options.days + 2 * back;
    Rng rng(options.seed);
    // intensity[t + back] covers days -back .. days + back - 1.
    std::vector<std::vector<double>> intensity(span, std::vector<double>(k));
    for (auto& day : intensity) {
        for (std::size_t c = 0; c < k; ++c)
            day[c] = model.prior[c] * std::exp(options.volatility * rng.normal());
        day = usable_prior(model, day);
    }

    std::vector<RelationTuple> social;
    std::vector<RelationTuple> news;
    Rng social_rng(derive_seed(options.seed, "social"));
    Rng news_rng(derive_seed(options.seed, "news"));
    for (std::size_t t = 0; t < options.days; ++t) {
        Day date = options.start + std::chrono::days{static_cast<int>(t)};
        const auto& p_social = intensity[t + back];
        const auto& p_news = intensity[static_cast<std::size_t>(static_cast<long>(t + back) - options.lag)];
        for (std::size_t i = 0; i < options.social_posts_per_day; ++i)
            emit_post(model, draw(p_social, social_rng), options.tuples_per_post, social_rng,
                      fmt::format("social-{}-{}", t, i), date, Source::social, social);
        for (std::size_t i = 0; i < options.news_posts_per_day; ++i)
            emit_post(model, draw(p_news, news_rng), options.tuples_per_post, news_rng,
                      fmt::format("news-{}-{}", t, i), date, Source::news, news);
    }
    return {make_corpus(Source::social, std::move(social)), make_corpus(Source::news, std::move(news))};
}

json truth_to_json(const GenerativeModel& model) {
    json contexts = json::array();
    for (const auto& ctx : model.contexts) {
        json names = json::array();
        for (auto a : ctx.actants) names.push_back(model.actants[a]);
        contexts.push_back(std::move(names));
    }
    return {{"mode", model.disjoint ? "disjoint" : "overlap"},
            {"prior", model.prior},
            {"context_actants", std::move(contexts)},
            {"labels", planted_labels(model)},
            {"planted_contexts", planted_contexts(model)},
            {"relations", model.relations},
            {"separation", model.separation},
            {"sigma", model.sigma}};
}

std::vector<std::vector<std::string>> contexts_from_truth(const json& j) {
    return j.at("planted_contexts").get<std::vector<std::vector<std::string>>>();
}

}  // namespace narrnet
