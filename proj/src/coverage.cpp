#include "narrnet/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include <fmt/format.h>

namespace narrnet {

SubCorpus make_subcorpus(std::vector<std::vector<std::string>> segments) {
    SubCorpus c;
    c.segments = std::move(segments);
    for (const auto& seg : c.segments) {
        c.token_count += seg.size();
        for (const auto& t : seg) ++c.counts[t];
    }
    return c;
}

SubCorpus subcorpus_between(const Corpus& corpus, Day from, Day to) {
    std::vector<std::vector<std::string>> segments;
    for (const auto& t : corpus.tuples) {
        if (!t.date || *t.date < from || *t.date >= to) continue;
        segments.push_back(text::tokenize(t.arg1));
        segments.push_back(text::tokenize(t.arg2));
    }
    return make_subcorpus(std::move(segments));
}

double coverage_score(const std::vector<std::string>& community, const SubCorpus& subcorpus) {
    std::set<std::string> entries;
    for (const auto& w : community) {
        auto n = text::normalize(w);
        if (!n.empty()) entries.insert(n);
    }
    if (entries.empty() || subcorpus.token_count == 0) return 0.0;
    double hits = 0.0;
    for (const auto& entry : entries) {
        if (entry.find(' ') == std::string::npos) {
            if (auto it = subcorpus.counts.find(entry); it != subcorpus.counts.end())
                hits += static_cast<double>(it->second);
        } else {
            auto needle = text::tokenize(entry);
            for (const auto& seg : subcorpus.segments)
                hits += static_cast<double>(text::count_sequence(seg, needle));
        }
    }
    return hits / (static_cast<double>(entries.size()) * static_cast<double>(subcorpus.token_count));
}

namespace {

// Coverage of a sampled multiset of single tokens; |V| is the sample length.
double sample_coverage(const std::vector<const std::string*>& sample, const SubCorpus& c) {
    if (sample.empty() || c.token_count == 0) return 0.0;
    double hits = 0.0;
    for (const auto* w : sample)
        if (auto it = c.counts.find(*w); it != c.counts.end()) hits += static_cast<double>(it->second);
    return hits / (static_cast<double>(sample.size()) * static_cast<double>(c.token_count));
}

}  // namespace

RelativeCoverage relative_coverage(const std::vector<std::string>& community,
                                   const SubCorpus& subcorpus,
                                   std::vector<std::string> vocabulary,
                                   const BaselineOptions& options) {
    if (options.samples == 0 || options.sample_size == 0)
        throw ConfigError("baseline needs at least one sample of at least one word");
    std::sort(vocabulary.begin(), vocabulary.end());
    vocabulary.erase(std::unique(vocabulary.begin(), vocabulary.end()), vocabulary.end());

    RelativeCoverage out;
    out.score = coverage_score(community, subcorpus);
    if (vocabulary.empty()) {
        out.infinite = true;
        out.ratio = std::numeric_limits<double>::infinity();
        return out;
    }
    out.with_replacement = vocabulary.size() < options.sample_size;

    Rng rng(options.seed);
    std::vector<std::size_t> pool(vocabulary.size());
    double total = 0.0;
    for (std::size_t s = 0; s < options.samples; ++s) {
        std::vector<const std::string*> sample;
        sample.reserve(options.sample_size);
        if (out.with_replacement) {
            for (std::size_t i = 0; i < options.sample_size; ++i)
                sample.push_back(&vocabulary[rng.index(vocabulary.size())]);
        } else {
            std::iota(pool.begin(), pool.end(), 0);
            for (std::size_t i = 0; i < options.sample_size; ++i) {
                std::size_t j = i + rng.index(pool.size() - i);
                std::swap(pool[i], pool[j]);
                sample.push_back(&vocabulary[pool[i]]);
            }
        }
        total += sample_coverage(sample, subcorpus);
    }
    out.baseline_mean = total / static_cast<double>(options.samples);
    if (out.baseline_mean > 0.0) {
        out.ratio = out.score / out.baseline_mean;
    } else {
        out.infinite = true;
        out.ratio = std::numeric_limits<double>::infinity();
    }
    return out;
}

CrossCorrelation cross_correlate(const TimeSeries& a, const TimeSeries& b, int max_lag) {
    if (max_lag < 0) throw ConfigError("max_lag must be >= 0");
    CrossCorrelation out;
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (const auto& p : a.points()) {
            if (auto y = b.at(p.day + std::chrono::days{lag})) {
                xs.push_back(p.value);
                ys.push_back(*y);
            }
        }
        LagCorrelation lc;
        lc.lag = lag;
        lc.overlap = xs.size();
        if (xs.size() >= 3) {
            const double n = static_cast<double>(xs.size());
            double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
            double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
            double sxy = 0.0, sxx = 0.0, syy = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                sxy += (xs[i] - mx) * (ys[i] - my);
                sxx += (xs[i] - mx) * (xs[i] - mx);
                syy += (ys[i] - my) * (ys[i] - my);
            }
            if (sxx > 0.0 && syy > 0.0) {
                lc.value = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
                lc.defined = true;
            }
        }
        out.lags.push_back(lc);
    }
    for (const auto& lc : out.lags) {
        if (!lc.defined) continue;
        bool better = !out.best_lag || lc.value > out.best_value ||
                      (lc.value == out.best_value && std::abs(lc.lag) < std::abs(*out.best_lag));
        if (better) {
            out.best_lag = lc.lag;
            out.best_value = lc.value;
        }
    }
    return out;
}

void write_cross_correlation_csv(std::ostream& out, const CrossCorrelation& cc) {
    out << "lag,correlation,overlap,defined\n";
    for (const auto& lc : cc.lags)
        out << lc.lag << ',' << (lc.defined ? fmt::format("{}", lc.value) : std::string("nan"))
            << ',' << lc.overlap << ',' << (lc.defined ? 1 : 0) << '\n';
}

namespace {

double entropy(const std::map<int, std::size_t>& counts, double n) {
    double h = 0.0;
    for (const auto& [_, c] : counts) {
        double p = static_cast<double>(c) / n;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

// H(X | Y) from paired labels.
double conditional_entropy(const std::vector<int>& x, const std::vector<int>& y) {
    std::map<int, std::map<int, std::size_t>> joint;
    for (std::size_t i = 0; i < x.size(); ++i) ++joint[y[i]][x[i]];
    const double n = static_cast<double>(x.size());
    double h = 0.0;
    for (const auto& [_, row] : joint) {
        double ny = 0.0;
        for (const auto& [__, c] : row) ny += static_cast<double>(c);
        h += ny / n * entropy(row, ny);
    }
    return h;
}

}  // namespace

ClusteringScores clustering_scores(const std::vector<int>& labels_true,
                                   const std::vector<int>& labels_pred) {
    if (labels_true.size() != labels_pred.size())
        throw std::invalid_argument("label vectors differ in length");
    ClusteringScores s;
    if (labels_true.empty()) return s;
    const double n = static_cast<double>(labels_true.size());
    std::map<int, std::size_t> ct;
    std::map<int, std::size_t> cp;
    for (int l : labels_true) ++ct[l];
    for (int l : labels_pred) ++cp[l];
    const double h_true = entropy(ct, n);
    const double h_pred = entropy(cp, n);
    s.homogeneity = h_true > 0.0 ? 1.0 - conditional_entropy(labels_true, labels_pred) / h_true : 1.0;
    s.completeness = h_pred > 0.0 ? 1.0 - conditional_entropy(labels_pred, labels_true) / h_pred : 1.0;
    s.homogeneity = std::clamp(s.homogeneity, 0.0, 1.0);
    s.completeness = std::clamp(s.completeness, 0.0, 1.0);
    double sum = s.homogeneity + s.completeness;
    s.v_measure = sum > 0.0 ? 2.0 * s.homogeneity * s.completeness / sum : 0.0;
    return s;
}

AgreementReport evaluate_communities(const std::vector<std::vector<std::string>>& predicted,
                                     const std::vector<std::vector<std::string>>& reference) {
    std::vector<std::set<std::string>> ref_sets;
    for (const auto& r : reference) ref_sets.emplace_back(r.begin(), r.end());

    AgreementReport report;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        std::set<std::string> actants(predicted[i].begin(), predicted[i].end());
        for (const auto& actant : actants) {
            if (!seen.insert(actant).second) continue;
            for (std::size_t j = 0; j < ref_sets.size(); ++j) {
                if (ref_sets[j].count(actant)) {
                    report.labels_true.push_back(static_cast<int>(j));
                    report.labels_pred.push_back(static_cast<int>(i));
                    break;
                }
            }
        }
    }
    report.total = seen.size();
    report.matched = report.labels_true.size();
    report.coverage = report.total ? static_cast<double>(report.matched) / static_cast<double>(report.total) : 0.0;
    report.defined = report.matched > 0;
    if (report.defined) report.scores = clustering_scores(report.labels_true, report.labels_pred);
    return report;
}

void write_agreement_csv(std::ostream& out, const std::vector<DailyAgreement>& rows) {
    out << "date,coverage,homogeneity,completeness,v_measure,matched,total\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        auto metric = [&](double v) { return r.defined ? fmt::format("{}", v) : std::string("nan"); };
        out << format_day(row.day) << ',' << fmt::format("{}", r.coverage) << ','
            << metric(r.scores.homogeneity) << ',' << metric(r.scores.completeness) << ','
            << metric(r.scores.v_measure) << ',' << r.matched << ',' << r.total << '\n';
    }
}

TimeSeries coverage_series(const std::vector<std::string>& community, const Corpus& corpus,
                           const std::vector<std::string>& vocabulary, Day from, Day to,
                           const BaselineOptions& options) {
    // Bucket once instead of rescanning the corpus per day.
    std::map<Day, std::vector<std::vector<std::string>>> by_day;
    for (const auto& t : corpus.tuples) {
        if (!t.date || *t.date < from || *t.date > to) continue;
        auto& segs = by_day[*t.date];
        segs.push_back(text::tokenize(t.arg1));
        segs.push_back(text::tokenize(t.arg2));
    }
    TimeSeries series;
    std::size_t skipped = 0;
    std::uint64_t day_index = 0;
    for (Day d = from; d <= to; d += std::chrono::days{1}, ++day_index) {
        auto it = by_day.find(d);
        if (it == by_day.end()) continue;
        auto sub = make_subcorpus(std::move(it->second));
        BaselineOptions opts = options;
        opts.seed = derive_seed(options.seed, "baseline", day_index);
        auto rc = relative_coverage(community, sub, vocabulary, opts);
        if (rc.infinite) {
            ++skipped;
            continue;
        }
        series.push_back(d, rc.ratio);
    }
    if (skipped > 0)
        log::warn(fmt::format("coverage series: {} day(s) with a zero baseline skipped", skipped));
    return series;
}

}  // namespace narrnet
