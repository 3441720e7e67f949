#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "narrnet/corpus.hpp"
#include "narrnet/series.hpp"

namespace narrnet {

// Token text of a time-bounded slice of a corpus. Each arg phrase is its own
// segment so multi-word matches never straddle two phrases.
struct SubCorpus {
    std::vector<std::vector<std::string>> segments;
    TokenCounts counts;
    std::size_t token_count = 0;
};

SubCorpus make_subcorpus(std::vector<std::vector<std::string>> segments);
// Arg phrases of tuples dated in [from, to). Undated tuples are skipped.
SubCorpus subcorpus_between(const Corpus& corpus, Day from, Day to);

// m = sum over community entries of their occurrences in C, divided by
// |V| * |C|. Entries are distinct community words; a multi-word entry counts
// its contiguous occurrences. 0 for an empty sub-corpus.
double coverage_score(const std::vector<std::string>& community, const SubCorpus& subcorpus);

struct BaselineOptions {
    std::size_t samples = 20;
    std::size_t sample_size = 500;
    std::uint64_t seed = 0;
};

struct RelativeCoverage {
    double score = 0.0;          // m of the community
    double baseline_mean = 0.0;  // mean m of the random communities
    double ratio = 0.0;          // +inf when baseline_mean is 0
    bool infinite = false;
    bool with_replacement = false;
};

// The vocabulary is sorted internally before sampling, so the result does not
// depend on its order. Random communities are drawn without replacement
// unless the vocabulary is smaller than sample_size.
RelativeCoverage relative_coverage(const std::vector<std::string>& community,
                                   const SubCorpus& subcorpus,
                                   std::vector<std::string> vocabulary,
                                   const BaselineOptions& options = {});

struct LagCorrelation {
    int lag = 0;
    double value = 0.0;
    std::size_t overlap = 0;
    bool defined = false;  // false: < 3 aligned days or a constant side
};

struct CrossCorrelation {
    std::vector<LagCorrelation> lags;  // -max_lag .. +max_lag
    std::optional<int> best_lag;       // highest defined correlation
    double best_value = 0.0;
};

// Pearson correlation of a(t) against b(t + lag) over days present in both,
// for every lag in [-max_lag, max_lag]. Ties on the maximum go to the
// smallest |lag|.
CrossCorrelation cross_correlate(const TimeSeries& a, const TimeSeries& b, int max_lag);
void write_cross_correlation_csv(std::ostream& out, const CrossCorrelation& cc);

struct ClusteringScores {
    double homogeneity = 1.0;
    double completeness = 1.0;
    double v_measure = 1.0;
};

// Natural-log entropies. A conditional-entropy ratio with a zero denominator
// scores 1; v is 0 when h + c is 0.
ClusteringScores clustering_scores(const std::vector<int>& labels_true,
                                   const std::vector<int>& labels_pred);

struct AgreementReport {
    std::size_t matched = 0;  // actants found in some reference community
    std::size_t total = 0;    // distinct actants across predicted communities
    double coverage = 0.0;    // matched / total
    bool defined = false;     // false when nothing matched
    ClusteringScores scores;
    std::vector<int> labels_true;
    std::vector<int> labels_pred;
};

// Walks predicted communities in order and each actant in sorted order; an
// actant found in a reference community gets (true = lowest such reference
// index, pred = the first predicted community it appeared in).
AgreementReport evaluate_communities(const std::vector<std::vector<std::string>>& predicted,
                                     const std::vector<std::vector<std::string>>& reference);

struct DailyAgreement {
    Day day;
    AgreementReport report;
};
void write_agreement_csv(std::ostream& out, const std::vector<DailyAgreement>& rows);

// Relative coverage of `community` in each one-day slice of `corpus` over
// [from, to]. Days whose baseline is zero are skipped. Sampling with
// replacement (vocabulary smaller than sample_size) is not reported here;
// callers warn once per run.
TimeSeries coverage_series(const std::vector<std::string>& community, const Corpus& corpus,
                           const std::vector<std::string>& vocabulary, Day from, Day to,
                           const BaselineOptions& options = {});

}  // namespace narrnet
