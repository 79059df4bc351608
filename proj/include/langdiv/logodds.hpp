#pragma once

#include "langdiv/corpus.hpp"
#include "langdiv/lexicon.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace langdiv {

enum class Group { a, b };

struct TermCounts {
    // term -> {count in group A, count in group B}; bigrams joined with '_'
    std::unordered_map<std::string, std::array<std::uint64_t, 2>> counts;
    std::array<std::uint64_t, 2> totals{}; // sum of counts per group
    int ngram_max = 1;
};

// N-grams within document boundaries. Excluded terms are removed before
// n-gram formation and break adjacency (no bigram spans the gap). dict_filter
// keeps only dictionary-matching unigrams in the vocabulary; bigrams are
// unaffected. Terms below min_count pooled across groups are dropped. A group
// left with zero tokens is an AnalysisError.
TermCounts count_terms(const DocumentSet& docs, const GroupMap& groups,
                       int ngram_max, std::uint64_t min_count,
                       const std::unordered_set<std::string>& exclude,
                       const MoralDictionary* dict_filter = nullptr,
                       int threads = 0);

// Informative Dirichlet prior: per-term mass proportional to pooled corpus
// frequency, total mass `scale`.
struct PriorSpec {
    double scale = 500.0;
    std::unordered_map<std::string, double> weights;

    static PriorSpec informative(const TermCounts& counts, double scale = 500.0);
};

struct LogOddsResult {
    std::string term;
    std::uint64_t count_a = 0;
    std::uint64_t count_b = 0;
    double delta = 0.0;    // prior-smoothed log-odds difference, A minus B
    double variance = 0.0;
    double z = 0.0;        // delta / sqrt(variance)
    std::vector<std::string> bigram_context; // filled by attach_bigram_context
};

// delta_w = log[(y_Aw+a_w)/(n_A+a0-y_Aw-a_w)] - log[(y_Bw+a_w)/(n_B+a0-y_Bw-a_w)]
// var_w   = 1/(y_Aw+a_w) + 1/(y_Bw+a_w)
// Results sorted by term; the prior must cover the whole vocabulary.
std::vector<LogOddsResult> weighted_log_odds(const TermCounts& counts,
                                             const PriorSpec& prior);

// Top k by z (descending for group A, ascending for B); ties broken by pooled
// count descending, then term. k <= 0 is an AnalysisError.
std::vector<LogOddsResult> top_polarized(const std::vector<LogOddsResult>& results,
                                         int k, Group group);

// For each unigram, attaches up to per_term bigrams that contain it as a
// component and point in the same group direction, ranked by |z|.
void attach_bigram_context(std::vector<LogOddsResult>& unigrams,
                           const std::vector<LogOddsResult>& bigrams,
                           std::size_t per_term);

} // namespace langdiv
