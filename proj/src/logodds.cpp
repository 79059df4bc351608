#include "langdiv/logodds.hpp"

#include "langdiv/errors.hpp"
#include "langdiv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace langdiv {

namespace {

using CountMap = std::unordered_map<std::string, std::array<std::uint64_t, 2>>;

// Unigrams and bigrams for one document, after exclusions. Excluded tokens
// leave gaps: no bigram spans them.
void accumulate_ngrams(const Document& doc, int group, int ngram_max,
                       const std::unordered_set<std::string>& exclude,
                       CountMap& counts) {
    const std::string* prev = nullptr;
    for (const auto& tok : doc.tokens) {
        if (!exclude.empty() && exclude.count(tok)) {
            prev = nullptr;
            continue;
        }
        counts[tok][static_cast<std::size_t>(group)] += 1;
        if (ngram_max >= 2 && prev != nullptr) {
            counts[*prev + "_" + tok][static_cast<std::size_t>(group)] += 1;
        }
        prev = &tok;
    }
}

bool is_bigram(const std::string& term) {
    return term.find('_') != std::string::npos;
}

} // namespace

TermCounts count_terms(const DocumentSet& docs, const GroupMap& groups,
                       int ngram_max, std::uint64_t min_count,
                       const std::unordered_set<std::string>& exclude,
                       const MoralDictionary* dict_filter, int threads) {
    if (ngram_max < 1 || ngram_max > 2) {
        throw AnalysisError("count_terms: ngram_max must be 1 or 2");
    }
    const std::size_t n = docs.docs.size();
    TermCounts out;
    out.ngram_max = ngram_max;
    std::mutex merge_mutex;

    // per-worker partial counts merged once; integer merges commute, so the
    // result is independent of worker count and merge order
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        CountMap local;
        for (std::size_t i = begin; i < end; ++i) {
            const Document& doc = docs.docs[i];
            const auto it = groups.find(doc.author_id);
            if (it == groups.end()) {
                throw AnalysisError("count_terms: unlabeled author " + doc.author_id);
            }
            accumulate_ngrams(doc, it->second, ngram_max, exclude, local);
        }
        const std::lock_guard<std::mutex> lock(merge_mutex);
        for (auto& [term, cnt] : local) {
            auto& slot = out.counts[term];
            slot[0] += cnt[0];
            slot[1] += cnt[1];
        }
    });

    // dictionary filter keeps only matching unigrams; min_count applies to the
    // pooled count across groups
    std::erase_if(out.counts, [&](const auto& item) {
        const auto& [term, cnt] = item;
        if (cnt[0] + cnt[1] < min_count) return true;
        if (dict_filter != nullptr && !is_bigram(term) &&
            !dict_filter->matches(term)) {
            return true;
        }
        return false;
    });

    for (const auto& [term, cnt] : out.counts) {
        out.totals[0] += cnt[0];
        out.totals[1] += cnt[1];
    }
    if (out.totals[0] == 0 || out.totals[1] == 0) {
        throw AnalysisError("count_terms: a group has zero tokens after filtering");
    }
    return out;
}

PriorSpec PriorSpec::informative(const TermCounts& counts, double scale) {
    if (scale <= 0.0) throw AnalysisError("prior scale must be positive");
    PriorSpec prior;
    prior.scale = scale;
    const double pooled_total =
        static_cast<double>(counts.totals[0] + counts.totals[1]);
    prior.weights.reserve(counts.counts.size());
    for (const auto& [term, cnt] : counts.counts) {
        prior.weights[term] =
            scale * static_cast<double>(cnt[0] + cnt[1]) / pooled_total;
    }
    return prior;
}

std::vector<LogOddsResult> weighted_log_odds(const TermCounts& counts,
                                             const PriorSpec& prior) {
    const double n_a = static_cast<double>(counts.totals[0]);
    const double n_b = static_cast<double>(counts.totals[1]);
    const double a0 = prior.scale;

    std::vector<LogOddsResult> results;
    results.reserve(counts.counts.size());
    for (const auto& [term, cnt] : counts.counts) {
        const auto wit = prior.weights.find(term);
        if (wit == prior.weights.end() || wit->second <= 0.0) {
            throw AnalysisError("weighted_log_odds: prior does not cover term " +
                                term);
        }
        const double alpha = wit->second;
        const double y_a = static_cast<double>(cnt[0]);
        const double y_b = static_cast<double>(cnt[1]);
        LogOddsResult r;
        r.term = term;
        r.count_a = cnt[0];
        r.count_b = cnt[1];
        const double odds_a = std::log((y_a + alpha) / (n_a + a0 - y_a - alpha));
        const double odds_b = std::log((y_b + alpha) / (n_b + a0 - y_b - alpha));
        r.delta = odds_a - odds_b;
        r.variance = 1.0 / (y_a + alpha) + 1.0 / (y_b + alpha);
        r.z = r.delta / std::sqrt(r.variance);
        results.push_back(std::move(r));
    }
    std::sort(results.begin(), results.end(),
              [](const auto& a, const auto& b) { return a.term < b.term; });
    return results;
}

std::vector<LogOddsResult> top_polarized(const std::vector<LogOddsResult>& results,
                                         int k, Group group) {
    if (k <= 0) throw AnalysisError("top_polarized: k must be positive");
    if (results.empty()) throw AnalysisError("top_polarized: empty results");

    std::vector<LogOddsResult> sorted = results;
    const bool descending = group == Group::a;
    std::sort(sorted.begin(), sorted.end(), [&](const auto& a, const auto& b) {
        if (a.z != b.z) return descending ? a.z > b.z : a.z < b.z;
        const auto pooled_a = a.count_a + a.count_b;
        const auto pooled_b = b.count_a + b.count_b;
        if (pooled_a != pooled_b) return pooled_a > pooled_b;
        return a.term < b.term;
    });
    if (sorted.size() > static_cast<std::size_t>(k)) {
        sorted.resize(static_cast<std::size_t>(k));
    }
    return sorted;
}

void attach_bigram_context(std::vector<LogOddsResult>& unigrams,
                           const std::vector<LogOddsResult>& bigrams,
                           std::size_t per_term) {
    for (auto& uni : unigrams) {
        uni.bigram_context.clear();
        if (uni.z == 0.0) continue;
        std::vector<const LogOddsResult*> candidates;
        for (const auto& bi : bigrams) {
            if (!is_bigram(bi.term)) continue;
            if ((uni.z > 0.0) != (bi.z > 0.0) || bi.z == 0.0) continue;
            const std::size_t sep = bi.term.find('_');
            const std::string_view first(bi.term.data(), sep);
            const std::string_view second(bi.term.data() + sep + 1,
                                          bi.term.size() - sep - 1);
            if (first == uni.term || second == uni.term) candidates.push_back(&bi);
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](const LogOddsResult* a, const LogOddsResult* b) {
                      const double za = std::fabs(a->z), zb = std::fabs(b->z);
                      if (za != zb) return za > zb;
                      const auto pa = a->count_a + a->count_b;
                      const auto pb = b->count_a + b->count_b;
                      if (pa != pb) return pa > pb;
                      return a->term < b->term;
                  });
        for (std::size_t i = 0; i < candidates.size() && i < per_term; ++i) {
            uni.bigram_context.push_back(candidates[i]->term);
        }
    }
}

} // namespace langdiv
