#include "langdiv/embedreg.hpp"

#include "langdiv/errors.hpp"
#include "langdiv/parallel.hpp"
#include "langdiv/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace langdiv {

void EmbeddingTable::add(std::string term, const double* vec) {
    const auto [it, inserted] = index.try_emplace(std::move(term), terms.size());
    if (!inserted) return;
    terms.push_back(it->first);
    values.insert(values.end(), vec, vec + dim);
}

EmbeddingLoad load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);

    EmbeddingLoad result;
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> vec;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::size_t pos = line.find_first_of(" \t");
        if (pos == std::string::npos) {
            throw DataError(path + ": no vector at line " + std::to_string(line_no));
        }
        std::string term = line.substr(0, pos);
        vec.clear();
        const char* p = line.c_str() + pos;
        char* endp = nullptr;
        for (;;) {
            while (*p == ' ' || *p == '\t') ++p;
            if (*p == '\0') break;
            const double v = std::strtod(p, &endp);
            if (endp == p) {
                throw DataError(path + ": bad float at line " + std::to_string(line_no));
            }
            vec.push_back(v);
            p = endp;
        }
        if (result.table.dim == 0) {
            if (vec.empty()) {
                throw DataError(path + ": no vector at line " + std::to_string(line_no));
            }
            result.table.dim = vec.size();
        } else if (vec.size() != result.table.dim) {
            throw DataError(path + ": dimension mismatch at line " +
                            std::to_string(line_no) + " (expected " +
                            std::to_string(result.table.dim) + ", got " +
                            std::to_string(vec.size()) + ")");
        }
        if (result.table.index.count(term)) {
            result.warnings.push_back("duplicate term '" + term + "' at line " +
                                      std::to_string(line_no) +
                                      ", keeping first occurrence");
            continue;
        }
        result.table.add(std::move(term), vec.data());
    }
    if (result.table.size() == 0) {
        throw DataError(path + ": empty embedding file");
    }
    return result;
}

std::vector<std::vector<std::string>> extract_contexts(const Document& doc,
                                                       const std::string& target,
                                                       int window) {
    if (window < 1) throw AnalysisError("extract_contexts: window must be >= 1");
    std::vector<std::vector<std::string>> contexts;
    const auto& toks = doc.tokens;
    const std::size_t n = toks.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (toks[i] != target) continue;
        std::vector<std::string> ctx;
        const std::size_t w = static_cast<std::size_t>(window);
        const std::size_t lo = i >= w ? i - w : 0;
        const std::size_t hi = std::min(n, i + w + 1);
        for (std::size_t j = lo; j < hi; ++j) {
            if (toks[j] == target) continue; // all occurrences excluded
            ctx.push_back(toks[j]);
        }
        contexts.push_back(std::move(ctx));
    }
    return contexts;
}

std::optional<std::vector<double>> context_vector(
    const std::vector<std::vector<std::string>>& windows,
    const EmbeddingTable& table) {
    std::vector<double> sum(table.dim, 0.0);
    std::size_t hits = 0;
    for (const auto& window : windows) {
        for (const auto& tok : window) {
            const double* vec = table.find(tok);
            if (vec == nullptr) continue;
            for (std::size_t k = 0; k < table.dim; ++k) sum[k] += vec[k];
            ++hits;
        }
    }
    if (hits == 0) return std::nullopt;
    for (double& v : sum) v /= static_cast<double>(hits);
    return sum;
}

// ---------------------------------------------------------------------------
// Two-group regression core

namespace {

struct Packed {
    std::size_t n = 0, d = 0, n0 = 0, n1 = 0;
    std::vector<double> values; // row-major n x d
    std::vector<std::uint32_t> group1_rows;
    std::vector<double> col_sum;   // per dimension, over all rows
    std::vector<double> col_sumsq;
};

Packed pack(const std::vector<ContextObservation>& obs) {
    Packed p;
    p.n = obs.size();
    if (p.n == 0) throw AnalysisError("embedding regression: no observations");
    p.d = obs.front().vector.size();
    p.values.resize(p.n * p.d);
    p.col_sum.assign(p.d, 0.0);
    p.col_sumsq.assign(p.d, 0.0);
    for (std::size_t i = 0; i < p.n; ++i) {
        const auto& o = obs[i];
        if (o.vector.size() != p.d) {
            throw AnalysisError("embedding regression: inconsistent dimensions");
        }
        if (o.group != 0 && o.group != 1) {
            throw AnalysisError("embedding regression: group labels must be 0/1");
        }
        if (o.group == 1) {
            p.group1_rows.push_back(static_cast<std::uint32_t>(i));
            ++p.n1;
        } else {
            ++p.n0;
        }
        double* row = p.values.data() + i * p.d;
        for (std::size_t k = 0; k < p.d; ++k) {
            row[k] = o.vector[k];
            p.col_sum[k] += o.vector[k];
            p.col_sumsq[k] += o.vector[k] * o.vector[k];
        }
    }
    if (p.n0 < 2 || p.n1 < 2) {
        throw AnalysisError("embedding regression: need >=2 observations per group");
    }
    return p;
}

// Per-dimension two-group OLS in closed form: the indicator slope is the
// group mean difference, its homoskedastic variance sigma2 * n/(n0*n1) with
// sigma2 = SSR/(n-2). `scratch` holds the group-1 column sums (size d).
void two_group_estimate(const Packed& p, const std::uint32_t* rows1,
                        double* scratch, double& raw_sq, double& correction,
                        double* beta_out = nullptr, double* var_out = nullptr) {
    const std::size_t d = p.d;
    std::fill(scratch, scratch + d, 0.0);
    for (std::size_t r = 0; r < p.n1; ++r) {
        const double* row = p.values.data() + static_cast<std::size_t>(rows1[r]) * d;
        for (std::size_t k = 0; k < d; ++k) scratch[k] += row[k];
    }
    const double n0 = static_cast<double>(p.n0);
    const double n1 = static_cast<double>(p.n1);
    const double n = static_cast<double>(p.n);
    const double var_scale = n / (n0 * n1 * (n - 2.0));
    raw_sq = 0.0;
    correction = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double m1 = scratch[k] / n1;
        const double m0 = (p.col_sum[k] - scratch[k]) / n0;
        const double beta = m1 - m0;
        // within-group sum of squares = SSR of the indicator regression
        double ssr = p.col_sumsq[k] - n0 * m0 * m0 - n1 * m1 * m1;
        if (ssr < 0.0) ssr = 0.0; // guard against rounding on exact fits
        const double var = ssr * var_scale;
        raw_sq += beta * beta;
        correction += var;
        if (beta_out != nullptr) beta_out[k] = beta;
        if (var_out != nullptr) var_out[k] = var;
    }
}

constexpr std::uint64_t kSampleSalt = fnv1a64("sample-one-per-author");
constexpr std::uint64_t kPermuteSalt = fnv1a64("permutation-null");

double percentile(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

EmbeddingRegressionFit embedding_regression(
    const std::vector<ContextObservation>& obs) {
    const Packed p = pack(obs);
    EmbeddingRegressionFit fit;
    fit.n_obs = p.n;
    fit.n_per_group = {p.n0, p.n1};
    fit.coefficients.resize(p.d);
    fit.coefficient_variances.resize(p.d);
    std::vector<double> scratch(p.d);
    double raw = 0.0, corr = 0.0;
    two_group_estimate(p, p.group1_rows.data(), scratch.data(), raw, corr,
                       fit.coefficients.data(), fit.coefficient_variances.data());
    return fit;
}

DistanceEstimate corrected_squared_distance(const EmbeddingRegressionFit& fit) {
    DistanceEstimate est;
    for (double c : fit.coefficients) est.raw_sq += c * c;
    for (double v : fit.coefficient_variances) est.correction += v;
    est.corrected_sq = est.raw_sq - est.correction;
    return est;
}

PermutationTest permutation_null(const std::vector<ContextObservation>& obs,
                                 int permutations, std::uint64_t seed,
                                 int threads) {
    if (permutations < 1) {
        throw AnalysisError("permutation_null: need at least one permutation");
    }
    const Packed p = pack(obs);

    PermutationTest test;
    test.null_dist.seed = seed;
    test.null_dist.permutations = permutations;
    test.null_dist.estimates.resize(static_cast<std::size_t>(permutations));

    std::vector<double> scratch(p.d);
    double raw = 0.0, corr = 0.0;
    two_group_estimate(p, p.group1_rows.data(), scratch.data(), raw, corr);
    test.estimate.raw_sq = raw;
    test.estimate.correction = corr;
    test.estimate.corrected_sq = raw - corr;

    const std::uint32_t n32 = static_cast<std::uint32_t>(p.n);
    const std::uint32_t k32 = static_cast<std::uint32_t>(p.n1);
    parallel_for(static_cast<std::size_t>(permutations), threads,
                 [&](std::size_t begin, std::size_t end) {
                     std::vector<double> local_scratch(p.d);
                     for (std::size_t i = begin; i < end; ++i) {
                         RandomStream rng(mix_seed(seed, i));
                         const auto rows = rng.sample_indices(n32, k32);
                         double r = 0.0, c = 0.0;
                         two_group_estimate(p, rows.data(), local_scratch.data(), r, c);
                         test.null_dist.estimates[i] = r - c;
                     }
                 });

    std::size_t at_least = 0;
    for (double v : test.null_dist.estimates) {
        if (v >= test.estimate.corrected_sq) ++at_least;
    }
    test.estimate.p_value = static_cast<double>(1 + at_least) /
                            static_cast<double>(1 + permutations);

    std::vector<double> sorted = test.null_dist.estimates;
    std::sort(sorted.begin(), sorted.end());
    test.estimate.null_ci = {{percentile(sorted, 0.025), percentile(sorted, 0.975)}};
    return test;
}

// ---------------------------------------------------------------------------
// Single-target pipeline

TargetAnalysis analyze_target(const DocumentSet& docs, const GroupMap& groups,
                              const std::string& target,
                              const EmbeddingTable& table,
                              const DistanceConfig& config, std::uint64_t seed) {
    TargetAnalysis analysis;
    analysis.target = target;
    analysis.dim = table.dim;
    analysis.seed = seed;

    // labeled authors only, documents that mention the target
    DocumentSet mentioning;
    mentioning.provenance = docs.provenance + " | target " + target;
    for (const auto& doc : docs.docs) {
        if (!groups.count(doc.author_id)) continue;
        if (std::find(doc.tokens.begin(), doc.tokens.end(), target) !=
            doc.tokens.end()) {
            mentioning.docs.push_back(doc);
        }
    }
    if (mentioning.empty()) {
        analysis.skipped_reason = "no documents mention target";
        return analysis;
    }

    DocumentSet sampled =
        sample_one_per_author(mentioning, mix_seed(seed, kSampleSalt));
    if (config.min_count > 1) {
        sampled = apply_min_count(sampled, config.min_count);
    }

    std::vector<std::optional<ContextObservation>> slots(sampled.size());
    parallel_for(sampled.size(), config.threads,
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t i = begin; i < end; ++i) {
                         const Document& doc = sampled.docs[i];
                         const auto windows =
                             extract_contexts(doc, target, config.window);
                         auto vec = context_vector(windows, table);
                         if (!vec) continue;
                         ContextObservation o;
                         o.author_id = doc.author_id;
                         o.group = groups.at(doc.author_id);
                         o.vector = std::move(*vec);
                         slots[i] = std::move(o);
                     }
                 });

    std::vector<ContextObservation> obs;
    obs.reserve(sampled.size());
    for (auto& slot : slots) {
        if (slot) {
            ++analysis.n_users[static_cast<std::size_t>(slot->group)];
            obs.push_back(std::move(*slot));
        } else {
            ++analysis.dropped_docs;
        }
    }

    const std::size_t user_floor = std::max<std::size_t>(config.min_users, 2);
    if (analysis.n_users[0] < user_floor || analysis.n_users[1] < user_floor) {
        analysis.skipped_reason =
            "below min_users (" + std::to_string(analysis.n_users[0]) + "/" +
            std::to_string(analysis.n_users[1]) + " users, need " +
            std::to_string(user_floor) + " per group)";
        return analysis;
    }

    if (config.permutations > 0) {
        PermutationTest test =
            permutation_null(obs, config.permutations,
                             mix_seed(seed, kPermuteSalt), config.threads);
        analysis.estimate = test.estimate;
        analysis.null_dist = std::move(test.null_dist);
    } else {
        analysis.estimate = corrected_squared_distance(embedding_regression(obs));
    }
    return analysis;
}

} // namespace langdiv
