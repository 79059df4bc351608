#pragma once

#include "langdiv/corpus.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace langdiv {

struct EmbeddingTable {
    std::size_t dim = 0;
    std::vector<std::string> terms;                   // row -> term
    std::unordered_map<std::string, std::size_t> index; // term -> row
    std::vector<double> values;                       // row-major, terms x dim

    const double* find(const std::string& term) const {
        auto it = index.find(term);
        return it == index.end() ? nullptr : values.data() + it->second * dim;
    }
    std::size_t size() const { return terms.size(); }
    void add(std::string term, const double* vec); // first occurrence wins
};

struct EmbeddingLoad {
    EmbeddingTable table;
    std::vector<std::string> warnings; // e.g. duplicate terms
};

// Text format: one term per line followed by whitespace-separated floats.
// The first line fixes the dimension; a line with a different dimension is a
// DataError naming the line. Duplicate terms keep the first vector.
EmbeddingLoad load_embeddings(const std::string& path);

// For each occurrence of target: up to `window` tokens on each side, target
// itself excluded (including other occurrences falling inside the window),
// truncated at document boundaries.
std::vector<std::vector<std::string>> extract_contexts(const Document& doc,
                                                       const std::string& target,
                                                       int window);

// Average embedding of all in-vocabulary tokens pooled across the document's
// windows; nullopt when none are in vocabulary.
std::optional<std::vector<double>> context_vector(
    const std::vector<std::vector<std::string>>& windows,
    const EmbeddingTable& table);

struct ContextObservation {
    std::string author_id;
    int group = 0; // 0 or 1
    std::vector<double> vector;
};

struct EmbeddingRegressionFit {
    std::vector<double> coefficients;          // per-dimension group-1 slope
    std::vector<double> coefficient_variances; // homoskedastic OLS variances
    std::size_t n_obs = 0;
    std::array<std::size_t, 2> n_per_group{};
};

// Per-dimension OLS of the context-vector component on intercept + group
// indicator. For this design the slope equals the group mean difference and
// its variance sigma2 * n/(n0*n1); both groups need >= 2 observations.
EmbeddingRegressionFit embedding_regression(
    const std::vector<ContextObservation>& obs);

struct DistanceEstimate {
    double raw_sq = 0.0;       // sum of squared coefficients
    double correction = 0.0;   // sum of coefficient variances
    double corrected_sq = 0.0; // raw_sq - correction, never truncated
    std::optional<double> p_value;
    std::optional<std::array<double, 2>> null_ci; // 2.5 / 97.5 percentiles
};

DistanceEstimate corrected_squared_distance(const EmbeddingRegressionFit& fit);

struct NullDistribution {
    std::vector<double> estimates; // corrected_sq under label permutation
    std::uint64_t seed = 0;
    int permutations = 0;
};

struct PermutationTest {
    DistanceEstimate estimate; // p_value and null_ci filled in
    NullDistribution null_dist;
};

// P group-size-preserving label permutations, each re-running the identical
// estimator; p = (1 + #{null >= observed}) / (1 + P). Replicate i draws from
// a stream derived from (seed, i), so results do not depend on thread count.
PermutationTest permutation_null(const std::vector<ContextObservation>& obs,
                                 int permutations, std::uint64_t seed,
                                 int threads = 0);

// ---------------------------------------------------------------------------
// Single-target pipeline: subset -> sample one per author -> min-count ->
// contexts -> regression -> corrected distance -> permutation null.

struct DistanceConfig {
    int window = 6;
    int permutations = 1000; // 0 skips the permutation test
    std::size_t min_count = 5;
    std::size_t min_users = 2; // per group; below it the analysis is skipped
    int threads = 0;
};

struct TargetAnalysis {
    std::string target;
    std::array<std::size_t, 2> n_users{};
    std::size_t dim = 0;
    std::size_t dropped_docs = 0; // sampled docs with no in-vocab context
    std::uint64_t seed = 0;
    std::optional<DistanceEstimate> estimate; // absent when skipped
    NullDistribution null_dist;
    std::string skipped_reason; // nonempty when skipped
};

// Deterministic given (docs, groups, seed): sampling and permutations use
// streams derived from `seed`. Documents of unlabeled authors are ignored.
TargetAnalysis analyze_target(const DocumentSet& docs, const GroupMap& groups,
                              const std::string& target,
                              const EmbeddingTable& table,
                              const DistanceConfig& config, std::uint64_t seed);

} // namespace langdiv
