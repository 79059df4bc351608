#pragma once

#include "langdiv/corpus.hpp"
#include "langdiv/embedreg.hpp"

#include <cstdint>
#include <vector>

namespace langdiv {

struct MonthlyEstimate {
    YearMonth month;
    TargetAnalysis analysis; // skipped_reason set for below-threshold months
};

// Seed driving one month's sampling and permutations. Depends only on the
// master seed and the month, so adding data to one month never changes
// another month's estimate.
std::uint64_t month_seed(std::uint64_t master_seed, YearMonth month);

// Buckets target-mentioning documents by UTC month and runs the full
// embedding-distance pipeline per month with the derived month seed. Months
// with fewer than config.min_users in either group come back as skipped
// records with the user counts recorded.
std::vector<MonthlyEstimate> monthly_distance_series(
    const DocumentSet& docs, const GroupMap& groups, const std::string& target,
    const EmbeddingTable& table, const DistanceConfig& config,
    std::uint64_t master_seed);

// Sum(w_i * corrected_sq_i) / Sum(w_i); weights must be positive and aligned.
double weighted_average_estimate(const std::vector<DistanceEstimate>& estimates,
                                 const std::vector<double>& weights);

} // namespace langdiv
