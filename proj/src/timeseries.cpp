#include "langdiv/timeseries.hpp"

#include "langdiv/errors.hpp"
#include "langdiv/random.hpp"

namespace langdiv {

std::uint64_t month_seed(std::uint64_t master_seed, YearMonth month) {
    return mix_seed(master_seed, fnv1a64(month.str()));
}

std::vector<MonthlyEstimate> monthly_distance_series(
    const DocumentSet& docs, const GroupMap& groups, const std::string& target,
    const EmbeddingTable& table, const DistanceConfig& config,
    std::uint64_t master_seed) {
    const auto buckets = bucket_by_month(docs);
    std::vector<MonthlyEstimate> series;
    series.reserve(buckets.size());
    for (const auto& [month, month_docs] : buckets) {
        MonthlyEstimate entry;
        entry.month = month;
        entry.analysis = analyze_target(month_docs, groups, target, table, config,
                                        month_seed(master_seed, month));
        // months where nobody mentions the target stay absent from the series
        if (entry.analysis.skipped_reason == "no documents mention target") {
            continue;
        }
        series.push_back(std::move(entry));
    }
    return series;
}

double weighted_average_estimate(const std::vector<DistanceEstimate>& estimates,
                                 const std::vector<double>& weights) {
    if (estimates.size() != weights.size()) {
        throw AnalysisError("weighted_average_estimate: length mismatch");
    }
    if (estimates.empty()) {
        throw AnalysisError("weighted_average_estimate: empty input");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (!(weights[i] > 0.0)) {
            throw AnalysisError("weighted_average_estimate: weights must be positive");
        }
        num += weights[i] * estimates[i].corrected_sq;
        den += weights[i];
    }
    return num / den;
}

} // namespace langdiv
