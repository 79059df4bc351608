#include "langdiv/lexicon.hpp"

#include "langdiv/csv.hpp"
#include "langdiv/errors.hpp"
#include "langdiv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace langdiv {

std::optional<Foundation> foundation_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kFoundationNames.size(); ++i) {
        if (s == kFoundationNames[i]) return static_cast<Foundation>(i);
    }
    return std::nullopt;
}

std::optional<Valence> valence_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kValenceNames.size(); ++i) {
        if (s == kValenceNames[i]) return static_cast<Valence>(i);
    }
    return std::nullopt;
}

MoralDictionary MoralDictionary::from_entries(std::vector<DictionaryEntry> entries) {
    MoralDictionary dict;
    std::set<std::tuple<std::string, int, int>> seen;
    for (const auto& e : entries) {
        const auto key = std::make_tuple(e.pattern + (e.wildcard ? "*" : ""),
                                         static_cast<int>(e.foundation),
                                         static_cast<int>(e.valence));
        if (!seen.insert(key).second) {
            throw DataError("duplicate dictionary entry: " + std::get<0>(key));
        }
        const std::uint16_t bit =
            static_cast<std::uint16_t>(1u << category_index(e.foundation, e.valence));
        if (e.wildcard) {
            dict.stems_[e.pattern] |= bit;
            dict.max_stem_length_ = std::max(dict.max_stem_length_, e.pattern.size());
        } else {
            dict.exact_[e.pattern] |= bit;
        }
    }
    dict.entries_ = std::move(entries);
    return dict;
}

std::uint16_t MoralDictionary::match_mask(std::string_view token) const {
    std::uint16_t mask = 0;
    if (!exact_.empty()) {
        const auto it = exact_.find(std::string(token));
        if (it != exact_.end()) mask |= it->second;
    }
    if (!stems_.empty()) {
        const std::size_t limit = std::min(token.size(), max_stem_length_);
        std::string prefix;
        prefix.reserve(limit);
        for (std::size_t len = 1; len <= limit; ++len) {
            prefix.assign(token.substr(0, len));
            const auto it = stems_.find(prefix);
            if (it != stems_.end()) mask |= it->second;
        }
    }
    return mask;
}

std::vector<std::pair<Foundation, Valence>> MoralDictionary::match_token(
    std::string_view token) const {
    std::vector<std::pair<Foundation, Valence>> out;
    const std::uint16_t mask = match_mask(token);
    for (int i = 0; i < 10; ++i) {
        if (mask & (1u << i)) {
            out.emplace_back(static_cast<Foundation>(i / 2),
                             static_cast<Valence>(i % 2));
        }
    }
    return out;
}

MoralDictionary load_moral_dictionary(const std::string& path,
                                      bool enable_wildcards) {
    const CsvTable table = read_csv(path);
    const int pat_col = table.column("pattern");
    const int fnd_col = table.column("foundation");
    const int val_col = table.column("valence");
    if (pat_col < 0 || fnd_col < 0 || val_col < 0) {
        throw DataError(path + ": dictionary CSV needs pattern, foundation, valence");
    }
    std::vector<DictionaryEntry> entries;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string row_id = " at line " + std::to_string(table.row_lines[r]);
        if (row.size() < 3) throw DataError(path + ": too few columns" + row_id);
        DictionaryEntry e;
        e.pattern = row[static_cast<std::size_t>(pat_col)];
        if (e.pattern.empty()) throw DataError(path + ": empty pattern" + row_id);
        const auto f = foundation_from_string(row[static_cast<std::size_t>(fnd_col)]);
        if (!f) {
            throw DataError(path + ": unknown foundation '" +
                            row[static_cast<std::size_t>(fnd_col)] + "'" + row_id);
        }
        const auto v = valence_from_string(row[static_cast<std::size_t>(val_col)]);
        if (!v) {
            throw DataError(path + ": unknown valence '" +
                            row[static_cast<std::size_t>(val_col)] + "'" + row_id);
        }
        e.foundation = *f;
        e.valence = *v;
        if (e.pattern.back() == '*') {
            e.pattern.pop_back();
            if (e.pattern.empty()) {
                throw DataError(path + ": bare wildcard pattern" + row_id);
            }
            e.wildcard = enable_wildcards;
        }
        entries.push_back(std::move(e));
    }
    return MoralDictionary::from_entries(std::move(entries));
}

UserMoralProfile user_moral_profile(const std::vector<const Document*>& user_docs,
                                    const MoralDictionary& dict) {
    if (user_docs.empty()) {
        throw AnalysisError("user_moral_profile: empty document list");
    }
    UserMoralProfile profile;
    profile.author_id = user_docs.front()->author_id;
    profile.n_docs = user_docs.size();

    std::array<std::size_t, 10> doc_hits{};
    std::size_t total_tokens = 0;
    for (const Document* doc : user_docs) {
        if (doc->author_id != profile.author_id) {
            throw AnalysisError("user_moral_profile: mixed author_ids");
        }
        std::uint16_t mask = 0;
        for (const auto& tok : doc->tokens) {
            mask |= dict.match_mask(tok);
            if (mask == 0x3FF) break; // all categories hit
        }
        for (int i = 0; i < 10; ++i) {
            if (mask & (1u << i)) ++doc_hits[static_cast<std::size_t>(i)];
        }
        total_tokens += doc->tokens.size();
    }
    for (int i = 0; i < 10; ++i) {
        profile.fractions[static_cast<std::size_t>(i)] =
            static_cast<double>(doc_hits[static_cast<std::size_t>(i)]) /
            static_cast<double>(profile.n_docs);
    }
    const double mean_tokens =
        static_cast<double>(total_tokens) / static_cast<double>(profile.n_docs);
    profile.log_mean_tokens = std::log1p(mean_tokens);
    return profile;
}

std::vector<UserMoralProfile> compute_profiles(const DocumentSet& docs,
                                               const MoralDictionary& dict,
                                               int threads) {
    std::unordered_map<std::string_view, std::vector<const Document*>> by_author;
    for (const auto& doc : docs.docs) {
        by_author[doc.author_id].push_back(&doc);
    }
    std::vector<const std::vector<const Document*>*> groups;
    groups.reserve(by_author.size());
    for (const auto& [_, v] : by_author) groups.push_back(&v);

    std::vector<UserMoralProfile> profiles(groups.size());
    parallel_for(groups.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            profiles[i] = user_moral_profile(*groups[i], dict);
        }
    });
    std::sort(profiles.begin(), profiles.end(),
              [](const auto& a, const auto& b) { return a.author_id < b.author_id; });
    return profiles;
}

GapEstimate moral_gap_regression(const std::vector<UserMoralProfile>& profiles,
                                 const GroupMap& groups, Foundation foundation,
                                 Valence valence, HcFlavor flavor) {
    const Eigen::Index n = static_cast<Eigen::Index>(profiles.size());
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    std::array<std::size_t, 2> group_sizes{};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = profiles[static_cast<std::size_t>(i)];
        const auto it = groups.find(p.author_id);
        if (it == groups.end()) {
            throw AnalysisError("moral_gap_regression: no group label for author " +
                                p.author_id);
        }
        ++group_sizes[static_cast<std::size_t>(it->second)];
        X(i, 0) = 1.0;
        X(i, 1) = static_cast<double>(it->second);
        X(i, 2) = p.log_mean_tokens;
        y(i) = p.fraction(foundation, valence);
    }
    if (group_sizes[0] < 2 || group_sizes[1] < 2) {
        throw AnalysisError("moral_gap_regression: need >=2 users in each group");
    }

    const RegressionFit fit =
        ols_fit(X, y, {"intercept", "group", "log_mean_tokens"}, flavor);
    const Eigen::Index gi = fit.index_of("group");
    if (gi < 0) {
        throw AnalysisError("moral_gap_regression: group indicator dropped");
    }
    GapEstimate gap;
    gap.foundation = foundation;
    gap.valence = valence;
    gap.coefficient = fit.coefficients(gi);
    gap.robust_se = robust_se(fit, flavor)(gi);
    const auto [lo, hi] = confidence_interval(fit, gi, 0.95);
    gap.ci_low = lo;
    gap.ci_high = hi;
    gap.n_users = profiles.size();
    gap.dropped_covariates = fit.dropped_columns;
    return gap;
}

} // namespace langdiv
