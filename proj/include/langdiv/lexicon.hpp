#pragma once

#include "langdiv/corpus.hpp"
#include "langdiv/stats.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace langdiv {

enum class Foundation { care, fairness, loyalty, authority, sanctity };
enum class Valence { vice, virtue };

inline constexpr std::array<const char*, 5> kFoundationNames = {
    "care", "fairness", "loyalty", "authority", "sanctity"};
inline constexpr std::array<const char*, 2> kValenceNames = {"vice", "virtue"};

std::optional<Foundation> foundation_from_string(std::string_view s);
std::optional<Valence> valence_from_string(std::string_view s);

// Index into the 10 foundation x valence categories.
constexpr int category_index(Foundation f, Valence v) {
    return static_cast<int>(f) * 2 + static_cast<int>(v);
}

struct DictionaryEntry {
    std::string pattern; // wildcard entries store the stem without '*'
    Foundation foundation;
    Valence valence;
    bool wildcard = false;
};

class MoralDictionary {
public:
    MoralDictionary() = default;
    // Validates the closed category sets upstream; rejects duplicate
    // (pattern, foundation, valence) triples.
    static MoralDictionary from_entries(std::vector<DictionaryEntry> entries);

    // Bitmask over category_index of every category the token matches: exact
    // entries on the whole token, wildcard stems as prefixes.
    std::uint16_t match_mask(std::string_view token) const;

    std::vector<std::pair<Foundation, Valence>> match_token(
        std::string_view token) const;

    bool matches(std::string_view token) const { return match_mask(token) != 0; }

    const std::vector<DictionaryEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<DictionaryEntry> entries_;
    std::unordered_map<std::string, std::uint16_t> exact_;
    std::unordered_map<std::string, std::uint16_t> stems_;
    std::size_t max_stem_length_ = 0;
};

// CSV with header pattern,foundation,valence. A trailing '*' marks a stem
// wildcard; with wildcards disabled such patterns match only the stem itself
// as a whole token (exact-match mode).
MoralDictionary load_moral_dictionary(const std::string& path,
                                      bool enable_wildcards = true);

struct UserMoralProfile {
    std::string author_id;
    std::size_t n_docs = 0;
    // fraction of the user's documents containing >=1 token of the category
    std::array<double, 10> fractions{};
    double log_mean_tokens = 0.0; // ln(1 + mean tokens per document)

    double fraction(Foundation f, Valence v) const {
        return fractions[static_cast<std::size_t>(category_index(f, v))];
    }
};

// All documents must share one author_id and be tokenized; empty input is an
// AnalysisError. A document counts once per category no matter how many of
// its tokens match.
UserMoralProfile user_moral_profile(const std::vector<const Document*>& user_docs,
                                    const MoralDictionary& dict);

// Per-user profiles over the whole set, sorted by author_id.
std::vector<UserMoralProfile> compute_profiles(const DocumentSet& docs,
                                               const MoralDictionary& dict,
                                               int threads = 0);

struct GapEstimate {
    Foundation foundation;
    Valence valence;
    double coefficient = 0.0; // group-1 effect relative to group 0
    double robust_se = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_users = 0;
    std::vector<std::string> dropped_covariates;
};

// OLS of the category fraction on intercept + group indicator +
// log_mean_tokens, robust SEs, 95% normal CI. Zero-variance covariates are
// dropped (reported in dropped_covariates); an empty group or an unlabeled
// profile is an AnalysisError.
GapEstimate moral_gap_regression(const std::vector<UserMoralProfile>& profiles,
                                 const GroupMap& groups, Foundation foundation,
                                 Valence valence,
                                 HcFlavor flavor = HcFlavor::hc1);

} // namespace langdiv
