#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace langdiv {

// ---------------------------------------------------------------------------
// Timestamps

// Parses an ISO-8601 timestamp ("2020-03-31", "2020-03-31T23:59:59Z",
// "2020-03-31T23:59:59+05:00", fractional seconds tolerated) to UTC epoch
// seconds. A missing offset means UTC. Returns nullopt on malformed input.
std::optional<std::int64_t> parse_iso8601_utc(std::string_view s);

std::string format_iso8601_utc(std::int64_t epoch_seconds);

struct YearMonth {
    int year = 0;
    int month = 0; // 1..12
    auto operator<=>(const YearMonth&) const = default;
    std::string str() const; // "YYYY-MM"
};

YearMonth year_month_utc(std::int64_t epoch_seconds);

// ---------------------------------------------------------------------------
// Tokenization

struct TokenRules {
    bool remove_punctuation = true;
    bool remove_symbols = true;
    bool remove_numbers = true; // drops tokens consisting only of digits
    bool remove_urls = true;
    bool remove_hashtags = true;
    bool remove_mentions = true;
    bool split_hyphens = true;
    bool remove_separators = true; // format/control characters inside tokens
    bool lowercase = true;
};

// Social-media tokenizer. Hashtag (#...), mention (@...) and URL chunks are
// dropped whole before any character stripping, hyphenated words split into
// their fragments, punctuation/symbol code points stripped, digit-only tokens
// dropped. Unicode separator and control characters are token boundaries.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenRules& rules = {});

// ---------------------------------------------------------------------------
// Documents and authors

struct Document {
    std::string doc_id;
    std::string author_id;
    std::int64_t timestamp = 0; // UTC epoch seconds
    std::string text;
    std::vector<std::string> tokens; // filled by tokenize_documents
};

struct DocumentSet {
    std::vector<Document> docs;
    std::string provenance;

    std::size_t size() const { return docs.size(); }
    bool empty() const { return docs.empty(); }
};

// author_id -> {0, 1} group labels for a two-group comparison.
using GroupMap = std::unordered_map<std::string, int>;

struct AuthorTable {
    // author_id -> attribute name -> value; names and values lowercase,
    // empty values absent.
    std::unordered_map<std::string, std::unordered_map<std::string, std::string>>
        authors;

    // Authors whose `attribute` equals group0 map to 0, group1 to 1; authors
    // with other values or without the attribute are excluded.
    GroupMap binary_groups(const std::string& attribute,
                           const std::string& group0,
                           const std::string& group1) const;
};

enum class CorpusFormat { jsonl, csv };

struct RecordError {
    std::size_t line = 0;
    std::string message;
};

struct CorpusLoad {
    DocumentSet docs;
    std::vector<RecordError> errors; // rejected records, by input line
};

// JSONL: one object per line with keys doc_id, author_id, timestamp, text.
// CSV: header row with the same column names. Records missing a required
// field or carrying an unparsable timestamp are rejected into `errors`.
// Duplicate doc_id across accepted records is a hard DataError.
CorpusLoad load_corpus(const std::string& path, CorpusFormat format);

// CSV with header: first column author_id, remaining columns attributes.
// Duplicate author_id and attribute-less files are DataErrors.
AuthorTable load_authors(const std::string& path);

void tokenize_documents(DocumentSet& set, const TokenRules& rules = {},
                        int threads = 0);

// ---------------------------------------------------------------------------
// Analysis subsets

// Keeps documents whose token set intersects seed_terms and, when co_terms is
// given, also intersects co_terms. Exact-token matching.
DocumentSet subset_by_keywords(
    const DocumentSet& docs, const std::unordered_set<std::string>& seed_terms,
    const std::optional<std::unordered_set<std::string>>& co_terms = std::nullopt);

// Exactly one uniformly chosen document per author. The choice for an author
// depends only on (seed, author_id, that author's documents in input order),
// so it is reproducible and insensitive to other authors' data.
DocumentSet sample_one_per_author(const DocumentSet& docs, std::uint64_t seed);

// Removes token types with corpus frequency < k from every document; emptied
// documents are retained.
DocumentSet apply_min_count(const DocumentSet& docs, std::size_t k);

// UTC calendar-month buckets; months with no documents are absent.
std::map<YearMonth, DocumentSet> bucket_by_month(const DocumentSet& docs);

// The four keyword categories used for topic subsets: education, pandemic,
// partisanship, flashpoints.
const std::map<std::string, std::vector<std::string>>& keyword_categories();

} // namespace langdiv
