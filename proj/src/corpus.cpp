#include "langdiv/corpus.hpp"

#include "langdiv/csv.hpp"
#include "langdiv/errors.hpp"
#include "langdiv/parallel.hpp"
#include "langdiv/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <unordered_set>

namespace langdiv {

// ---------------------------------------------------------------------------
// Timestamps (proleptic Gregorian, UTC)

namespace {

constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
    std::int64_t year;
    unsigned month, day;
};

constexpr CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

int days_in_month(int y, int m) {
    static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len,
                     int& out) {
    if (pos + len > s.size()) return false;
    int value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        const char c = s[i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

} // namespace

std::optional<std::int64_t> parse_iso8601_utc(std::string_view s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);

    int year, month, day;
    if (!parse_fixed_int(s, 0, 4, year)) return std::nullopt;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!parse_fixed_int(s, 5, 2, month) || !parse_fixed_int(s, 8, 2, day)) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
        return std::nullopt;
    }

    int hour = 0, minute = 0, second = 0;
    std::int64_t offset_seconds = 0;
    std::size_t pos = 10;
    if (pos < s.size()) {
        if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
        ++pos;
        if (!parse_fixed_int(s, pos, 2, hour)) return std::nullopt;
        if (pos + 5 > s.size() || s[pos + 2] != ':') return std::nullopt;
        if (!parse_fixed_int(s, pos + 3, 2, minute)) return std::nullopt;
        pos += 5;
        if (pos < s.size() && s[pos] == ':') {
            if (!parse_fixed_int(s, pos + 1, 2, second)) return std::nullopt;
            pos += 3;
        }
        if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
        if (second == 60) second = 59; // clamp leap seconds
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        }
        if (pos < s.size()) {
            const char c = s[pos];
            if (c == 'Z' || c == 'z') {
                ++pos;
            } else if (c == '+' || c == '-') {
                int oh, om = 0;
                if (!parse_fixed_int(s, pos + 1, 2, oh)) return std::nullopt;
                std::size_t opos = pos + 3;
                if (opos < s.size() && s[opos] == ':') ++opos;
                if (opos < s.size()) {
                    if (!parse_fixed_int(s, opos, 2, om)) return std::nullopt;
                    opos += 2;
                }
                if (oh > 23 || om > 59) return std::nullopt;
                offset_seconds = (c == '+' ? 1 : -1) *
                                 (static_cast<std::int64_t>(oh) * 3600 + om * 60);
                pos = opos;
            } else {
                return std::nullopt;
            }
        }
        if (pos != s.size()) return std::nullopt;
    }

    const std::int64_t days =
        days_from_civil(year, static_cast<unsigned>(month),
                        static_cast<unsigned>(day));
    return days * 86400 + hour * 3600 + minute * 60 + second - offset_seconds;
}

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    const CivilDate date = civil_from_days(days);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(date.year), date.month, date.day,
                  static_cast<long long>(rem / 3600),
                  static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::string YearMonth::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    return buf;
}

YearMonth year_month_utc(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    if (epoch_seconds % 86400 < 0) --days;
    const CivilDate date = civil_from_days(days);
    return {static_cast<int>(date.year), static_cast<int>(date.month)};
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

enum class CharKind {
    letter,
    digit,
    separator, // token boundary
    format,    // zero-width/format char, strippable inside tokens
    hyphen,
    other // punctuation and symbols
};

bool in_range(char32_t c, char32_t lo, char32_t hi) { return c >= lo && c <= hi; }

CharKind classify(char32_t c) {
    if (c < 0x80) {
        if (c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r' ||
            c == ' ') {
            return CharKind::separator;
        }
        if (c < 0x20 || c == 0x7F) return CharKind::separator;
        if (c >= '0' && c <= '9') return CharKind::digit;
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
            return CharKind::letter;
        }
        if (c == '-') return CharKind::hyphen;
        return CharKind::other;
    }
    // Unicode separators (Zs/Zl/Zp) and C1 controls
    if (c == 0x85 || c == 0xA0 || c == 0x1680 || in_range(c, 0x2000, 0x200A) ||
        c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000) {
        return CharKind::separator;
    }
    if (in_range(c, 0x80, 0x9F)) return CharKind::separator;
    // format characters (Cf): soft hyphen, zero-width and directional marks, BOM
    if (c == 0xAD || in_range(c, 0x200B, 0x200F) || in_range(c, 0x202A, 0x202E) ||
        in_range(c, 0x2060, 0x2064) || c == 0xFEFF) {
        return CharKind::format;
    }
    // dash punctuation used for hyphen splitting
    if (c == 0x2010 || c == 0x2011) return CharKind::hyphen;
    // common letter blocks; everything unrecognized falls through to `other`
    if (in_range(c, 0xC0, 0xFF) && c != 0xD7 && c != 0xF7) return CharKind::letter;
    if (in_range(c, 0x100, 0x2AF)) return CharKind::letter;   // Latin ext, IPA
    if (in_range(c, 0x370, 0x3FF) && c != 0x37E && c != 0x387) {
        return CharKind::letter;                              // Greek
    }
    if (in_range(c, 0x400, 0x4FF)) return CharKind::letter;   // Cyrillic
    if (in_range(c, 0x531, 0x58A) && c != 0x589) return CharKind::letter;
    if (in_range(c, 0x5D0, 0x5EA)) return CharKind::letter;   // Hebrew
    if (in_range(c, 0x620, 0x64A)) return CharKind::letter;   // Arabic
    if (in_range(c, 0x660, 0x669)) return CharKind::digit;    // Arabic-Indic
    if (in_range(c, 0x905, 0x939)) return CharKind::letter;   // Devanagari
    if (in_range(c, 0x966, 0x96F)) return CharKind::digit;
    if (in_range(c, 0xE01, 0xE2E)) return CharKind::letter;   // Thai
    if (in_range(c, 0x1E00, 0x1EFF)) return CharKind::letter; // Latin ext add.
    if (in_range(c, 0x3041, 0x3096)) return CharKind::letter; // Hiragana
    if (in_range(c, 0x30A1, 0x30FA)) return CharKind::letter; // Katakana
    if (in_range(c, 0x4E00, 0x9FFF)) return CharKind::letter; // CJK
    if (in_range(c, 0xAC00, 0xD7A3)) return CharKind::letter; // Hangul
    return CharKind::other;
}

char32_t to_lower_cp(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 0x20;
    if (in_range(c, 0xC0, 0xDE) && c != 0xD7) return c + 0x20;  // Latin-1
    if (in_range(c, 0x391, 0x3A9) && c != 0x3A2) return c + 0x20; // Greek
    if (in_range(c, 0x410, 0x42F)) return c + 0x20;             // Cyrillic
    if (in_range(c, 0x400, 0x40F)) return c + 0x50;
    return c;
}

void append_utf8(std::string& out, char32_t c) {
    if (c < 0x80) {
        out += static_cast<char>(c);
    } else if (c < 0x800) {
        out += static_cast<char>(0xC0 | (c >> 6));
        out += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
        out += static_cast<char>(0xE0 | (c >> 12));
        out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (c >> 18));
        out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (c & 0x3F));
    }
}

// Decodes the code point at pos, advancing pos. Invalid bytes decode to
// U+FFFD and advance by one.
char32_t decode_utf8(std::string_view s, std::size_t& pos) {
    const unsigned char b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return 0xFFFD;
    }
    if (pos + static_cast<std::size_t>(len) > s.size()) {
        ++pos;
        return 0xFFFD;
    }
    for (int i = 1; i < len; ++i) {
        const unsigned char b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += static_cast<std::size_t>(len);
    return cp;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) {
            return false;
        }
    }
    return true;
}

bool looks_like_url(std::string_view chunk) {
    return starts_with_ci(chunk, "http://") || starts_with_ci(chunk, "https://") ||
           starts_with_ci(chunk, "www.");
}

// Processes one whitespace-delimited chunk into zero or more tokens.
void process_chunk(std::string_view chunk, const TokenRules& rules,
                   std::vector<std::string>& out) {
    if (chunk.empty()) return;
    if (rules.remove_hashtags && chunk.front() == '#') return;
    if (rules.remove_mentions && chunk.front() == '@') return;
    if (rules.remove_urls && looks_like_url(chunk)) return;

    std::string token;
    bool has_non_digit = false;
    auto flush = [&] {
        if (!token.empty()) {
            if (!(rules.remove_numbers && !has_non_digit)) {
                out.push_back(std::move(token));
            }
            token.clear();
        }
        has_non_digit = false;
    };

    std::size_t pos = 0;
    while (pos < chunk.size()) {
        const char32_t cp = decode_utf8(chunk, pos);
        switch (classify(cp)) {
        case CharKind::letter:
            append_utf8(token, rules.lowercase ? to_lower_cp(cp) : cp);
            has_non_digit = true;
            break;
        case CharKind::digit:
            append_utf8(token, cp);
            break;
        case CharKind::hyphen:
            if (rules.split_hyphens) {
                flush();
            } else if (!rules.remove_punctuation) {
                append_utf8(token, cp);
                has_non_digit = true;
            }
            break;
        case CharKind::separator:
            flush();
            break;
        case CharKind::format:
            if (!rules.remove_separators) {
                append_utf8(token, cp);
                has_non_digit = true;
            }
            break;
        case CharKind::other: {
            const bool ascii_punct = cp < 0x80 && std::ispunct(static_cast<int>(cp));
            const bool keep = ascii_punct ? !rules.remove_punctuation
                                          : !rules.remove_symbols;
            if (keep) {
                append_utf8(token, cp);
                has_non_digit = true;
            }
            break;
        }
        }
    }
    flush();
}

} // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenRules& rules) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    std::size_t pos = 0;
    // split on ASCII whitespace and Unicode separators/controls first, so
    // hashtag/mention/URL chunks can be dropped whole
    std::size_t scan = 0;
    while (scan < text.size()) {
        pos = scan;
        const char32_t cp = decode_utf8(text, scan);
        if (classify(cp) == CharKind::separator) {
            if (pos > start) process_chunk(text.substr(start, pos - start), rules, tokens);
            start = scan;
        }
    }
    if (text.size() > start) {
        process_chunk(text.substr(start, text.size() - start), rules, tokens);
    }
    return tokens;
}

// ---------------------------------------------------------------------------
// Loaders

namespace {

void check_duplicate_ids(const DocumentSet& set) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(set.docs.size());
    for (const auto& doc : set.docs) {
        if (!seen.insert(doc.doc_id).second) {
            throw DataError("duplicate doc_id: " + doc.doc_id);
        }
    }
}

CorpusLoad load_corpus_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);

    CorpusLoad result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            result.errors.push_back({line_no, "invalid JSON object"});
            continue;
        }
        Document doc;
        bool bad = false;
        for (const char* key : {"doc_id", "author_id", "timestamp", "text"}) {
            if (!record.contains(key) || !record[key].is_string()) {
                result.errors.push_back(
                    {line_no, std::string("missing required field: ") + key});
                bad = true;
                break;
            }
        }
        if (bad) continue;
        doc.doc_id = record["doc_id"].get<std::string>();
        doc.author_id = record["author_id"].get<std::string>();
        doc.text = record["text"].get<std::string>();
        const auto ts = parse_iso8601_utc(record["timestamp"].get<std::string>());
        if (!ts) {
            result.errors.push_back({line_no, "unparsable timestamp: " +
                                                  record["timestamp"].get<std::string>()});
            continue;
        }
        doc.timestamp = *ts;
        result.docs.docs.push_back(std::move(doc));
    }
    check_duplicate_ids(result.docs);
    result.docs.provenance = "load:" + path;
    return result;
}

CorpusLoad load_corpus_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    CorpusLoad result;
    result.docs.provenance = "load:" + path;
    if (table.header.empty() && table.rows.empty()) return result;

    const int id_col = table.column("doc_id");
    const int author_col = table.column("author_id");
    const int ts_col = table.column("timestamp");
    const int text_col = table.column("text");
    if (id_col < 0 || author_col < 0 || ts_col < 0 || text_col < 0) {
        throw DataError(path +
                        ": corpus CSV needs doc_id, author_id, timestamp, text columns");
    }
    const std::size_t needed = static_cast<std::size_t>(
        std::max({id_col, author_col, ts_col, text_col}) + 1);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.row_lines[r];
        if (row.size() < needed) {
            result.errors.push_back({line, "too few columns"});
            continue;
        }
        Document doc;
        doc.doc_id = row[static_cast<std::size_t>(id_col)];
        doc.author_id = row[static_cast<std::size_t>(author_col)];
        doc.text = row[static_cast<std::size_t>(text_col)];
        if (doc.doc_id.empty() || doc.author_id.empty()) {
            result.errors.push_back({line, "missing required field"});
            continue;
        }
        const auto ts = parse_iso8601_utc(row[static_cast<std::size_t>(ts_col)]);
        if (!ts) {
            result.errors.push_back(
                {line, "unparsable timestamp: " + row[static_cast<std::size_t>(ts_col)]});
            continue;
        }
        doc.timestamp = *ts;
        result.docs.docs.push_back(std::move(doc));
    }
    check_duplicate_ids(result.docs);
    return result;
}

std::string to_lower_ascii(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace

CorpusLoad load_corpus(const std::string& path, CorpusFormat format) {
    return format == CorpusFormat::jsonl ? load_corpus_jsonl(path)
                                         : load_corpus_csv(path);
}

AuthorTable load_authors(const std::string& path) {
    const CsvTable table = read_csv(path);
    if (table.header.empty()) throw DataError(path + ": empty authors file");
    if (table.header[0] != "author_id") {
        throw DataError(path + ": first column must be author_id");
    }
    if (table.header.size() < 2) {
        throw DataError(path + ": no attribute columns");
    }
    std::vector<std::string> attr_names;
    for (std::size_t j = 1; j < table.header.size(); ++j) {
        attr_names.push_back(to_lower_ascii(table.header[j]));
    }
    AuthorTable authors;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.empty() || row[0].empty()) {
            throw DataError(path + ": missing author_id at line " +
                            std::to_string(table.row_lines[r]));
        }
        auto [it, inserted] = authors.authors.try_emplace(row[0]);
        if (!inserted) {
            throw DataError(path + ": duplicate author_id: " + row[0]);
        }
        for (std::size_t j = 1; j < row.size() && j <= attr_names.size(); ++j) {
            if (row[j].empty()) continue; // absent attribute
            it->second[attr_names[j - 1]] = to_lower_ascii(row[j]);
        }
    }
    return authors;
}

GroupMap AuthorTable::binary_groups(const std::string& attribute,
                                    const std::string& group0,
                                    const std::string& group1) const {
    GroupMap map;
    for (const auto& [id, attrs] : authors) {
        const auto it = attrs.find(attribute);
        if (it == attrs.end()) continue;
        if (it->second == group0) {
            map.emplace(id, 0);
        } else if (it->second == group1) {
            map.emplace(id, 1);
        }
    }
    return map;
}

void tokenize_documents(DocumentSet& set, const TokenRules& rules, int threads) {
    parallel_for(set.docs.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            set.docs[i].tokens = tokenize(set.docs[i].text, rules);
        }
    });
}

// ---------------------------------------------------------------------------
// Analysis subsets

DocumentSet subset_by_keywords(
    const DocumentSet& docs, const std::unordered_set<std::string>& seed_terms,
    const std::optional<std::unordered_set<std::string>>& co_terms) {
    if (seed_terms.empty()) {
        throw AnalysisError("subset_by_keywords: empty seed term set");
    }
    DocumentSet out;
    out.provenance = docs.provenance + " | keyword subset";
    for (const auto& doc : docs.docs) {
        bool has_seed = false;
        bool has_co = !co_terms.has_value();
        for (const auto& tok : doc.tokens) {
            if (!has_seed && seed_terms.count(tok)) has_seed = true;
            if (!has_co && co_terms->count(tok)) has_co = true;
            if (has_seed && has_co) break;
        }
        if (has_seed && has_co) out.docs.push_back(doc);
    }
    return out;
}

DocumentSet sample_one_per_author(const DocumentSet& docs, std::uint64_t seed) {
    // positions of each author's documents, in input order
    std::unordered_map<std::string_view, std::vector<std::size_t>> by_author;
    for (std::size_t i = 0; i < docs.docs.size(); ++i) {
        by_author[docs.docs[i].author_id].push_back(i);
    }
    std::vector<char> selected(docs.docs.size(), 0);
    for (const auto& [author, positions] : by_author) {
        RandomStream rng(mix_seed(seed, fnv1a64(author)));
        selected[positions[rng.below(positions.size())]] = 1;
    }
    DocumentSet out;
    out.provenance = docs.provenance + " | one per author";
    out.docs.reserve(by_author.size());
    for (std::size_t i = 0; i < docs.docs.size(); ++i) {
        if (selected[i]) out.docs.push_back(docs.docs[i]);
    }
    return out;
}

DocumentSet apply_min_count(const DocumentSet& docs, std::size_t k) {
    if (k <= 1) return docs;
    std::unordered_map<std::string_view, std::size_t> freq;
    for (const auto& doc : docs.docs) {
        for (const auto& tok : doc.tokens) ++freq[tok];
    }
    DocumentSet out = docs;
    out.provenance = docs.provenance + " | min count " + std::to_string(k);
    for (auto& doc : out.docs) {
        std::erase_if(doc.tokens,
                      [&](const std::string& tok) { return freq.at(tok) < k; });
    }
    return out;
}

std::map<YearMonth, DocumentSet> bucket_by_month(const DocumentSet& docs) {
    std::map<YearMonth, DocumentSet> buckets;
    for (const auto& doc : docs.docs) {
        const YearMonth ym = year_month_utc(doc.timestamp);
        auto& bucket = buckets[ym];
        if (bucket.provenance.empty()) {
            bucket.provenance = docs.provenance + " | month " + ym.str();
        }
        bucket.docs.push_back(doc);
    }
    return buckets;
}

const std::map<std::string, std::vector<std::string>>& keyword_categories() {
    static const std::map<std::string, std::vector<std::string>> categories = {
        {"education", {"teachers", "students", "schools", "books"}},
        {"pandemic", {"vaccine", "remote", "masks", "distancing"}},
        {"partisanship", {"republicans", "liberals", "democrats", "conservatives"}},
        {"flashpoints", {"trans", "racism", "migrant", "guns"}},
    };
    return categories;
}

} // namespace langdiv
