#include "langdiv/synth.hpp"

#include "langdiv/csv.hpp"
#include "langdiv/errors.hpp"
#include "langdiv/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace langdiv {

void SynthSpec::validate() const {
    if (authors_per_group < 1) throw ConfigError("synth: need >=1 author per group");
    if (docs_per_author_min < 1 || docs_per_author_max < docs_per_author_min) {
        throw ConfigError("synth: bad docs-per-author range");
    }
    if (base_lexicon.empty()) throw ConfigError("synth: base lexicon empty");
    if (divergence < 0.0 || divergence > 1.0) {
        throw ConfigError("synth: divergence must be in [0, 1]");
    }
    if (divergence > 0.0 &&
        (group_lexicons[0].empty() || group_lexicons[1].empty())) {
        throw ConfigError("synth: group lexicons required when divergence > 0");
    }
    if (target_term.empty()) throw ConfigError("synth: empty target term");
    for (const auto& lex : {&base_lexicon, &group_lexicons[0], &group_lexicons[1]}) {
        if (std::find(lex->begin(), lex->end(), target_term) != lex->end()) {
            throw ConfigError("synth: lexicons must not contain the target term");
        }
    }
    if (doc_length_min < 1 || doc_length_max < doc_length_min) {
        throw ConfigError("synth: bad doc-length range");
    }
    if (time_end < time_start) throw ConfigError("synth: bad time range");
}

std::vector<std::string> numbered_tokens(const std::string& prefix,
                                         std::size_t count) {
    int width = 2;
    for (std::size_t v = 100; count > v && width < 20; v *= 10) ++width;
    std::vector<std::string> tokens;
    tokens.reserve(count);
    char buf[32];
    for (std::size_t i = 0; i < count; ++i) {
        std::snprintf(buf, sizeof(buf), "%0*llu", width,
                      static_cast<unsigned long long>(i));
        tokens.push_back(prefix + buf);
    }
    return tokens;
}

SynthCorpus generate_corpus(const SynthSpec& spec) {
    spec.validate();
    RandomStream rng(splitmix64(spec.seed));
    SynthCorpus out;
    out.docs.provenance = "synth seed " + std::to_string(spec.seed);

    std::size_t doc_counter = 0;
    char buf[32];
    for (int g = 0; g < 2; ++g) {
        const auto& group_lex = spec.group_lexicons[static_cast<std::size_t>(g)];
        for (std::size_t a = 0; a < spec.authors_per_group; ++a) {
            std::snprintf(buf, sizeof(buf), "u%d_%05zu", g, a);
            const std::string author_id = buf;
            out.authors.authors[author_id][spec.group_attribute] =
                spec.group_values[static_cast<std::size_t>(g)];

            const std::int64_t n_docs =
                rng.range(spec.docs_per_author_min, spec.docs_per_author_max);
            for (std::int64_t k = 0; k < n_docs; ++k) {
                const std::int64_t len =
                    rng.range(spec.doc_length_min, spec.doc_length_max);
                std::vector<std::string> tokens;
                tokens.reserve(static_cast<std::size_t>(len) + 1);
                for (std::int64_t t = 0; t < len; ++t) {
                    const bool from_group =
                        spec.divergence > 0.0 && rng.uniform01() < spec.divergence;
                    const auto& lex = from_group ? group_lex : spec.base_lexicon;
                    tokens.push_back(lex[rng.below(lex.size())]);
                }
                const std::size_t target_pos =
                    static_cast<std::size_t>(rng.below(tokens.size() + 1));
                tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(target_pos),
                              spec.target_term);

                Document doc;
                std::snprintf(buf, sizeof(buf), "d%07zu", doc_counter++);
                doc.doc_id = buf;
                doc.author_id = author_id;
                doc.timestamp = rng.range(spec.time_start, spec.time_end);
                for (std::size_t t = 0; t < tokens.size(); ++t) {
                    if (t > 0) doc.text += ' ';
                    doc.text += tokens[t];
                }
                out.docs.docs.push_back(std::move(doc));
            }
        }
    }
    return out;
}

EmbeddingTable generate_embeddings(const std::vector<EmbeddingGroupSpec>& lexicons,
                                   std::size_t dim, std::uint64_t seed) {
    if (dim < 1) throw ConfigError("generate_embeddings: dim must be >= 1");
    RandomStream rng(splitmix64(seed));
    EmbeddingTable table;
    table.dim = dim;
    std::vector<double> vec(dim);
    for (const auto& lex : lexicons) {
        if (!lex.offset.empty() && lex.offset.size() != dim) {
            throw ConfigError("generate_embeddings: offset length != dim");
        }
        for (const auto& token : lex.tokens) {
            for (std::size_t k = 0; k < dim; ++k) {
                const double base = lex.offset.empty() ? 0.0 : lex.offset[k];
                vec[k] = base + rng.normal();
            }
            table.add(token, vec.data()); // first occurrence wins
        }
    }
    return table;
}

std::vector<EmbeddingGroupSpec> embedding_layout(
    const SynthSpec& spec, std::size_t dim,
    const std::vector<double>& group0_offset,
    const std::vector<double>& group1_offset) {
    for (const auto* off : {&group0_offset, &group1_offset}) {
        if (!off->empty() && off->size() != dim) {
            throw ConfigError("embedding_layout: offset length != dim");
        }
    }
    std::vector<EmbeddingGroupSpec> layout;
    layout.push_back({spec.base_lexicon, {}});
    layout.push_back({spec.group_lexicons[0], group0_offset});
    layout.push_back({spec.group_lexicons[1], group1_offset});
    layout.push_back({{spec.target_term}, {}});
    return layout;
}

double population_context_distance_sq(const SynthSpec& spec,
                                      const EmbeddingTable& table) {
    std::vector<double> diff(table.dim, 0.0);
    for (int g = 0; g < 2; ++g) {
        const auto& lex = spec.group_lexicons[static_cast<std::size_t>(g)];
        if (lex.empty()) throw AnalysisError("population distance: empty lexicon");
        const double sign = g == 1 ? 1.0 : -1.0;
        for (const auto& token : lex) {
            const double* vec = table.find(token);
            if (vec == nullptr) {
                throw AnalysisError("population distance: token not in table: " +
                                    token);
            }
            for (std::size_t k = 0; k < table.dim; ++k) {
                diff[k] += sign * vec[k] / static_cast<double>(lex.size());
            }
        }
    }
    double dist_sq = 0.0;
    for (double v : diff) dist_sq += v * v;
    return spec.divergence * spec.divergence * dist_sq;
}

// ---------------------------------------------------------------------------
// Interchange writers

void write_corpus_jsonl(const DocumentSet& docs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    for (const auto& doc : docs.docs) {
        nlohmann::json record = {
            {"doc_id", doc.doc_id},
            {"author_id", doc.author_id},
            {"timestamp", format_iso8601_utc(doc.timestamp)},
            {"text", doc.text},
        };
        out << record.dump() << '\n';
    }
}

void write_authors_csv(const AuthorTable& authors, const std::string& path) {
    std::set<std::string> attr_names;
    for (const auto& [_, attrs] : authors.authors) {
        for (const auto& [name, __] : attrs) attr_names.insert(name);
    }
    std::vector<std::string> ids;
    ids.reserve(authors.authors.size());
    for (const auto& [id, _] : authors.authors) ids.push_back(id);
    std::sort(ids.begin(), ids.end());

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << "author_id";
    for (const auto& name : attr_names) out << ',' << csv_escape(name);
    out << '\n';
    for (const auto& id : ids) {
        out << csv_escape(id);
        const auto& attrs = authors.authors.at(id);
        for (const auto& name : attr_names) {
            const auto it = attrs.find(name);
            out << ',' << (it == attrs.end() ? "" : csv_escape(it->second));
        }
        out << '\n';
    }
}

void write_embeddings_text(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    char buf[64];
    for (std::size_t row = 0; row < table.terms.size(); ++row) {
        out << table.terms[row];
        const double* vec = table.values.data() + row * table.dim;
        for (std::size_t k = 0; k < table.dim; ++k) {
            std::snprintf(buf, sizeof(buf), " %.17g", vec[k]);
            out << buf;
        }
        out << '\n';
    }
}

} // namespace langdiv
