#pragma once

#include "langdiv/corpus.hpp"
#include "langdiv/embedreg.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace langdiv {

// Two-group corpus generator with planted, tunable lexical divergence.
// Every document mentions the target term once; each context token comes
// from the author's group lexicon with probability `divergence`, otherwise
// from the base lexicon.
struct SynthSpec {
    std::size_t authors_per_group = 40;
    int docs_per_author_min = 1;
    int docs_per_author_max = 1;
    std::vector<std::string> base_lexicon;
    std::array<std::vector<std::string>, 2> group_lexicons;
    double divergence = 0.0; // lambda in [0, 1]
    std::string target_term = "kids";
    int doc_length_min = 8; // context tokens per document
    int doc_length_max = 16;
    std::int64_t time_start = 1577836800; // 2020-01-01T00:00:00Z
    std::int64_t time_end = 1609459199;   // 2020-12-31T23:59:59Z
    std::uint64_t seed = 1;
    std::string group_attribute = "party";
    std::array<std::string, 2> group_values = {"dem", "rep"};

    void validate() const; // throws ConfigError
};

// "prefix00".."prefixNN", zero-padded.
std::vector<std::string> numbered_tokens(const std::string& prefix,
                                         std::size_t count);

struct SynthCorpus {
    DocumentSet docs;
    AuthorTable authors;
};

SynthCorpus generate_corpus(const SynthSpec& spec);

struct EmbeddingGroupSpec {
    std::vector<std::string> tokens;
    std::vector<double> offset; // empty = zeros, else length dim
};

// Each token's vector is its lexicon's offset plus unit Gaussian noise.
// Tokens appearing in several lexicons keep their first vector.
EmbeddingTable generate_embeddings(const std::vector<EmbeddingGroupSpec>& lexicons,
                                   std::size_t dim, std::uint64_t seed);

// Standard harness layout: base lexicon and target at the origin, group
// lexicons at the given offsets.
std::vector<EmbeddingGroupSpec> embedding_layout(
    const SynthSpec& spec, std::size_t dim,
    const std::vector<double>& group0_offset,
    const std::vector<double>& group1_offset);

// ||E[context | group 1] - E[context | group 0]||^2 for the realized
// embeddings: divergence^2 * ||mean(lexicon 1) - mean(lexicon 0)||^2.
// This is the population value the distance estimator targets.
double population_context_distance_sq(const SynthSpec& spec,
                                      const EmbeddingTable& table);

// Writers emitting the standard interchange formats, so synthetic runs
// exercise the real ingestion path.
void write_corpus_jsonl(const DocumentSet& docs, const std::string& path);
void write_authors_csv(const AuthorTable& authors, const std::string& path);
void write_embeddings_text(const EmbeddingTable& table, const std::string& path);

} // namespace langdiv
