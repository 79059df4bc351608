#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "langdiv/errors.hpp"
#include "langdiv/synth.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

using namespace langdiv;

namespace {

SynthSpec base_spec() {
    SynthSpec spec;
    spec.authors_per_group = 10;
    spec.base_lexicon = numbered_tokens("base", 20);
    spec.group_lexicons[0] = numbered_tokens("ga", 10);
    spec.group_lexicons[1] = numbered_tokens("gb", 10);
    spec.seed = 11;
    return spec;
}

std::unordered_set<std::string> to_set(const std::vector<std::string>& v) {
    return {v.begin(), v.end()};
}

} // namespace

TEST_CASE("numbered_tokens zero-pads consistently") {
    const auto toks = numbered_tokens("w", 12);
    REQUIRE(toks.size() == 12);
    CHECK(toks[0] == "w00");
    CHECK(toks[11] == "w11");
    CHECK(numbered_tokens("w", 150)[149] == "w149");
}

TEST_CASE("generate_corpus") {
    SUBCASE("every document mentions the target exactly once") {
        auto spec = base_spec();
        spec.divergence = 0.5;
        spec.docs_per_author_min = 1;
        spec.docs_per_author_max = 3;
        const auto corpus = generate_corpus(spec);
        CHECK(corpus.docs.size() >= 2 * spec.authors_per_group);
        for (const auto& doc : corpus.docs.docs) {
            const auto toks = tokenize(doc.text);
            CHECK(std::count(toks.begin(), toks.end(), spec.target_term) == 1);
            CHECK(static_cast<int>(toks.size()) >= spec.doc_length_min + 1);
            CHECK(static_cast<int>(toks.size()) <= spec.doc_length_max + 1);
            CHECK(doc.timestamp >= spec.time_start);
            CHECK(doc.timestamp <= spec.time_end);
        }
    }
    SUBCASE("lambda 0 never touches the group lexicons") {
        auto spec = base_spec();
        spec.divergence = 0.0;
        const auto corpus = generate_corpus(spec);
        const auto base = to_set(spec.base_lexicon);
        for (const auto& doc : corpus.docs.docs) {
            for (const auto& tok : tokenize(doc.text)) {
                if (tok == spec.target_term) continue;
                CHECK(base.count(tok) == 1);
            }
        }
    }
    SUBCASE("lambda 1 with disjoint lexicons shares no context token") {
        auto spec = base_spec();
        spec.divergence = 1.0;
        const auto corpus = generate_corpus(spec);
        std::array<std::unordered_set<std::string>, 2> seen;
        for (const auto& doc : corpus.docs.docs) {
            const int g = doc.author_id[1] == '0' ? 0 : 1;
            for (const auto& tok : tokenize(doc.text)) {
                if (tok != spec.target_term) {
                    seen[static_cast<std::size_t>(g)].insert(tok);
                }
            }
        }
        for (const auto& tok : seen[0]) CHECK(seen[1].count(tok) == 0);
    }
    SUBCASE("deterministic given the seed") {
        const auto c1 = generate_corpus(base_spec());
        const auto c2 = generate_corpus(base_spec());
        REQUIRE(c1.docs.size() == c2.docs.size());
        for (std::size_t i = 0; i < c1.docs.size(); ++i) {
            CHECK(c1.docs.docs[i].doc_id == c2.docs.docs[i].doc_id);
            CHECK(c1.docs.docs[i].text == c2.docs.docs[i].text);
            CHECK(c1.docs.docs[i].timestamp == c2.docs.docs[i].timestamp);
        }
        auto other = base_spec();
        other.seed = 12;
        const auto c3 = generate_corpus(other);
        bool any_diff = false;
        for (std::size_t i = 0; i < c1.docs.size() && !any_diff; ++i) {
            any_diff = c1.docs.docs[i].text != c3.docs.docs[i].text;
        }
        CHECK(any_diff);
    }
    SUBCASE("authors carry the group attribute") {
        const auto corpus = generate_corpus(base_spec());
        CHECK(corpus.authors.authors.size() == 20);
        const auto groups = corpus.authors.binary_groups("party", "dem", "rep");
        std::array<int, 2> sizes{};
        for (const auto& [_, g] : groups) ++sizes[static_cast<std::size_t>(g)];
        CHECK(sizes[0] == 10);
        CHECK(sizes[1] == 10);
    }
    SUBCASE("lambda 0.5 puts about half the context mass on the group lexicon") {
        auto spec = base_spec();
        spec.divergence = 0.5;
        spec.authors_per_group = 100;
        spec.doc_length_min = 50;
        spec.doc_length_max = 50; // 10k context tokens per group
        const auto corpus = generate_corpus(spec);
        std::array<std::size_t, 2> group_tokens{}, total{};
        const auto ga = to_set(spec.group_lexicons[0]);
        const auto gb = to_set(spec.group_lexicons[1]);
        for (const auto& doc : corpus.docs.docs) {
            const int g = doc.author_id[1] == '0' ? 0 : 1;
            for (const auto& tok : tokenize(doc.text)) {
                if (tok == spec.target_term) continue;
                ++total[static_cast<std::size_t>(g)];
                if ((g == 0 && ga.count(tok)) || (g == 1 && gb.count(tok))) {
                    ++group_tokens[static_cast<std::size_t>(g)];
                }
            }
        }
        for (int g = 0; g < 2; ++g) {
            const double share =
                static_cast<double>(group_tokens[static_cast<std::size_t>(g)]) /
                static_cast<double>(total[static_cast<std::size_t>(g)]);
            CHECK(share == doctest::Approx(0.5).epsilon(0.04)); // 0.5 +/- 0.02
        }
    }
    SUBCASE("spec validation") {
        auto bad = base_spec();
        bad.base_lexicon.clear();
        CHECK_THROWS_AS(generate_corpus(bad), ConfigError);
        bad = base_spec();
        bad.divergence = 1.5;
        CHECK_THROWS_AS(generate_corpus(bad), ConfigError);
        bad = base_spec();
        bad.base_lexicon.push_back(bad.target_term);
        CHECK_THROWS_AS(generate_corpus(bad), ConfigError);
    }
}

TEST_CASE("generate_embeddings") {
    SUBCASE("offsets shift the lexicon mean") {
        std::vector<double> offset = {5.0, -3.0};
        const auto table = generate_embeddings(
            {{numbered_tokens("w", 400), offset}}, 2, 19);
        CHECK(table.size() == 400);
        double m0 = 0, m1 = 0;
        for (const auto& term : table.terms) {
            const double* v = table.find(term);
            m0 += v[0] / 400.0;
            m1 += v[1] / 400.0;
        }
        // unit noise, 400 samples: sd of the mean is 0.05
        CHECK(m0 == doctest::Approx(5.0).epsilon(0.05));
        CHECK(m1 == doctest::Approx(-3.0).epsilon(0.1));
    }
    SUBCASE("deterministic and first-occurrence-wins") {
        const std::vector<EmbeddingGroupSpec> lexicons = {
            {{"a", "b"}, {}}, {{"b", "c"}, {10.0}}};
        const auto t1 = generate_embeddings(lexicons, 1, 7);
        const auto t2 = generate_embeddings(lexicons, 1, 7);
        CHECK(t1.size() == 3);
        CHECK(t1.find("b")[0] == t2.find("b")[0]);
        CHECK(std::fabs(t1.find("b")[0]) < 6.0); // from the first, offset-0 lexicon
    }
    SUBCASE("offset length must match the dimension") {
        CHECK_THROWS_AS(generate_embeddings({{{"a"}, {1.0, 2.0}}}, 3, 1),
                        ConfigError);
    }
}

TEST_CASE("population distance matches a fully separated pipeline") {
    // single-token lexicons, lambda 1: every group-g context vector collapses
    // to that token's embedding, so the corrected distance is exact
    SynthSpec spec;
    spec.authors_per_group = 5;
    spec.base_lexicon = {"filler"};
    spec.group_lexicons[0] = {"left"};
    spec.group_lexicons[1] = {"right"};
    spec.divergence = 1.0;
    spec.doc_length_min = 4;
    spec.doc_length_max = 4;
    spec.seed = 23;

    const auto table = embedding_layout(spec, 1, {0.0}, {1.0});
    const auto emb = generate_embeddings(table, 1, 29);
    const auto corpus = generate_corpus(spec);

    DocumentSet docs = corpus.docs;
    tokenize_documents(docs);
    const auto groups = corpus.authors.binary_groups("party", "dem", "rep");

    DistanceConfig config;
    config.permutations = 0;
    config.min_count = 1;
    const auto analysis = analyze_target(docs, groups, spec.target_term, emb,
                                         config, 31);
    REQUIRE(analysis.estimate.has_value());

    const double want = population_context_distance_sq(spec, emb);
    const double gap = emb.find("right")[0] - emb.find("left")[0];
    CHECK(want == doctest::Approx(gap * gap).epsilon(1e-12));
    // constant within group: variance vanishes, corrected == population
    CHECK(analysis.estimate->correction < 1e-12);
    CHECK(analysis.estimate->corrected_sq == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("population distance is zero at lambda 0") {
    auto spec = base_spec();
    spec.divergence = 0.0;
    const auto emb =
        generate_embeddings(embedding_layout(spec, 3, {}, {}), 3, 41);
    CHECK(population_context_distance_sq(spec, emb) == 0.0);
}

TEST_CASE("interchange files round-trip through the real loaders") {
    TempDir tmp;
    auto spec = base_spec();
    spec.divergence = 0.3;
    spec.docs_per_author_min = 1;
    spec.docs_per_author_max = 2;
    const auto corpus = generate_corpus(spec);
    const auto emb = generate_embeddings(embedding_layout(spec, 4, {}, {}), 4, 43);

    const auto corpus_path = (tmp.path / "corpus.jsonl").string();
    const auto authors_path = (tmp.path / "authors.csv").string();
    const auto emb_path = (tmp.path / "embeddings.txt").string();
    write_corpus_jsonl(corpus.docs, corpus_path);
    write_authors_csv(corpus.authors, authors_path);
    write_embeddings_text(emb, emb_path);

    const auto loaded = load_corpus(corpus_path, CorpusFormat::jsonl);
    CHECK(loaded.errors.empty());
    REQUIRE(loaded.docs.size() == corpus.docs.size());
    for (std::size_t i = 0; i < loaded.docs.size(); ++i) {
        CHECK(loaded.docs.docs[i].doc_id == corpus.docs.docs[i].doc_id);
        CHECK(loaded.docs.docs[i].text == corpus.docs.docs[i].text);
        CHECK(loaded.docs.docs[i].timestamp == corpus.docs.docs[i].timestamp);
    }

    const auto authors = load_authors(authors_path);
    REQUIRE(authors.authors.size() == corpus.authors.authors.size());
    for (const auto& [id, attrs] : corpus.authors.authors) {
        CHECK(authors.authors.at(id) == attrs);
    }

    const auto emb2 = load_embeddings(emb_path);
    CHECK(emb2.table.dim == emb.dim);
    REQUIRE(emb2.table.size() == emb.size());
    for (const auto& term : emb.terms) {
        const double* a = emb.find(term);
        const double* b = emb2.table.find(term);
        REQUIRE(b != nullptr);
        for (std::size_t k = 0; k < emb.dim; ++k) {
            CHECK(a[k] == b[k]); // %.17g round-trips doubles exactly
        }
    }
}
