// langdiv: measures how differently two author groups talk about a target
// term in a document corpus. Subcommands cover dictionary-based moral gaps,
// weighted log-odds term polarization, bias-corrected embedding-regression
// distances with permutation inference, monthly distance series, and a
// synthetic-corpus generator for validating the estimators.

#include "langdiv/corpus.hpp"
#include "langdiv/csv.hpp"
#include "langdiv/embedreg.hpp"
#include "langdiv/errors.hpp"
#include "langdiv/lexicon.hpp"
#include "langdiv/logodds.hpp"
#include "langdiv/random.hpp"
#include "langdiv/stats.hpp"
#include "langdiv/synth.hpp"
#include "langdiv/timeseries.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

using namespace langdiv;
using nlohmann::json;

namespace {

// shortest round-trip representation; deterministic across runs
std::string fmt(double v) { return json(v).dump(); }

void write_text(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
}

struct CommonOpts {
    std::string corpus_path;
    std::string format = "jsonl";
    std::string authors_path;
    std::string group_attr = "party";
    std::vector<std::string> groups = {"dem", "rep"};
    std::vector<std::string> seed_terms;
    std::string co_category;
    std::vector<std::string> co_terms;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string output;
};

void add_corpus_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--corpus", opts.corpus_path, "corpus file (JSONL or CSV)")
        ->envname("LANGDIV_CORPUS")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--format", opts.format, "corpus format")
        ->check(CLI::IsMember({"jsonl", "csv"}))
        ->capture_default_str();
    cmd->add_option("--authors", opts.authors_path,
                    "authors CSV (author_id + attribute columns)")
        ->envname("LANGDIV_AUTHORS")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--group-attr", opts.group_attr,
                    "author attribute defining the two groups")
        ->capture_default_str();
    cmd->add_option("--groups", opts.groups,
                    "the two attribute values to compare, e.g. dem,rep")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--seed-terms", opts.seed_terms,
                    "seed terms defining the conversation subset")
        ->delimiter(',');
    cmd->add_option("--co-category", opts.co_category,
                    "built-in co-occurring keyword category")
        ->check(CLI::IsMember({"education", "pandemic", "partisanship",
                               "flashpoints"}));
    cmd->add_option("--co-terms", opts.co_terms,
                    "explicit co-occurring keyword list")
        ->delimiter(',');
    cmd->add_option("--seed", opts.seed, "master random seed")
        ->capture_default_str();
    cmd->add_option("--threads", opts.threads,
                    "worker thread cap (0 = all cores); never changes results");
    cmd->add_option("--out", opts.output, "output path (default stdout)");
}

std::optional<std::unordered_set<std::string>> resolve_co_terms(
    const CommonOpts& opts) {
    if (!opts.co_category.empty() && !opts.co_terms.empty()) {
        throw ConfigError("use either --co-category or --co-terms, not both");
    }
    if (!opts.co_category.empty()) {
        const auto& list = keyword_categories().at(opts.co_category);
        return std::unordered_set<std::string>(list.begin(), list.end());
    }
    if (!opts.co_terms.empty()) {
        return std::unordered_set<std::string>(opts.co_terms.begin(),
                                               opts.co_terms.end());
    }
    return std::nullopt;
}

void check_groups(const CommonOpts& opts) {
    if (opts.groups.size() != 2 || opts.groups[0] == opts.groups[1]) {
        throw ConfigError("--groups needs exactly two distinct values");
    }
}

json common_echo(const std::string& subcommand, const CommonOpts& opts) {
    json j;
    j["subcommand"] = subcommand;
    j["corpus"] = opts.corpus_path;
    j["format"] = opts.format;
    j["authors"] = opts.authors_path;
    j["group_attr"] = opts.group_attr;
    j["groups"] = opts.groups;
    j["seed_terms"] = opts.seed_terms;
    if (!opts.co_category.empty()) j["co_category"] = opts.co_category;
    if (!opts.co_terms.empty()) j["co_terms"] = opts.co_terms;
    j["seed"] = opts.seed;
    return j;
}

struct LoadedCorpus {
    DocumentSet docs; // tokenized, labeled authors only
    GroupMap groups;
};

LoadedCorpus load_inputs(const CommonOpts& opts) {
    const auto format =
        opts.format == "csv" ? CorpusFormat::csv : CorpusFormat::jsonl;
    auto load = load_corpus(opts.corpus_path, format);
    for (std::size_t i = 0; i < load.errors.size(); ++i) {
        if (i == 20) {
            std::cerr << "... " << load.errors.size() - 20
                      << " more rejected records\n";
            break;
        }
        std::cerr << "warning: " << opts.corpus_path << " line "
                  << load.errors[i].line << ": " << load.errors[i].message
                  << " (record rejected)\n";
    }
    const auto authors = load_authors(opts.authors_path);
    LoadedCorpus result;
    result.groups =
        authors.binary_groups(opts.group_attr, opts.groups[0], opts.groups[1]);
    if (result.groups.empty()) {
        throw DataError("no author carries " + opts.group_attr + " in {" +
                        opts.groups[0] + ", " + opts.groups[1] + "}");
    }
    tokenize_documents(load.docs, {}, opts.threads);
    result.docs.provenance = load.docs.provenance;
    for (auto& doc : load.docs.docs) {
        if (result.groups.count(doc.author_id)) {
            result.docs.docs.push_back(std::move(doc));
        }
    }
    return result;
}

std::string csv_header_block(const json& config) {
    return "# langdiv\n# config: " + config.dump() + "\n";
}

// ---------------------------------------------------------------------------
// moral-gaps

struct MoralGapsOpts {
    CommonOpts common;
    std::string dictionary_path;
    std::vector<std::string> subsets = {"overall"};
    std::string hc = "HC1";
    bool people_baseline = false;
    bool exact_dictionary = false;
};

int run_moral_gaps(const MoralGapsOpts& opts) {
    check_groups(opts.common);
    const auto dict =
        load_moral_dictionary(opts.dictionary_path, !opts.exact_dictionary);
    const auto loaded = load_inputs(opts.common);
    const auto flavor = hc_from_string(opts.hc);

    json config = common_echo("moral-gaps", opts.common);
    config["dictionary"] = opts.dictionary_path;
    config["subsets"] = opts.subsets;
    config["hc"] = opts.hc;
    config["people_baseline"] = opts.people_baseline;
    config["exact_dictionary"] = opts.exact_dictionary;

    std::string out = csv_header_block(config);
    out += "subset,foundation,valence,coefficient,robust_se,ci_low,ci_high,"
           "n_users\n";

    struct SubsetSpec {
        std::string label;
        std::vector<std::string> seeds;
        std::string category; // empty = no co filter
    };
    std::vector<SubsetSpec> runs;
    for (const auto& name : opts.subsets) {
        if (name != "overall" && !keyword_categories().count(name)) {
            throw ConfigError("unknown subset: " + name);
        }
        const std::string category = name == "overall" ? "" : name;
        runs.push_back({name, opts.common.seed_terms, category});
        if (opts.people_baseline) {
            runs.push_back({"people:" + name, {"people"}, category});
        }
    }

    for (const auto& run : runs) {
        DocumentSet subset;
        if (run.seeds.empty()) {
            if (!run.category.empty()) {
                throw ConfigError("keyword subsets require --seed-terms");
            }
            subset = loaded.docs;
        } else {
            std::optional<std::unordered_set<std::string>> co;
            if (!run.category.empty()) {
                const auto& list = keyword_categories().at(run.category);
                co = std::unordered_set<std::string>(list.begin(), list.end());
            } else {
                co = resolve_co_terms(opts.common);
            }
            subset = subset_by_keywords(
                loaded.docs,
                std::unordered_set<std::string>(run.seeds.begin(), run.seeds.end()),
                co);
        }
        if (subset.empty()) {
            std::cerr << "warning: subset " << run.label << " is empty, skipped\n";
            continue;
        }
        const auto profiles =
            compute_profiles(subset, dict, opts.common.threads);
        for (int f = 0; f < 5; ++f) {
            for (int v = 0; v < 2; ++v) {
                const auto gap = moral_gap_regression(
                    profiles, loaded.groups, static_cast<Foundation>(f),
                    static_cast<Valence>(v), flavor);
                if (!gap.dropped_covariates.empty()) {
                    std::cerr << "warning: subset " << run.label
                              << ": dropped zero-variance covariate(s)\n";
                }
                out += run.label;
                out += ',';
                out += kFoundationNames[static_cast<std::size_t>(f)];
                out += ',';
                out += kValenceNames[static_cast<std::size_t>(v)];
                out += ',' + fmt(gap.coefficient) + ',' + fmt(gap.robust_se) +
                       ',' + fmt(gap.ci_low) + ',' + fmt(gap.ci_high) + ',' +
                       std::to_string(gap.n_users) + '\n';
            }
        }
    }
    write_text(opts.common.output, out);
    return 0;
}

// ---------------------------------------------------------------------------
// fightin-words

struct FightinOpts {
    CommonOpts common;
    std::string dictionary_path;
    bool dict_filter = false;
    std::vector<std::string> exclude; // defaults to the seed terms
    int ngram_max = 1;
    std::uint64_t min_count = 10;
    double prior_scale = 500.0;
    int top_k = 0; // 0 = full table
    std::size_t bigrams_per_term = 2;
};

std::string logodds_row(const LogOddsResult& r) {
    std::string annotations;
    for (std::size_t i = 0; i < r.bigram_context.size(); ++i) {
        if (i > 0) annotations += ';';
        annotations += r.bigram_context[i];
    }
    return csv_escape(r.term) + ',' + std::to_string(r.count_a) + ',' +
           std::to_string(r.count_b) + ',' + fmt(r.delta) + ',' +
           fmt(r.variance) + ',' + fmt(r.z) + ',' + csv_escape(annotations) +
           '\n';
}

int run_fightin(const FightinOpts& opts) {
    check_groups(opts.common);
    if (opts.dict_filter && opts.dictionary_path.empty()) {
        throw ConfigError("--dict-filter needs --dictionary");
    }
    std::optional<MoralDictionary> dict;
    if (!opts.dictionary_path.empty()) {
        dict = load_moral_dictionary(opts.dictionary_path);
    }
    const auto loaded = load_inputs(opts.common);

    DocumentSet subset = loaded.docs;
    if (!opts.common.seed_terms.empty()) {
        subset = subset_by_keywords(
            loaded.docs,
            std::unordered_set<std::string>(opts.common.seed_terms.begin(),
                                            opts.common.seed_terms.end()),
            resolve_co_terms(opts.common));
    }
    const auto sampled = sample_one_per_author(
        subset, mix_seed(opts.common.seed, fnv1a64("sample-one-per-author")));

    const std::vector<std::string>& exclude_list =
        opts.exclude.empty() ? opts.common.seed_terms : opts.exclude;
    const std::unordered_set<std::string> exclude(exclude_list.begin(),
                                                  exclude_list.end());

    const auto counts = count_terms(
        sampled, loaded.groups, opts.ngram_max, opts.min_count, exclude,
        opts.dict_filter ? &*dict : nullptr, opts.common.threads);
    auto results =
        weighted_log_odds(counts, PriorSpec::informative(counts, opts.prior_scale));

    json config = common_echo("fightin-words", opts.common);
    if (!opts.dictionary_path.empty()) config["dictionary"] = opts.dictionary_path;
    config["dict_filter"] = opts.dict_filter;
    config["exclude"] = exclude_list;
    config["ngram_max"] = opts.ngram_max;
    config["min_count"] = opts.min_count;
    config["prior_scale"] = opts.prior_scale;
    config["top_k"] = opts.top_k;
    if (opts.top_k > 0) config["bigrams_per_term"] = opts.bigrams_per_term;

    std::string out = csv_header_block(config);
    out += "term,group_A_count,group_B_count,delta,variance,z,bigram_annotations\n";

    if (opts.top_k > 0) {
        auto top_a = top_polarized(results, opts.top_k, Group::a);
        auto top_b = top_polarized(results, opts.top_k, Group::b);
        // companion run with unigrams + bigrams at the pinned threshold 10
        const auto bigram_counts = count_terms(sampled, loaded.groups, 2, 10,
                                               exclude, nullptr,
                                               opts.common.threads);
        const auto bigram_results = weighted_log_odds(
            bigram_counts,
            PriorSpec::informative(bigram_counts, opts.prior_scale));
        attach_bigram_context(top_a, bigram_results, opts.bigrams_per_term);
        attach_bigram_context(top_b, bigram_results, opts.bigrams_per_term);
        for (const auto& r : top_a) out += logodds_row(r);
        for (const auto& r : top_b) out += logodds_row(r);
    } else {
        std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
            if (a.z != b.z) return a.z > b.z;
            return a.term < b.term;
        });
        for (const auto& r : results) out += logodds_row(r);
    }
    write_text(opts.common.output, out);
    return 0;
}

// ---------------------------------------------------------------------------
// embed-distance

struct EmbedOpts {
    CommonOpts common;
    std::string embeddings_path;
    int window = 6;
    int permutations = 1000;
    std::uint64_t min_count = 5;
    std::size_t min_users = 2;
    bool people_baseline = false;
};

json analysis_to_json(const TargetAnalysis& a, int permutations) {
    json j;
    j["target"] = a.target;
    j["n_users_per_group"] = {a.n_users[0], a.n_users[1]};
    j["d"] = a.dim;
    j["seed"] = a.seed;
    j["dropped_docs"] = a.dropped_docs;
    if (a.estimate.has_value()) {
        j["raw_sq"] = a.estimate->raw_sq;
        j["correction"] = a.estimate->correction;
        j["corrected_sq"] = a.estimate->corrected_sq;
        if (a.estimate->p_value) {
            j["p_value"] = *a.estimate->p_value;
            j["P"] = permutations;
        }
        if (a.estimate->null_ci) {
            j["null_ci"] = {(*a.estimate->null_ci)[0], (*a.estimate->null_ci)[1]};
        }
    } else {
        j["skipped_reason"] = a.skipped_reason;
    }
    return j;
}

// one analysis per target, plus the term-frequency weighted average
json run_targets(const std::vector<std::string>& targets,
                 const LoadedCorpus& loaded, const EmbeddingTable& table,
                 const std::optional<std::unordered_set<std::string>>& co,
                 const DistanceConfig& config, std::uint64_t master_seed) {
    json analyses = json::array();
    std::vector<DistanceEstimate> estimates;
    std::vector<double> weights;
    for (const auto& target : targets) {
        const auto subset = subset_by_keywords(loaded.docs, {target}, co);
        const auto analysis =
            analyze_target(subset, loaded.groups, target, table, config,
                           mix_seed(master_seed, fnv1a64(target)));
        analyses.push_back(analysis_to_json(analysis, config.permutations));
        if (analysis.estimate.has_value()) {
            estimates.push_back(*analysis.estimate);
            weights.push_back(
                static_cast<double>(analysis.n_users[0] + analysis.n_users[1]));
        }
    }
    json out;
    out["analyses"] = analyses;
    if (estimates.size() > 1) {
        out["weighted_average"] = {
            {"corrected_sq", weighted_average_estimate(estimates, weights)},
            {"weights", weights}};
    }
    return out;
}

int run_embed(const EmbedOpts& opts) {
    check_groups(opts.common);
    if (opts.common.seed_terms.empty()) {
        throw ConfigError("embed-distance needs --seed-terms");
    }
    const auto table = load_embeddings(opts.embeddings_path);
    for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';
    const auto loaded = load_inputs(opts.common);
    const auto co = resolve_co_terms(opts.common);

    DistanceConfig config;
    config.window = opts.window;
    config.permutations = opts.permutations;
    config.min_count = opts.min_count;
    config.min_users = opts.min_users;
    config.threads = opts.common.threads;

    json out;
    out["config"] = common_echo("embed-distance", opts.common);
    out["config"]["embeddings"] = opts.embeddings_path;
    out["config"]["window"] = opts.window;
    out["config"]["permutations"] = opts.permutations;
    out["config"]["min_count"] = opts.min_count;
    out["config"]["min_users"] = opts.min_users;
    out["config"]["people_baseline"] = opts.people_baseline;

    const json main_block = run_targets(opts.common.seed_terms, loaded,
                                        table.table, co, config,
                                        opts.common.seed);
    out["analyses"] = main_block["analyses"];
    if (main_block.contains("weighted_average")) {
        out["weighted_average"] = main_block["weighted_average"];
    }
    if (opts.people_baseline) {
        out["people_baseline"] = run_targets({"people"}, loaded, table.table, co,
                                             config, opts.common.seed);
    }
    write_text(opts.common.output, out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// distance-series

struct SeriesOpts {
    CommonOpts common;
    std::string embeddings_path;
    std::string annotations_path;
    int window = 6;
    int permutations = 1000;
    std::uint64_t min_count = 5;
    std::size_t min_users = 20;
};

int run_series(const SeriesOpts& opts) {
    check_groups(opts.common);
    if (opts.common.seed_terms.empty()) {
        throw ConfigError("distance-series needs --seed-terms");
    }
    const auto table = load_embeddings(opts.embeddings_path);
    for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';
    const auto loaded = load_inputs(opts.common);
    const auto co = resolve_co_terms(opts.common);

    DistanceConfig config;
    config.window = opts.window;
    config.permutations = opts.permutations;
    config.min_count = opts.min_count;
    config.min_users = opts.min_users;
    config.threads = opts.common.threads;

    json config_echo = common_echo("distance-series", opts.common);
    config_echo["embeddings"] = opts.embeddings_path;
    config_echo["window"] = opts.window;
    config_echo["permutations"] = opts.permutations;
    config_echo["min_count"] = opts.min_count;
    config_echo["min_users"] = opts.min_users;
    if (!opts.annotations_path.empty()) {
        config_echo["annotations"] = opts.annotations_path;
    }

    std::string out = csv_header_block(config_echo);
    if (!opts.annotations_path.empty()) {
        // event lines for plotting, copied through after validation
        const auto events = read_csv(opts.annotations_path);
        const int date_col = events.column("date");
        const int label_col = events.column("label");
        if (date_col < 0 || label_col < 0) {
            throw DataError(opts.annotations_path +
                            ": annotations CSV needs date and label columns");
        }
        for (const auto& row : events.rows) {
            const auto& date = row[static_cast<std::size_t>(date_col)];
            if (!parse_iso8601_utc(date)) {
                throw DataError(opts.annotations_path + ": bad date " + date);
            }
            out += "# event: " + date + " " +
                   row[static_cast<std::size_t>(label_col)] + "\n";
        }
    }
    out += "month,target,corrected_sq,p_value,null_ci_low,null_ci_high,"
           "n_group0,n_group1,skipped_reason\n";

    for (const auto& target : opts.common.seed_terms) {
        const auto subset = subset_by_keywords(loaded.docs, {target}, co);
        const auto series = monthly_distance_series(
            subset, loaded.groups, target, table.table, config,
            mix_seed(opts.common.seed, fnv1a64(target)));
        for (const auto& entry : series) {
            const auto& a = entry.analysis;
            out += entry.month.str() + ',' + csv_escape(target) + ',';
            if (a.estimate.has_value()) {
                out += fmt(a.estimate->corrected_sq) + ',';
                out += a.estimate->p_value ? fmt(*a.estimate->p_value) : "";
                out += ',';
                if (a.estimate->null_ci) {
                    out += fmt((*a.estimate->null_ci)[0]) + ',' +
                           fmt((*a.estimate->null_ci)[1]) + ',';
                } else {
                    out += ",,";
                }
            } else {
                out += ",,,,";
            }
            out += std::to_string(a.n_users[0]) + ',' +
                   std::to_string(a.n_users[1]) + ',' +
                   csv_escape(a.skipped_reason) + '\n';
        }
    }
    write_text(opts.common.output, out);
    return 0;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOpts {
    std::string out_dir = ".";
    std::size_t authors_per_group = 40;
    int docs_per_author_min = 1;
    int docs_per_author_max = 1;
    std::size_t dim = 10;
    std::size_t base_size = 50;
    std::size_t group_size = 20;
    double lambda = 0.0;
    double offset = 1.0;
    std::string target = "kids";
    int doc_length_min = 8;
    int doc_length_max = 16;
    std::string time_start = "2020-01-01T00:00:00Z";
    std::string time_end = "2020-12-31T23:59:59Z";
    std::string group_attr = "party";
    std::vector<std::string> group_values = {"dem", "rep"};
    std::uint64_t seed = 1;
};

int run_synth(const SynthOpts& opts) {
    if (opts.group_values.size() != 2) {
        throw ConfigError("--group-values needs exactly two values");
    }
    SynthSpec spec;
    spec.authors_per_group = opts.authors_per_group;
    spec.docs_per_author_min = opts.docs_per_author_min;
    spec.docs_per_author_max = opts.docs_per_author_max;
    spec.base_lexicon = numbered_tokens("base", opts.base_size);
    spec.group_lexicons[0] = numbered_tokens("ga", opts.group_size);
    spec.group_lexicons[1] = numbered_tokens("gb", opts.group_size);
    spec.divergence = opts.lambda;
    spec.target_term = opts.target;
    spec.doc_length_min = opts.doc_length_min;
    spec.doc_length_max = opts.doc_length_max;
    spec.group_attribute = opts.group_attr;
    spec.group_values = {opts.group_values[0], opts.group_values[1]};
    spec.seed = opts.seed;
    const auto start = parse_iso8601_utc(opts.time_start);
    const auto end = parse_iso8601_utc(opts.time_end);
    if (!start || !end) throw ConfigError("bad --time-start/--time-end");
    spec.time_start = *start;
    spec.time_end = *end;
    spec.validate();

    // group 1 offset along the first embedding dimension
    std::vector<double> offset1(opts.dim, 0.0);
    offset1[0] = opts.offset;
    const auto corpus = generate_corpus(spec);
    const auto table = generate_embeddings(
        embedding_layout(spec, opts.dim, {}, offset1), opts.dim,
        mix_seed(spec.seed, fnv1a64("embeddings")));

    const auto dir = std::filesystem::path(opts.out_dir);
    std::filesystem::create_directories(dir);
    write_corpus_jsonl(corpus.docs, (dir / "corpus.jsonl").string());
    write_authors_csv(corpus.authors, (dir / "authors.csv").string());
    write_embeddings_text(table, (dir / "embeddings.txt").string());

    json config;
    config["subcommand"] = "synth";
    config["authors_per_group"] = opts.authors_per_group;
    config["docs_per_author"] = {opts.docs_per_author_min, opts.docs_per_author_max};
    config["dim"] = opts.dim;
    config["base_size"] = opts.base_size;
    config["group_size"] = opts.group_size;
    config["lambda"] = opts.lambda;
    config["offset"] = opts.offset;
    config["target"] = opts.target;
    config["doc_length"] = {opts.doc_length_min, opts.doc_length_max};
    config["time_start"] = opts.time_start;
    config["time_end"] = opts.time_end;
    config["group_attr"] = opts.group_attr;
    config["group_values"] = opts.group_values;
    config["seed"] = opts.seed;
    config["population_distance_sq"] = population_context_distance_sq(spec, table);
    write_text((dir / "synth_config.json").string(), config.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"group language divergence toolkit"};
    app.require_subcommand(1);

    MoralGapsOpts moral;
    auto* moral_cmd = app.add_subcommand(
        "moral-gaps", "per-category moral language gaps between groups");
    add_corpus_options(moral_cmd, moral.common);
    moral_cmd->add_option("--dictionary", moral.dictionary_path,
                          "moral dictionary CSV (pattern,foundation,valence)")
        ->envname("LANGDIV_DICTIONARY")
        ->required()
        ->check(CLI::ExistingFile);
    moral_cmd->add_option("--subsets", moral.subsets,
                          "overall and/or keyword categories")
        ->delimiter(',')
        ->capture_default_str();
    moral_cmd->add_option("--hc", moral.hc, "robust SE flavor (HC0..HC3)")
        ->capture_default_str();
    moral_cmd->add_flag("--people-baseline", moral.people_baseline,
                        "also run with seed term 'people'");
    moral_cmd->add_flag("--exact-dictionary", moral.exact_dictionary,
                        "treat wildcard stems as exact tokens");

    FightinOpts fightin;
    auto* fightin_cmd = app.add_subcommand(
        "fightin-words", "weighted log-odds term polarization");
    add_corpus_options(fightin_cmd, fightin.common);
    fightin_cmd->add_option("--dictionary", fightin.dictionary_path,
                            "moral dictionary CSV for --dict-filter")
        ->envname("LANGDIV_DICTIONARY")
        ->check(CLI::ExistingFile);
    fightin_cmd->add_flag("--dict-filter", fightin.dict_filter,
                          "keep only dictionary-matching unigrams");
    fightin_cmd->add_option("--exclude", fightin.exclude,
                            "terms removed before n-gram formation "
                            "(default: the seed terms)")
        ->delimiter(',');
    fightin_cmd->add_option("--ngram-max", fightin.ngram_max, "1 or 2")
        ->check(CLI::Range(1, 2))
        ->capture_default_str();
    fightin_cmd->add_option("--min-count", fightin.min_count,
                            "pooled frequency floor")
        ->capture_default_str();
    fightin_cmd->add_option("--prior-scale", fightin.prior_scale,
                            "Dirichlet prior total mass a0")
        ->capture_default_str();
    fightin_cmd->add_option("--top-k", fightin.top_k,
                            "emit only the top k terms per group, annotated "
                            "with their most polarized bigrams");
    fightin_cmd->add_option("--bigrams-per-term", fightin.bigrams_per_term,
                            "bigram annotations per term")
        ->capture_default_str();

    EmbedOpts embed;
    auto* embed_cmd = app.add_subcommand(
        "embed-distance",
        "bias-corrected embedding-regression distance with permutation test");
    add_corpus_options(embed_cmd, embed.common);
    embed_cmd->add_option("--embeddings", embed.embeddings_path,
                          "pre-trained embedding text file")
        ->envname("LANGDIV_EMBEDDINGS")
        ->required()
        ->check(CLI::ExistingFile);
    embed_cmd->add_option("--window", embed.window,
                          "context tokens on each side of the target")
        ->capture_default_str();
    embed_cmd->add_option("--permutations", embed.permutations,
                          "label permutations for the null (0 = skip)")
        ->capture_default_str();
    embed_cmd->add_option("--min-count", embed.min_count,
                          "per-subset token frequency floor")
        ->capture_default_str();
    embed_cmd->add_option("--min-users", embed.min_users,
                          "minimum users per group")
        ->capture_default_str();
    embed_cmd->add_flag("--people-baseline", embed.people_baseline,
                        "also run with seed term 'people'");

    SeriesOpts series;
    auto* series_cmd = app.add_subcommand(
        "distance-series", "monthly embedding-distance series per target");
    add_corpus_options(series_cmd, series.common);
    series_cmd->add_option("--embeddings", series.embeddings_path,
                           "pre-trained embedding text file")
        ->envname("LANGDIV_EMBEDDINGS")
        ->required()
        ->check(CLI::ExistingFile);
    series_cmd->add_option("--window", series.window,
                           "context tokens on each side of the target")
        ->capture_default_str();
    series_cmd->add_option("--permutations", series.permutations,
                           "label permutations per month")
        ->capture_default_str();
    series_cmd->add_option("--min-count", series.min_count,
                           "per-month token frequency floor")
        ->capture_default_str();
    series_cmd->add_option("--min-users", series.min_users,
                           "skip months with fewer users per group")
        ->capture_default_str();
    series_cmd->add_option("--annotations", series.annotations_path,
                           "event annotations CSV (date,label) echoed into "
                           "the output for plotting")
        ->check(CLI::ExistingFile);

    SynthOpts synth;
    auto* synth_cmd = app.add_subcommand(
        "synth", "generate a synthetic two-group corpus with planted divergence");
    synth_cmd->add_option("--out-dir", synth.out_dir, "output directory")
        ->capture_default_str();
    synth_cmd->add_option("--authors-per-group", synth.authors_per_group, "")
        ->capture_default_str();
    synth_cmd->add_option("--docs-per-author-min", synth.docs_per_author_min, "")
        ->capture_default_str();
    synth_cmd->add_option("--docs-per-author-max", synth.docs_per_author_max, "")
        ->capture_default_str();
    synth_cmd->add_option("--dim", synth.dim, "embedding dimension")
        ->capture_default_str();
    synth_cmd->add_option("--base-size", synth.base_size, "base lexicon size")
        ->capture_default_str();
    synth_cmd->add_option("--group-size", synth.group_size,
                          "group lexicon size")
        ->capture_default_str();
    synth_cmd->add_option("--lambda", synth.lambda,
                          "probability a context token is group-specific")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    synth_cmd->add_option("--offset", synth.offset,
                          "group-1 lexicon offset along dimension 0")
        ->capture_default_str();
    synth_cmd->add_option("--target", synth.target, "target term")
        ->capture_default_str();
    synth_cmd->add_option("--doc-length-min", synth.doc_length_min, "")
        ->capture_default_str();
    synth_cmd->add_option("--doc-length-max", synth.doc_length_max, "")
        ->capture_default_str();
    synth_cmd->add_option("--time-start", synth.time_start, "")
        ->capture_default_str();
    synth_cmd->add_option("--time-end", synth.time_end, "")
        ->capture_default_str();
    synth_cmd->add_option("--group-attr", synth.group_attr, "")
        ->capture_default_str();
    synth_cmd->add_option("--group-values", synth.group_values, "")
        ->delimiter(',')
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (moral_cmd->parsed()) return run_moral_gaps(moral);
        if (fightin_cmd->parsed()) return run_fightin(fightin);
        if (embed_cmd->parsed()) return run_embed(embed);
        if (series_cmd->parsed()) return run_series(series);
        if (synth_cmd->parsed()) return run_synth(synth);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const AnalysisError& e) {
        std::cerr << "analysis error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
