// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. argv[1] is the CLI binary (used by the end-to-end determinism
// criterion).

#include "langdiv/corpus.hpp"
#include "langdiv/embedreg.hpp"
#include "langdiv/lexicon.hpp"
#include "langdiv/logodds.hpp"
#include "langdiv/random.hpp"
#include "langdiv/stats.hpp"
#include "langdiv/synth.hpp"
#include "langdiv/timeseries.hpp"

#include "oracle_ols.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace langdiv;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << number << ". " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

SynthSpec null_spec(std::uint64_t seed) {
    SynthSpec spec;
    spec.authors_per_group = 40;
    spec.base_lexicon = numbered_tokens("base", 50);
    spec.group_lexicons[0] = numbered_tokens("ga", 20);
    spec.group_lexicons[1] = numbered_tokens("gb", 20);
    spec.divergence = 0.0;
    spec.seed = seed;
    return spec;
}

// corpus -> observations -> estimate, optionally with a permutation test
TargetAnalysis run_pipeline(const SynthSpec& spec, std::size_t dim,
                            double offset, int permutations,
                            std::uint64_t analysis_seed) {
    std::vector<double> off(dim, 0.0);
    off[0] = offset;
    const auto table =
        generate_embeddings(embedding_layout(spec, dim, {}, off), dim,
                            mix_seed(spec.seed, fnv1a64("embeddings")));
    auto corpus = generate_corpus(spec);
    tokenize_documents(corpus.docs);
    const auto groups = corpus.authors.binary_groups("party", "dem", "rep");
    DistanceConfig config;
    config.permutations = permutations;
    config.min_count = 1;
    return analyze_target(corpus.docs, groups, spec.target_term, table, config,
                          analysis_seed);
}

// --------------------------------------------------------------------------

void criterion_1_unbiasedness() {
    const auto start = std::chrono::steady_clock::now();
    const int seeds = 1000;
    std::vector<double> corrected, raw;
    corrected.reserve(seeds);
    raw.reserve(seeds);
    for (int s = 0; s < seeds; ++s) {
        const auto analysis = run_pipeline(null_spec(10000 + s), 10, 0.0, 0, 5);
        corrected.push_back(analysis.estimate->corrected_sq);
        raw.push_back(analysis.estimate->raw_sq);
    }
    auto mean_se = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size() - 1);
        return std::pair{mean, std::sqrt(var / static_cast<double>(v.size()))};
    };
    const auto [mc, se_c] = mean_se(corrected);
    const auto [mr, se_r] = mean_se(raw);
    const double secs = elapsed_seconds(start);
    const bool pass = std::fabs(mc) < 3.0 * se_c && mr > 3.0 * se_r && secs < 120.0;
    report(1, "bias-correction unbiasedness", pass,
           "mean corrected " + fmt(mc) + " vs 3se " + fmt(3.0 * se_c) +
               ", mean raw " + fmt(mr) + " vs 3se " + fmt(3.0 * se_r) + ", " +
               fmt(secs) + "s");
}

void criterion_2_negative_preservation() {
    const std::vector<ContextObservation> obs = {{"a", 0, {0.0}},
                                                 {"b", 0, {2.0}},
                                                 {"c", 1, {1.0}},
                                                 {"d", 1, {3.0}}};
    const auto est = corrected_squared_distance(embedding_regression(obs));
    const bool pass =
        est.raw_sq == 1.0 && est.correction == 2.0 && est.corrected_sq == -1.0;
    report(2, "negative-value preservation", pass,
           "raw " + fmt(est.raw_sq) + ", correction " + fmt(est.correction) +
               ", corrected " + fmt(est.corrected_sq));
}

void criterion_3_closed_form() {
    RandomStream rng(333);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n0 = 2 + rng.below(30), n1 = 2 + rng.below(30);
        const std::size_t d = 1 + rng.below(12);
        std::vector<ContextObservation> obs;
        std::vector<double> sum0(d, 0.0), sum1(d, 0.0);
        for (std::size_t i = 0; i < n0 + n1; ++i) {
            ContextObservation o;
            o.author_id = "u" + std::to_string(i);
            o.group = i < n0 ? 0 : 1;
            for (std::size_t k = 0; k < d; ++k) {
                const double v = rng.normal() * 2.0 + (o.group ? 0.3 : 0.0);
                o.vector.push_back(v);
                (o.group ? sum1 : sum0)[k] += v;
            }
            obs.push_back(std::move(o));
        }
        const auto est = corrected_squared_distance(embedding_regression(obs));
        double want = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = sum1[k] / static_cast<double>(n1) -
                                sum0[k] / static_cast<double>(n0);
            want += diff * diff;
        }
        worst = std::max(worst, std::fabs(est.raw_sq - want));
    }
    report(3, "two-group closed form", worst < 1e-10,
           "max |raw_sq - mean-distance^2| = " + fmt(worst));
}

void criterion_4_calibration() {
    const auto start = std::chrono::steady_clock::now();
    const int seeds = 500;
    std::vector<double> pvalues;
    pvalues.reserve(seeds);
    for (int s = 0; s < seeds; ++s) {
        const auto analysis =
            run_pipeline(null_spec(40000 + s), 10, 0.0, 200, 50000 + s);
        pvalues.push_back(*analysis.estimate->p_value);
    }
    int rejections = 0;
    for (double p : pvalues) {
        if (p < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / seeds;

    std::sort(pvalues.begin(), pvalues.end());
    double ks = 0.0;
    for (int i = 0; i < seeds; ++i) {
        const double hi = static_cast<double>(i + 1) / seeds - pvalues[i];
        const double lo = pvalues[i] - static_cast<double>(i) / seeds;
        ks = std::max({ks, hi, lo});
    }
    const double secs = elapsed_seconds(start);
    const bool pass = rate >= 0.03 && rate <= 0.07 && ks < 0.08 && secs < 300.0;
    report(4, "permutation calibration", pass,
           "rejection rate " + fmt(rate) + ", KS " + fmt(ks) + ", " + fmt(secs) +
               "s");
}

void criterion_5_power_monotonicity() {
    const int seeds = 20;
    const double levels[] = {0.0, 0.25, 0.5};
    double averages[3] = {0, 0, 0};
    int significant_at_half = 0;
    for (int li = 0; li < 3; ++li) {
        for (int s = 0; s < seeds; ++s) {
            auto spec = null_spec(70000 + 1000 * li + s);
            spec.authors_per_group = 200;
            spec.divergence = levels[li];
            const auto analysis =
                run_pipeline(spec, 10, 1.0, 200, 80000 + 1000 * li + s);
            averages[li] += analysis.estimate->corrected_sq / seeds;
            if (li == 2 && *analysis.estimate->p_value < 0.05) {
                ++significant_at_half;
            }
        }
    }
    const bool increasing = averages[0] < averages[1] && averages[1] < averages[2];
    const double power = static_cast<double>(significant_at_half) / seeds;
    const bool pass = increasing && power >= 0.95;
    report(5, "power and monotonicity", pass,
           "averages " + fmt(averages[0]) + " < " + fmt(averages[1]) + " < " +
               fmt(averages[2]) + ", power at 0.5 = " + fmt(power));
}

void criterion_6_fightin_oracle() {
    TermCounts counts;
    counts.counts["w"] = {3, 1};
    counts.totals = {10, 10};
    PriorSpec prior;
    prior.scale = 5.0;
    prior.weights["w"] = 0.5;
    const auto results = weighted_log_odds(counts, prior);

    // independent arithmetic evaluation of the stated formula
    const double delta = std::log((3.0 + 0.5) / (10.0 + 5.0 - 3.0 - 0.5)) -
                         std::log((1.0 + 0.5) / (10.0 + 5.0 - 1.0 - 0.5));
    const double variance = 1.0 / (3.0 + 0.5) + 1.0 / (1.0 + 0.5);
    const double z = delta / std::sqrt(variance);
    bool pass = results.size() == 1 &&
                std::fabs(results[0].delta - delta) < 1e-12 &&
                std::fabs(results[0].variance - variance) < 1e-12 &&
                std::fabs(results[0].z - z) < 1e-12;

    // swap antisymmetry, exact, over random count tables
    RandomStream rng(666);
    int exact = 0;
    const int tables = 1000;
    for (int rep = 0; rep < tables; ++rep) {
        TermCounts fwd, rev;
        const std::size_t v = 2 + rng.below(12);
        for (std::size_t t = 0; t < v; ++t) {
            const std::uint64_t ya = 1 + rng.below(60);
            const std::uint64_t yb = 1 + rng.below(60);
            const std::string term = "t" + std::to_string(t);
            fwd.counts[term] = {ya, yb};
            rev.counts[term] = {yb, ya};
            fwd.totals[0] += ya;
            fwd.totals[1] += yb;
        }
        rev.totals = {fwd.totals[1], fwd.totals[0]};
        const auto prior_fwd = PriorSpec::informative(fwd, 500.0);
        const auto a = weighted_log_odds(fwd, prior_fwd);
        const auto b = weighted_log_odds(rev, prior_fwd);
        bool ok = a.size() == b.size();
        for (std::size_t i = 0; ok && i < a.size(); ++i) {
            ok = a[i].delta == -b[i].delta && a[i].z == -b[i].z;
        }
        if (ok) ++exact;
    }
    pass = pass && exact == tables;
    report(6, "weighted log-odds oracle", pass,
           "fixture delta " + fmt(results[0].delta) + ", antisymmetry exact in " +
               std::to_string(exact) + "/" + std::to_string(tables));
}

void criterion_7_ols_oracle() {
    RandomStream rng(777);
    double worst_coef = 0.0, worst_se = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 20 + rng.below(60);
        const std::size_t p = 2 + rng.below(3);
        oracle::Matrix x(n, std::vector<double>(p, 1.0));
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 1; j < p; ++j) x[i][j] = rng.normal();
            y[i] = rng.normal() * (1.0 + 0.1 * static_cast<double>(i % 7));
        }
        Eigen::MatrixXd xe(static_cast<Eigen::Index>(n),
                           static_cast<Eigen::Index>(p));
        Eigen::VectorXd ye(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            ye(static_cast<Eigen::Index>(i)) = y[i];
            for (std::size_t j = 0; j < p; ++j) {
                xe(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    x[i][j];
            }
        }
        const auto fit = ols_fit(xe, ye);
        const auto want = oracle::ols(x, y);
        for (std::size_t j = 0; j < p; ++j) {
            worst_coef = std::max(
                worst_coef,
                std::fabs(fit.coefficients(static_cast<Eigen::Index>(j)) -
                          want.beta[j]));
        }
        for (int flavor = 0; flavor < 4; ++flavor) {
            const auto got = robust_se(fit, static_cast<HcFlavor>(flavor));
            const auto wse = oracle::hc_se(want, x, flavor);
            for (std::size_t j = 0; j < p; ++j) {
                worst_se = std::max(
                    worst_se,
                    std::fabs(got(static_cast<Eigen::Index>(j)) - wse[j]));
            }
        }
    }
    const bool pass = worst_coef < 1e-8 && worst_se < 1e-8;
    report(7, "OLS and robust-SE oracle", pass,
           "max coef err " + fmt(worst_coef) + ", max SE err " + fmt(worst_se));
}

void criterion_8_dictionary_fractions() {
    const auto dict = MoralDictionary::from_entries(
        {{"kill", Foundation::care, Valence::vice, false}});
    auto doc = [](std::string id, std::string author,
                  std::vector<std::string> tokens) {
        Document d;
        d.doc_id = std::move(id);
        d.author_id = std::move(author);
        d.tokens = std::move(tokens);
        return d;
    };
    std::vector<Document> docs = {doc("d1", "a1", {"kill", "is", "bad"}),
                                  doc("d2", "a1", {"all", "fine"}),
                                  doc("d3", "a1", {"calm", "words"}),
                                  doc("d4", "a1", {"more", "calm"})};
    std::vector<const Document*> ptrs;
    for (const auto& d : docs) ptrs.push_back(&d);
    const auto profile = user_moral_profile(ptrs, dict);
    bool pass = profile.fraction(Foundation::care, Valence::vice) == 0.25;

    auto make_profile = [&](std::string author, double frac) {
        UserMoralProfile p;
        p.author_id = std::move(author);
        p.n_docs = 4;
        p.fractions[static_cast<std::size_t>(
            category_index(Foundation::care, Valence::vice))] = frac;
        p.log_mean_tokens = 1.25; // constant, must be auto-dropped
        return p;
    };
    const std::vector<UserMoralProfile> profiles = {
        make_profile("a1", 0.5), make_profile("a2", 0.5),
        make_profile("b1", 0.0), make_profile("b2", 0.0)};
    const GroupMap groups = {{"a1", 0}, {"a2", 0}, {"b1", 1}, {"b2", 1}};
    const auto gap =
        moral_gap_regression(profiles, groups, Foundation::care, Valence::vice);
    pass = pass && std::fabs(gap.coefficient - (-0.5)) < 1e-12 &&
           gap.dropped_covariates.size() == 1 &&
           gap.dropped_covariates[0] == "log_mean_tokens";
    report(8, "dictionary fractions and gap regression", pass,
           "fraction " + fmt(profile.fraction(Foundation::care, Valence::vice)) +
               ", coefficient " + fmt(gap.coefficient) + ", covariate dropped");
}

// --------------------------------------------------------------------------

bool run_command(const std::string& cmd) {
    const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    return rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
}

bool same_bytes(const std::filesystem::path& a, const std::filesystem::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str() && !sa.str().empty();
}

void criterion_9_cli_determinism(const std::string& cli) {
    TempDir tmp;
    const std::string dir = tmp.path.string();
    std::vector<std::string> problems;
    auto require = [&](bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    };

    const std::string synth_args =
        " --authors-per-group 60 --docs-per-author-max 3 --lambda 0.4 --dim 6"
        " --offset 1.2 --seed 11 --out-dir ";
    require(run_command(cli + " synth" + synth_args + dir + "/A"), "synth A");
    require(run_command(cli + " synth" + synth_args + dir + "/B"), "synth B");
    for (const char* f :
         {"corpus.jsonl", "authors.csv", "embeddings.txt", "synth_config.json"}) {
        require(same_bytes(tmp.path / "A" / f, tmp.path / "B" / f),
                std::string("synth rerun differs: ") + f);
    }

    std::ofstream(tmp.path / "dict.csv")
        << "pattern,foundation,valence\nga*,care,vice\ngb*,sanctity,virtue\n"
           "base00,fairness,virtue\nbase01,loyalty,vice\n";

    const std::string inputs = " --corpus " + dir + "/A/corpus.jsonl --authors " +
                               dir + "/A/authors.csv";
    const std::string emb = " --embeddings " + dir + "/A/embeddings.txt";

    struct Run {
        std::string name;
        std::string args;
    };
    const std::vector<Run> runs = {
        {"moral-gaps", " moral-gaps" + inputs + " --dictionary " + dir +
                           "/dict.csv --seed-terms kids --seed 3"},
        {"fightin-words", " fightin-words" + inputs +
                              " --seed-terms kids --min-count 3 --top-k 5"
                              " --ngram-max 2 --seed 3"},
        {"embed-distance", " embed-distance" + inputs + emb +
                               " --seed-terms kids --permutations 100"
                               " --min-count 1 --seed 3"},
        {"distance-series", " distance-series" + inputs + emb +
                                " --seed-terms kids --permutations 50"
                                " --min-count 1 --min-users 4 --seed 3"},
    };
    for (const auto& run : runs) {
        const auto out1 = dir + "/" + run.name + ".1";
        const auto out2 = dir + "/" + run.name + ".2";
        const auto out3 = dir + "/" + run.name + ".3";
        require(run_command(cli + run.args + " --threads 1 --out " + out1),
                run.name + " run 1");
        require(run_command(cli + run.args + " --threads 1 --out " + out2),
                run.name + " run 2");
        require(run_command(cli + run.args + " --threads 4 --out " + out3),
                run.name + " run 3");
        require(same_bytes(out1, out2), run.name + ": rerun differs");
        require(same_bytes(out1, out3), run.name + ": --threads changed output");
    }

    std::string detail;
    for (const auto& p : problems) {
        if (!detail.empty()) detail += "; ";
        detail += p;
    }
    report(9, "end-to-end CLI determinism", problems.empty(),
           problems.empty() ? "5 subcommands, reruns and thread variation" : detail);
}

void criterion_10_throughput() {
    SynthSpec spec;
    spec.authors_per_group = 50000; // one document each: 100k documents
    spec.base_lexicon = numbered_tokens("base", 50);
    spec.group_lexicons[0] = numbered_tokens("ga", 20);
    spec.group_lexicons[1] = numbered_tokens("gb", 20);
    spec.divergence = 0.25;
    spec.doc_length_min = 10;
    spec.doc_length_max = 14;
    spec.seed = 99;
    const std::size_t dim = 200;
    std::vector<double> off(dim, 0.0);
    off[0] = 1.0;
    const auto table = generate_embeddings(embedding_layout(spec, dim, {}, off),
                                           dim, 991);
    auto corpus = generate_corpus(spec);
    const auto groups = corpus.authors.binary_groups("party", "dem", "rep");

    const auto start = std::chrono::steady_clock::now();
    tokenize_documents(corpus.docs);
    DistanceConfig config;
    config.permutations = 1000;
    config.min_count = 5;
    const auto analysis =
        analyze_target(corpus.docs, groups, spec.target_term, table, config, 17);
    const double secs = elapsed_seconds(start);

    const bool pass = analysis.estimate.has_value() &&
                      analysis.n_users[0] == 50000 && secs < 60.0;
    report(10, "throughput on 100k documents, d=200, P=1000", pass,
           fmt(secs) + "s, corrected " +
               (analysis.estimate ? fmt(analysis.estimate->corrected_sq) : "-"));
}

} // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "build/tools/langdiv";
    criterion_1_unbiasedness();
    criterion_2_negative_preservation();
    criterion_3_closed_form();
    criterion_4_calibration();
    criterion_5_power_monotonicity();
    criterion_6_fightin_oracle();
    criterion_7_ols_oracle();
    criterion_8_dictionary_fractions();
    criterion_9_cli_determinism(cli);
    criterion_10_throughput();
    if (g_failures == 0) {
        std::cout << "acceptance: all criteria passed" << std::endl;
    } else {
        std::cout << "acceptance: " << g_failures << " criterion(s) failed"
                  << std::endl;
    }
    return g_failures == 0 ? 0 : 1;
}
