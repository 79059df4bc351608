#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

std::string cli_path() {
    const char* env = std::getenv("LANGDIV_CLI");
    return env != nullptr ? env : "build/tools/langdiv";
}

int run(const std::string& args, const std::string& env = "") {
    const std::string cmd =
        env + " " + cli_path() + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// small fixture corpus: pandemic co-mentions for half the kids tweets
struct Fixture {
    TempDir tmp;
    std::string corpus, authors, embeddings, dictionary;

    Fixture() {
        std::ostringstream c;
        for (int i = 0; i < 30; ++i) {
            const std::string author = "u" + std::to_string(i);
            const char* extra = i % 2 == 0 ? "vaccine" : "playground";
            c << R"({"doc_id":"d)" << i << R"(","author_id":")" << author
              << R"(","timestamp":"2020-0)" << (1 + i % 3)
              << R"(-10T00:00:00Z","text":"my kids like the )" << extra
              << R"( a lot"})"
              << "\n";
        }
        corpus = tmp.file("corpus.jsonl", c.str());

        std::ostringstream a;
        a << "author_id,party\n";
        for (int i = 0; i < 30; ++i) {
            a << "u" << i << "," << (i % 2 == 0 ? "dem" : "rep") << "\n";
        }
        authors = tmp.file("authors.csv", a.str());

        std::ostringstream e;
        for (const char* term :
             {"my", "like", "the", "vaccine", "playground", "a", "lot"}) {
            e << term;
            for (int k = 0; k < 3; ++k) {
                e << " " << (0.25 * static_cast<double>(term[0] % 5) + 0.1 * k);
            }
            e << "\n";
        }
        embeddings = tmp.file("embeddings.txt", e.str());

        dictionary = tmp.file("dict.csv",
                              "pattern,foundation,valence\n"
                              "vaccine,care,virtue\nplayground,loyalty,virtue\n");
    }
};

} // namespace

TEST_CASE("exit codes") {
    Fixture f;
    SUBCASE("success is 0") {
        CHECK(run("moral-gaps --corpus " + f.corpus + " --authors " + f.authors +
                  " --dictionary " + f.dictionary + " --out " +
                  (f.tmp.path / "ok.csv").string()) == 0);
    }
    SUBCASE("config errors are 1") {
        CHECK(run("moral-gaps --corpus " + f.corpus) == 1); // missing required
        CHECK(run("nonsense-subcommand") == 1);
        CHECK(run("moral-gaps --corpus /does/not/exist --authors " + f.authors +
                  " --dictionary " + f.dictionary) == 1);
        CHECK(run("embed-distance --corpus " + f.corpus + " --authors " +
                  f.authors + " --embeddings " + f.embeddings +
                  " --seed-terms kids --co-category pandemic --co-terms x") == 1);
        CHECK(run("--help") == 0);
    }
    SUBCASE("data errors are 2") {
        const auto bad = f.tmp.file("bad_dict.csv",
                                    "pattern,foundation,valence\nx,unknown,vice\n");
        CHECK(run("moral-gaps --corpus " + f.corpus + " --authors " + f.authors +
                  " --dictionary " + bad) == 2);
        const auto dup = f.tmp.file("dup.csv", "author_id,party\nu1,dem\nu1,rep\n");
        CHECK(run("moral-gaps --corpus " + f.corpus + " --authors " + dup +
                  " --dictionary " + f.dictionary) == 2);
    }
    SUBCASE("analysis errors are 3") {
        // every author in one group: the gap regression cannot run
        const auto lopsided = f.tmp.file("one_sided.csv",
                                         "author_id,party\nu0,dem\nu2,dem\nu4,dem\n");
        CHECK(run("moral-gaps --corpus " + f.corpus + " --authors " + lopsided +
                  " --dictionary " + f.dictionary) == 3);
    }
}

TEST_CASE("environment variables provide default paths") {
    Fixture f;
    const std::string env = "LANGDIV_CORPUS=" + f.corpus +
                            " LANGDIV_AUTHORS=" + f.authors +
                            " LANGDIV_DICTIONARY=" + f.dictionary;
    CHECK(run("moral-gaps --out " + (f.tmp.path / "env.csv").string(), env) == 0);
    CHECK(slurp(f.tmp.path / "env.csv").find("care,virtue") != std::string::npos);
}

TEST_CASE("built-in pandemic category selects co-mentioning documents") {
    Fixture f;
    const auto out = (f.tmp.path / "embed.json").string();
    CHECK(run("embed-distance --corpus " + f.corpus + " --authors " + f.authors +
              " --embeddings " + f.embeddings +
              " --seed-terms kids --co-category pandemic --permutations 0"
              " --min-count 1 --out " +
              out) == 0);
    const auto parsed = nlohmann::json::parse(slurp(out));
    const auto& analysis = parsed["analyses"][0];
    // only the 15 vaccine documents co-mention a pandemic keyword, and they
    // all belong to dem users, so the analysis is skipped with 15/0 users
    CHECK(analysis["n_users_per_group"][0] == 15);
    CHECK(analysis["n_users_per_group"][1] == 0);
    CHECK(analysis.contains("skipped_reason"));
}

TEST_CASE("people baseline reruns with seed term people") {
    Fixture f;
    std::ostringstream extra;
    extra << slurp(f.corpus);
    for (int i = 0; i < 30; ++i) {
        extra << R"({"doc_id":"p)" << i << R"(","author_id":"u)" << i
              << R"(","timestamp":"2020-01-20T00:00:00Z","text":"some people like the playground too"})"
              << "\n";
    }
    const auto corpus2 = f.tmp.file("corpus2.jsonl", extra.str());
    const auto out = (f.tmp.path / "embed_people.json").string();
    CHECK(run("embed-distance --corpus " + corpus2 + " --authors " + f.authors +
              " --embeddings " + f.embeddings +
              " --seed-terms kids --people-baseline --permutations 20"
              " --min-count 1 --out " +
              out) == 0);
    const auto parsed = nlohmann::json::parse(slurp(out));
    REQUIRE(parsed.contains("people_baseline"));
    CHECK(parsed["people_baseline"]["analyses"][0]["target"] == "people");
    CHECK(parsed["analyses"][0]["target"] == "kids");
}

TEST_CASE("fightin-words full table is sorted by z descending") {
    Fixture f;
    const auto out = (f.tmp.path / "fw.csv").string();
    CHECK(run("fightin-words --corpus " + f.corpus + " --authors " + f.authors +
              " --seed-terms kids --min-count 2 --out " + out) == 0);
    const auto content = slurp(out);
    std::istringstream lines(content);
    std::string line;
    double prev_z = 1e300;
    bool saw_header = false;
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            CHECK(line ==
                  "term,group_A_count,group_B_count,delta,variance,z,"
                  "bigram_annotations");
            saw_header = true;
            continue;
        }
        const auto first_comma = line.find(',');
        auto rest = line.substr(first_comma + 1);
        for (int skip = 0; skip < 4; ++skip) rest = rest.substr(rest.find(',') + 1);
        const double z = std::stod(rest.substr(0, rest.find(',')));
        CHECK(z <= prev_z);
        prev_z = z;
        ++rows;
    }
    CHECK(rows > 3);
    // vaccine is dem-only, playground rep-only
    CHECK(content.find("vaccine") != std::string::npos);
    CHECK(content.find("playground") != std::string::npos);
}
