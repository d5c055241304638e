#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

#include <json.hpp>

#include "oracles.hpp"
#include "rankdiag/error.hpp"
#include "rankdiag/pipeline.hpp"
#include "test_util.hpp"

using namespace rankdiag;
using rankdiag::testing::slurp;
using rankdiag::testing::TempDir;

namespace {

int cli(const std::string& args) {
    const std::string cmd = std::string(RANKDIAG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int cli_capture(const std::string& args, const std::filesystem::path& out) {
    const std::string cmd = std::string(RANKDIAG_CLI_PATH) + " " + args + " >" + out.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Fixture {
    TempDir dir;
    std::filesystem::path corpus, queries, qrels;

    Fixture() {
        oracle::TextGenerator gen(80, 42);
        std::string c, q, j;
        for (const auto& p : gen.corpus(300, 25)) c += p.doc_id + "\t" + p.text + "\n";
        for (int i = 0; i < 12; ++i) q += "q" + std::to_string(i) + "\t" + gen.text(1, 4) + "\n";
        corpus = dir.write("corpus.tsv", c);
        queries = dir.write("queries.tsv", q);
        qrels = dir.write("qrels.txt", "");
    }
};

}  // namespace

TEST_CASE("cli: usage errors exit 1") {
    CHECK(cli("") == 1);
    CHECK(cli("frobnicate") == 1);
    CHECK(cli("index --corpus x") == 1);
    CHECK(cli("evaluate --run a --qrels b --format xml") == 1);
    CHECK(cli("--help") == 0);
    CHECK(cli("provenance --help") == 0);
}

TEST_CASE("cli: missing input is an I/O error, bad data a data error") {
    TempDir dir;
    CHECK(cli("index --corpus " + (dir / "nope.tsv").string() + " --index " + (dir / "i").string()) == 3);
    const auto bad = dir.write("bad.tsv", "no tab\n");
    CHECK(cli("index --corpus " + bad.string() + " --index " + (dir / "i").string()) == 2);
    const auto junk = dir.write("junk.rlix", std::string(100, 'j'));
    const auto q = dir.write("q.tsv", "1\tx\n");
    CHECK(cli("retrieve --index " + junk.string() + " --queries " + q.string() + " --output " + (dir / "r").string()) == 2);
}

TEST_CASE("cli: index, retrieve, evaluate, provenance, mask end to end") {
    Fixture f;
    const auto index = f.dir / "index.rlix";
    const auto run = f.dir / "run.txt";
    REQUIRE(cli("index --corpus " + f.corpus.string() + " --index " + index.string() + " --threads 3") == 0);
    REQUIRE(cli("retrieve --index " + index.string() + " --queries " + f.queries.string() + " --output " + run.string() +
                " --k 50") == 0);

    // Byte-identical reruns, independent of thread count.
    const auto run2 = f.dir / "run2.txt";
    REQUIRE(cli("retrieve --index " + index.string() + " --queries " + f.queries.string() + " --output " + run2.string() +
                " --k 50 --threads 4") == 0);
    CHECK(slurp(run) == slurp(run2));
    const auto index2 = f.dir / "index2.rlix";
    REQUIRE(cli("index --corpus " + f.corpus.string() + " --index " + index2.string()) == 0);
    CHECK(slurp(index) == slurp(index2));

    const auto parsed = read_run(run);
    REQUIRE_FALSE(parsed.empty());

    // Qrels judging the top doc of each query relevant: a perfect run.
    std::string qrels;
    for (const auto& q : parsed.queries()) qrels += q.query_id + " 0 " + q.entries[0].doc_id + " 2\n";
    const auto qrels_path = f.dir.write("perfect.qrels", qrels);
    const auto report = f.dir / "report.txt";
    REQUIRE(cli_capture("evaluate --run " + run.string() + " --qrels " + qrels_path.string() + " --format kv", report) == 0);
    const auto text = slurp(report);
    CHECK(text.find("ndcg_cut_10\tall\t1.000000\n") != std::string::npos);
    CHECK(text.find("map\tall\t1.000000\n") != std::string::npos);
    CHECK(text.find("recip_rank\tall\t1.000000\n") != std::string::npos);

    const auto table = f.dir / "table.txt";
    REQUIRE(cli_capture("evaluate --run " + run.string() + " --qrels " + qrels_path.string() + " --per-query", table) == 0);
    CHECK(slurp(table).find("ndcg_cut_10           \tall\t1.0000\n") != std::string::npos);

    const auto prefix = f.dir / "prov";
    REQUIRE(cli("provenance --base " + run.string() + " --target " + run.string() + " --qrels " + qrels_path.string() +
                " --stratum all --stratum relevant --output-prefix " + prefix.string()) == 0);
    for (const char* s : {"all", "relevant"}) {
        for (const char* ext : {".ratios.csv", ".counts.csv", ".json", ".svg"})
            CHECK(std::filesystem::exists(prefix.string() + "." + s + ext));
    }
    const auto j = nlohmann::json::parse(slurp(prefix.string() + ".all.json"));
    CHECK(j["ratios"][0][0] == 1.0);
    CHECK(j["provenance"]["base_run_tag"] == "bm25");
    CHECK(cli("provenance --base " + run.string() + " --target " + run.string() + " --stratum relevant --output-prefix " +
              prefix.string()) == 2);

    const auto masked = f.dir / "only_q.tsv";
    REQUIRE(cli("mask --run " + run.string() + " --queries " + f.queries.string() + " --corpus " + f.corpus.string() +
                " --mode only_q --output " + masked.string()) == 0);
    const auto lines = slurp(masked);
    CHECK(static_cast<std::size_t>(std::count(lines.begin(), lines.end(), '\n')) == parsed.entry_count());
    CHECK(cli("mask --run " + run.string() + " --queries " + f.queries.string() + " --corpus " + f.corpus.string() +
              " --mode sideways --output " + masked.string()) == 1);
}

TEST_CASE("pipeline functions") {
    Fixture f;
    const auto index = f.dir / "i.rlix";
    const auto summary = pipeline::index_corpus(f.corpus, index, 2);
    CHECK(summary.documents == 300);
    CHECK(pipeline::retrieve(index, f.queries, {.k = 5}, "x", f.dir / "r.txt") > 0);
    const auto run = read_run(f.dir / "r.txt");
    for (const auto& q : run.queries()) CHECK(q.entries.size() <= 5);

    const auto empty = f.dir / "empty.rlix";
    pipeline::index_corpus(f.dir.write("e.tsv", ""), empty);
    CHECK_THROWS_AS(pipeline::retrieve(empty, f.queries, {}, "x", f.dir / "r2.txt"), DataError);
}
