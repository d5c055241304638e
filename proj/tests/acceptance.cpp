// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero when any criterion fails.
//
// The large-data MS MARCO criterion runs only when RANKDIAG_MSMARCO_DIR
// points at a directory holding collection.tsv, msmarco-test2020-queries.tsv
// and 2020qrels-pass.txt. RANKDIAG_MSMARCO_INDEX optionally names a cached
// index file (built there if missing).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "rankdiag/bm25.hpp"
#include "rankdiag/error.hpp"
#include "rankdiag/index.hpp"
#include "rankdiag/maskgen.hpp"
#include "rankdiag/metrics.hpp"
#include "rankdiag/rankdiff.hpp"

using namespace rankdiag;

namespace {

enum class Verdict { pass, fail, skip };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string name;
    double time_limit_s;  // 0 = no limit
    std::function<Outcome()> check;
};

Outcome pass(std::string d = {}) { return {Verdict::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::fail, std::move(d)}; }

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string fmt(double v, int places = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

// Hand-derived values are asserted to agree within 1e-6.
constexpr double kHandTolerance = 1e-6;

Outcome metric_oracle_equivalence() {
    std::mt19937_64 rng(20211);
    const int instances = 1000;
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        const auto inst = oracle::random_metric_instance(rng);
        const auto j = oracle::to_judgments(inst.qrels);
        worst = std::max({worst, std::abs(ndcg_at_k(inst.ranking, j, 10) - oracle::ndcg10(inst.ranking, inst.qrels)),
                          std::abs(average_precision(inst.ranking, j) - oracle::ap(inst.ranking, inst.qrels)),
                          std::abs(reciprocal_rank(inst.ranking, j) - oracle::rr(inst.ranking, inst.qrels))});
    }
    const std::string d = std::to_string(instances) + " instances, max |diff| = " + sci(worst);
    return worst <= 1e-9 ? pass(d) : fail(d);
}

Outcome hand_metric_values() {
    const Qrels::Judgments ndcg_j{{"d1", 3}, {"d2", 1}};
    const double ndcg = ndcg_at_k(std::vector<std::string>{"d2", "d1"}, ndcg_j, 10);
    const Qrels::Judgments ap_j{{"d1", 3}, {"d3", 2}};
    const double ap = average_precision(std::vector<std::string>{"d1", "d2", "d3"}, ap_j);
    const Qrels::Judgments rr_j{{"a", 0}, {"b", 1}, {"c", 2}};
    const double rr = reciprocal_rank(std::vector<std::string>{"a", "b", "c"}, rr_j);
    const bool ok = std::abs(ndcg - 0.796707) < kHandTolerance && std::abs(ap - 0.833333) < kHandTolerance &&
                    std::abs(rr - 0.333333) < kHandTolerance;
    const std::string d = "ndcg=" + fmt(ndcg, 8) + " ap=" + fmt(ap, 8) + " rr=" + fmt(rr, 8);
    return ok ? pass(d) : fail(d);
}

Outcome bm25_oracle_equivalence() {
    oracle::TextGenerator gen(400, 1000);
    const auto corpus = gen.corpus(1000, 60);
    const auto index = build_index(corpus);
    Bm25Searcher searcher(index, {.k = Bm25Params::kUnlimited});
    std::size_t compared = 0;
    double worst = 0.0;
    for (int q = 0; q < 100; ++q) {
        const auto text = gen.text(1, 6);
        const auto hits = searcher.search(text);
        const auto brute = oracle::bm25_exhaustive(corpus, text);
        if (hits.size() != brute.size())
            return fail("query '" + text + "': " + std::to_string(hits.size()) + " hits vs " +
                        std::to_string(brute.size()) + " by exhaustive scoring");
        for (std::size_t i = 0; i < hits.size(); ++i) {
            if (hits[i].doc_id != brute[i].doc_id)
                return fail("query '" + text + "': order differs at position " + std::to_string(i + 1));
            worst = std::max(worst, std::abs(hits[i].score - brute[i].score));
        }
        compared += hits.size();
    }
    const std::string d = "1000 docs, 100 queries, " + std::to_string(compared) +
                          " ranked docs, max |score diff| = " + sci(worst);
    return worst <= 1e-6 ? pass(d) : fail(d);
}

Outcome bm25_hand_value() {
    const auto index = build_index(std::vector<Passage>{{"d1", "cat sat"}, {"d2", "dog ran fast"}});
    const std::vector<std::string> query{"cat"};
    const double s = bm25_score(index, query, 0, {});
    const double expected = 0.379187;
    const std::string d = "score=" + fmt(s, 8) + " expected=" + fmt(expected) + " |diff|=" +
                          sci(std::abs(s - expected)) + " (ln2/1.828=" + fmt(std::log(2.0) / 1.828, 8) + ")";
    return std::abs(s - expected) < kHandTolerance ? pass(d) : fail(d);
}

QueryRanking ranking_of(const std::string& qid, const std::vector<std::string>& docs) {
    QueryRanking r{qid, {}};
    for (std::size_t i = 0; i < docs.size(); ++i)
        r.entries.push_back({docs[i], static_cast<std::uint32_t>(i + 1), static_cast<double>(docs.size() - i), "t"});
    return r;
}

Outcome provenance_properties() {
    const auto ranges = RankRanges::standard();
    std::vector<std::string> docs;
    for (int i = 1; i <= 1000; ++i) docs.push_back("d" + std::to_string(i));

    RunFile base;
    base.add(ranking_of("q", docs));
    const auto identity = provenance(base, base, ranges, Stratum::all());
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            if (identity.ratios[r][c] != (r == c ? 1.0 : 0.0)) return fail("identity re-ranking is not the identity");

    auto reversed = docs;
    std::reverse(reversed.begin(), reversed.end());
    RunFile rev;
    rev.add(ranking_of("q", reversed));
    const auto m = provenance(base, rev, ranges, Stratum::all());
    const std::vector<std::vector<std::uint64_t>> forced = {{0, 0, 0, 10}, {0, 0, 0, 90}, {0, 0, 0, 400}, {10, 90, 400, 0}};
    if (m.counts != forced) return fail("reversal counts differ from the forced mapping");
    if (m.ratios[0] != std::vector<double>{0, 0, 0, 1}) return fail("reversal top row is not [0,0,0,1]");

    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> depth(1, 1000);
    std::size_t checked_rows = 0;
    for (int iter = 0; iter < 50; ++iter) {
        RunFile a, b;
        for (int q = 0; q < 5; ++q) {
            std::vector<std::string> d(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(depth(rng)));
            a.add(ranking_of(std::to_string(q), d));
            std::shuffle(d.begin(), d.end(), rng);
            b.add(ranking_of(std::to_string(q), d));
        }
        // Half the grades random so graded strata are exercised too.
        Qrels qrels;
        std::uniform_int_distribution<int> g(0, 3);
        std::bernoulli_distribution judged(0.3);
        for (const auto& q : a.queries())
            for (const auto& e : q.entries)
                if (judged(rng)) qrels.add(q.query_id, e.doc_id, g(rng));
        for (const auto& stratum : {Stratum::all(), Stratum::highly_relevant(), Stratum::relevant(), Stratum::non_relevant()}) {
            const auto ab = provenance(a, b, ranges, stratum, &qrels);
            const auto ba = provenance(b, a, ranges, stratum, &qrels);
            for (std::size_t r = 0; r < 4; ++r) {
                for (std::size_t c = 0; c < 4; ++c)
                    if (ab.counts[r][c] != ba.counts[c][r]) return fail("transpose symmetry violated");
                for (const auto* mat : {&ab, &ba}) {
                    if (mat->row_empty(r)) continue;
                    const double s = std::accumulate(mat->ratios[r].begin(), mat->ratios[r].end(), 0.0);
                    if (std::abs(s - 1.0) > 1e-9) return fail("row sum " + std::to_string(s));
                    ++checked_rows;
                }
            }
        }
    }
    return pass("identity, reversal, " + std::to_string(checked_rows) + " rows stochastic, transpose symmetric");
}

Outcome masking_properties() {
    std::size_t pairs = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        oracle::TextGenerator gen(50, seed * 7);
        for (int i = 0; i < 50; ++i) {
            const Query q{"q", gen.text(1, 5)};
            const Passage p{"d", gen.text(0, 60)};
            const Masker masker(q.text);
            const auto only = masker.apply(p.text, MaskMode::only_q);
            const auto drop = masker.apply(p.text, MaskMode::drop_q);
            const auto& an = Masker::analyzer();
            const auto orig = an.analyze(p.text);
            const auto t_only = an.analyze(only);
            const auto t_drop = an.analyze(drop);
            if (t_only.size() != orig.size() || t_drop.size() != orig.size()) return fail("token count changed");
            for (std::size_t k = 0; k < orig.size(); ++k) {
                if (t_only[k].is_mask() == t_drop[k].is_mask()) return fail("masked positions not complementary");
                if (!t_only[k].is_mask() && !masker.query_terms().count(t_only[k].normalized))
                    return fail("Only-Q kept a non-query term");
                if (!t_drop[k].is_mask() && masker.query_terms().count(t_drop[k].normalized))
                    return fail("Drop-Q kept a query term");
            }
            if (masker.apply(only, MaskMode::only_q) != only) return fail("Only-Q is not idempotent");
            ++pairs;
        }
    }
    return pass(std::to_string(pairs) + " random pairs");
}

Outcome index_round_trip() {
    std::size_t corrupted = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        oracle::TextGenerator gen(200, seed * 13);
        const auto index = build_index(gen.corpus(200 * seed, 30));
        const auto bytes = index.serialize();
        const auto back = InvertedIndex::deserialize(bytes);
        if (back.num_docs() != index.num_docs() || back.num_terms() != index.num_terms() || back.avgdl() != index.avgdl())
            return fail("statistics differ after round trip");
        for (std::size_t t = 0; t < index.num_terms(); ++t) {
            if (back.term(t) != index.term(t)) return fail("dictionary differs");
            const auto a = index.lookup(index.term(t));
            const auto b = back.lookup(index.term(t));
            if (a.df != b.df || a.postings != b.postings) return fail("postings differ for " + index.term(t));
        }
        for (std::size_t d = 0; d < index.num_docs(); ++d) {
            const auto o = static_cast<DocOrdinal>(d);
            if (back.doc_id(o) != index.doc_id(o) || back.doc_length(o) != index.doc_length(o))
                return fail("document table differs");
        }
        if (back.serialize() != bytes) return fail("re-serialization differs");

        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pos(8, bytes.size() - 1);
        for (int k = 0; k < 50; ++k) {
            auto bad = bytes;
            bad[pos(rng)] ^= static_cast<std::uint8_t>(1U << (k % 8));
            try {
                InvertedIndex::deserialize(bad);
                return fail("corrupted file accepted");
            } catch (const CorruptionError&) {
                ++corrupted;
            }
        }
        auto truncated = bytes;
        truncated.resize(bytes.size() / 2);
        try {
            InvertedIndex::deserialize(truncated);
            return fail("truncated file accepted");
        } catch (const CorruptionError&) {
            ++corrupted;
        }
    }
    return pass("10 random indexes round-trip; " + std::to_string(corrupted) + " corrupted files rejected");
}

Outcome msmarco_reproduction() {
    const char* dir_env = std::getenv("RANKDIAG_MSMARCO_DIR");
    if (!dir_env) return {Verdict::skip, "set RANKDIAG_MSMARCO_DIR to run (needs the ~4 GB MS MARCO passage collection)"};
    const std::filesystem::path dir(dir_env);
    const auto collection = dir / "collection.tsv";
    const auto queries_path = dir / "msmarco-test2020-queries.tsv";
    const auto qrels_path = dir / "2020qrels-pass.txt";
    const unsigned threads = std::max(1U, std::thread::hardware_concurrency());

    std::filesystem::path index_path = dir / "msmarco-passage.rlix";
    if (const char* p = std::getenv("RANKDIAG_MSMARCO_INDEX")) index_path = p;
    if (!std::filesystem::exists(index_path)) {
        CorpusReader reader(collection);
        build_index(reader, Analyzer{}, {.threads = threads}).save(index_path);
    }
    const auto index = InvertedIndex::load(index_path);
    const auto queries = read_queries(queries_path);
    const auto qrels = read_qrels(qrels_path);
    const auto run = bm25_run(index, queries, {}, "bm25", Analyzer{}, threads);
    const auto report = evaluate(run, qrels);

    const double ndcg = 100 * report.ndcg, map = 100 * report.map, mrr = 100 * report.mrr;
    const bool ok = std::abs(ndcg - 49.59) <= 1.5 && std::abs(map - 27.47) <= 1.5 && std::abs(mrr - 67.06) <= 2.0;
    const std::string d = "NDCG@10=" + fmt(ndcg, 2) + " MAP=" + fmt(map, 2) + " MRR=" + fmt(mrr, 2) + " over " +
                          std::to_string(report.query_count) + " queries (targets 49.59/27.47/67.06)";
    return ok ? pass(d) : fail(d);
}

}  // namespace

// Exit codes: 0 all selected criteria passed, 1 a criterion failed,
// 77 every selected criterion was skipped, 64 unknown criterion id.
int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"metric_oracle", "metric oracle equivalence (NDCG@10, MAP, MRR vs brute force, 1e-9)", 1.0, metric_oracle_equivalence},
        {"metric_hand_values", "hand-derived metric values (0.796707, 0.833333, 0.333333)", 0.0, hand_metric_values},
        {"bm25_oracle", "BM25 oracle equivalence (1000 docs, k=inf, 1e-6, exact order)", 5.0, bm25_oracle_equivalence},
        {"bm25_hand_value", "BM25 hand value score(cat, d1) = 0.379187", 0.0, bm25_hand_value},
        {"provenance", "provenance properties (identity, reversal, row sums, transpose)", 1.0, provenance_properties},
        {"masking", "masking properties (complementarity, length, vocabulary, idempotence)", 5.0, masking_properties},
        {"index_round_trip", "index round trip and checksum rejection", 0.0, index_round_trip},
        {"msmarco", "MS MARCO BM25 reproduction (large data, optional)", 0.0, msmarco_reproduction},
    };

    std::vector<std::string> selected(argv + 1, argv + argc);
    if (!selected.empty() && selected[0] == "--list") {
        for (const auto& c : criteria) std::cout << c.id << '\n';
        return 0;
    }
    for (const auto& id : selected) {
        if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.id == id; })) {
            std::cerr << "unknown criterion '" << id << "'\n";
            return 64;
        }
    }

    int failures = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.verdict == Verdict::pass && c.time_limit_s > 0 && secs > c.time_limit_s) {
            o = fail(o.detail + "; took " + fmt(secs, 3) + " s, limit " + fmt(c.time_limit_s, 1) + " s");
        }
        const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "SKIP";
        if (o.verdict == Verdict::fail) ++failures;
        if (o.verdict != Verdict::skip) ++ran;
        std::cout << '[' << tag << "] " << c.id << ": " << c.name << " -- " << o.detail << " (" << fmt(secs, 3) << " s)\n";
    }
    if (failures > 0) {
        std::cout << failures << " criteria failed\n";
        return 1;
    }
    if (ran == 0) return 77;
    std::cout << "all run criteria passed\n";
    return 0;
}
