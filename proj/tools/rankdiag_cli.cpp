// rankdiag: index, retrieve, evaluate, provenance and mask subcommands.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rankdiag/error.hpp"
#include "rankdiag/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kIo = 3 };

int run_cli(int argc, char** argv) {
    using namespace rankdiag;

    CLI::App app{"Ranking diagnostics: BM25 candidates, TREC evaluation, rank provenance, masking ablations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "rankdiag 1.0.0");

    // index
    std::string corpus_path, index_path;
    unsigned threads = 1;
    auto* index_cmd = app.add_subcommand("index", "Build an inverted index from an id<TAB>text corpus");
    index_cmd->add_option("--corpus", corpus_path, "Passage collection (TSV)")->required();
    index_cmd->add_option("--index", index_path, "Output index file")->required();
    index_cmd->add_option("--threads", threads, "Analysis threads")->capture_default_str()->check(CLI::PositiveNumber);

    // retrieve
    std::string queries_path, out_run, tag = "bm25";
    Bm25Params params;
    auto* retrieve_cmd = app.add_subcommand("retrieve", "Retrieve BM25 top-k candidates into a TREC run");
    retrieve_cmd->add_option("--index", index_path, "Index file")->required();
    retrieve_cmd->add_option("--queries", queries_path, "Queries (TSV)")->required();
    retrieve_cmd->add_option("--output", out_run, "Output run file")->required();
    retrieve_cmd->add_option("--k", params.k, "Depth per query")->capture_default_str();
    retrieve_cmd->add_option("--k1", params.k1, "BM25 k1")->capture_default_str();
    retrieve_cmd->add_option("-b,--b", params.b, "BM25 b")->capture_default_str();
    retrieve_cmd->add_option("--tag", tag, "Run tag")->capture_default_str();
    retrieve_cmd->add_option("--threads", threads, "Query threads")->capture_default_str()->check(CLI::PositiveNumber);

    // evaluate
    std::string run_path, qrels_path, format = "table";
    pipeline::EvaluateConfig eval_config;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "NDCG@k, MAP and MRR of a run against graded qrels");
    evaluate_cmd->add_option("--run", run_path, "Run file")->required();
    evaluate_cmd->add_option("--qrels", qrels_path, "Qrels file")->required();
    evaluate_cmd->add_option("--format", format, "table or kv")->capture_default_str()->check(CLI::IsMember({"table", "kv"}));
    evaluate_cmd->add_flag("--per-query", eval_config.per_query, "Also print per-query values");
    evaluate_cmd->add_option("--ndcg-cutoff", eval_config.eval.ndcg_cutoff, "NDCG cutoff")->capture_default_str();
    evaluate_cmd->add_option("--mrr-cutoff", eval_config.eval.mrr_cutoff, "MRR cutoff, 0 = full depth")->capture_default_str();
    evaluate_cmd->add_option("--map-depth", eval_config.eval.map_depth, "AP depth")->capture_default_str();
    evaluate_cmd->add_option("--binarize-at", eval_config.eval.binarize_at, "Minimum grade counted relevant for MAP/MRR")
        ->capture_default_str()
        ->check(CLI::Range(0, 3));
    evaluate_cmd->add_flag("--clamp-grades", eval_config.clamp_grades, "Clamp grades outside 0..3 instead of failing");

    // provenance
    std::string base_path, target_path, ranges_spec = "10,100,500,1000", out_prefix, aggregation = "pooled";
    std::string prov_qrels;
    std::vector<std::string> strata{"all"};
    bool allow_unknown = false;
    auto* prov_cmd = app.add_subcommand("provenance", "Rank-range provenance of a re-ranked run vs. its base run");
    prov_cmd->add_option("--base", base_path, "Base run (e.g. BM25)")->required();
    prov_cmd->add_option("--target", target_path, "Re-ranked run")->required();
    prov_cmd->add_option("--qrels", prov_qrels, "Qrels, required for graded strata");
    prov_cmd->add_option("--stratum", strata,
                         "all, highly_relevant, relevant, non_relevant, or name:grades (repeatable)")
        ->capture_default_str();
    prov_cmd->add_option("--ranges", ranges_spec, "Upper bounds of rank ranges")->capture_default_str();
    prov_cmd->add_option("--aggregation", aggregation, "pooled or per_query_mean")
        ->capture_default_str()
        ->check(CLI::IsMember({"pooled", "per_query_mean"}));
    prov_cmd->add_flag("--allow-unknown-origin", allow_unknown,
                       "Count target docs missing from the base run in an extra column");
    prov_cmd->add_option("--output-prefix", out_prefix, "Output path prefix")->required();

    // mask
    std::string mode_name;
    std::string mask_out;
    auto* mask_cmd = app.add_subcommand("mask", "Write Only-Q / Drop-Q masked pairs for every run entry");
    mask_cmd->add_option("--run", run_path, "Candidate run")->required();
    mask_cmd->add_option("--queries", queries_path, "Queries (TSV)")->required();
    mask_cmd->add_option("--corpus", corpus_path, "Passage collection (TSV)")->required();
    mask_cmd->add_option("--mode", mode_name, "only_q or drop_q")->required()->check(CLI::IsMember({"only_q", "drop_q"}));
    mask_cmd->add_option("--output", mask_out, "Output pair file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*index_cmd) {
            const auto s = pipeline::index_corpus(corpus_path, index_path, threads);
            std::cerr << "indexed " << s.documents << " documents, " << s.terms << " terms, avgdl " << s.avgdl << '\n';
        } else if (*retrieve_cmd) {
            const auto n = pipeline::retrieve(index_path, queries_path, params, tag, out_run, threads);
            std::cerr << "wrote rankings for " << n << " queries to " << out_run << '\n';
        } else if (*evaluate_cmd) {
            eval_config.format = format == "kv" ? pipeline::ReportFormat::kv : pipeline::ReportFormat::table;
            pipeline::evaluate(run_path, qrels_path, eval_config, std::cout, std::cerr);
        } else if (*prov_cmd) {
            pipeline::ProvenanceConfig config;
            config.ranges = RankRanges::parse(ranges_spec);
            config.strata.clear();
            for (const auto& s : strata) config.strata.push_back(Stratum::parse(s));
            config.options.allow_unknown_origin = allow_unknown;
            config.options.aggregation = aggregation == "pooled" ? Aggregation::pooled : Aggregation::per_query_mean;
            std::optional<std::filesystem::path> qrels;
            if (!prov_qrels.empty()) qrels = prov_qrels;
            for (const auto& o : pipeline::provenance(base_path, target_path, qrels, config, out_prefix))
                std::cerr << o.stratum.name << ": " << o.matrix.total() << " documents -> " << o.json << '\n';
        } else if (*mask_cmd) {
            const auto n = pipeline::mask(run_path, queries_path, corpus_path, parse_mask_mode(mode_name), mask_out);
            std::cerr << "wrote " << n << " masked pairs to " << mask_out << '\n';
        }
    } catch (const IoError& e) {
        std::cerr << "rankdiag: I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "rankdiag: error: " << e.what() << '\n';
        return kData;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
