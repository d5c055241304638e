#include "rankdiag/pipeline.hpp"

#include <cstdio>
#include <fstream>

#include "rankdiag/error.hpp"

namespace rankdiag::pipeline {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failure on " + path.string());
}

std::string fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

}  // namespace

IndexSummary index_corpus(const std::filesystem::path& corpus, const std::filesystem::path& index_path,
                          unsigned threads) {
    CorpusReader reader(corpus);
    auto index = build_index(reader, Analyzer{}, IndexBuilder::Options{.threads = threads});
    index.save(index_path);
    return {index.num_docs(), index.num_terms(), index.avgdl()};
}

std::size_t retrieve(const std::filesystem::path& index_path, const std::filesystem::path& queries,
                     const Bm25Params& params, const std::string& tag, const std::filesystem::path& out_run,
                     unsigned threads) {
    params.validate();
    const auto qs = read_queries(queries);
    const auto index = InvertedIndex::load(index_path);
    if (index.num_docs() == 0) throw DataError("index " + index_path.string() + " is empty");
    const auto run = bm25_run(index, qs, params, tag, Analyzer{}, threads);
    write_run(run, out_run);
    return run.queries().size();
}

void print_report(const MetricReport& report, const EvaluateConfig& config, std::ostream& out) {
    const auto& o = config.eval;
    const std::string ndcg_name = "ndcg_cut_" + std::to_string(o.ndcg_cutoff);
    const std::string rr_name = o.mrr_cutoff == 0 ? "recip_rank" : "recip_rank_cut_" + std::to_string(o.mrr_cutoff);

    auto line = [&](const std::string& metric, const std::string& qid, const std::string& value) {
        if (config.format == ReportFormat::kv) {
            out << metric << '\t' << qid << '\t' << value << '\n';
        } else {
            char buf[256];
            std::snprintf(buf, sizeof buf, "%-22s\t%s\t%s\n", metric.c_str(), qid.c_str(), value.c_str());
            out << buf;
        }
    };
    const int places = config.format == ReportFormat::kv ? 6 : 4;
    if (config.per_query) {
        for (const auto& q : report.per_query) {
            line(ndcg_name, q.query_id, fixed(q.ndcg, places));
            line("map", q.query_id, fixed(q.ap, places));
            line(rr_name, q.query_id, fixed(q.rr, places));
        }
    }
    line("num_q", "all", std::to_string(report.query_count));
    line(ndcg_name, "all", fixed(report.ndcg, places));
    line("map", "all", fixed(report.map, places));
    line(rr_name, "all", fixed(report.mrr, places));
}

MetricReport evaluate(const std::filesystem::path& run_path, const std::filesystem::path& qrels_path,
                      const EvaluateConfig& config, std::ostream& out, std::ostream& log) {
    std::vector<std::string> warnings;
    const auto run = read_run(run_path, &warnings);
    for (const auto& w : warnings) log << "warning: " << w << '\n';
    const auto qrels = read_qrels(qrels_path, QrelsReadOptions{.clamp_grades = config.clamp_grades});
    auto report = rankdiag::evaluate(run, qrels, config.eval);
    if (report.skipped_queries > 0)
        log << "note: " << report.skipped_queries << " judged queries without positive grades were skipped\n";
    print_report(report, config, out);
    return report;
}

std::vector<ProvenanceOutputs> provenance(const std::filesystem::path& base_run,
                                          const std::filesystem::path& target_run,
                                          const std::optional<std::filesystem::path>& qrels_path,
                                          const ProvenanceConfig& config, const std::filesystem::path& out_prefix) {
    const auto base = read_run(base_run);
    const auto target = read_run(target_run);
    std::optional<Qrels> qrels;
    if (qrels_path) qrels = read_qrels(*qrels_path);

    const ProvenanceMetadata meta{run_tag(base), run_tag(target), qrels_path ? qrels_path->string() : std::string()};
    std::vector<ProvenanceOutputs> outputs;
    for (const auto& stratum : config.strata) {
        ProvenanceOutputs o{stratum,
                            rankdiag::provenance(base, target, config.ranges, stratum, qrels ? &*qrels : nullptr,
                                                 config.options),
                            {}, {}, {}, {}};
        const std::string stem = out_prefix.string() + "." + stratum.name;
        o.ratios_csv = stem + ".ratios.csv";
        o.counts_csv = stem + ".counts.csv";
        o.json = stem + ".json";
        o.svg = stem + ".svg";
        write_text(o.ratios_csv, ratios_csv(o.matrix));
        write_text(o.counts_csv, counts_csv(o.matrix));
        write_text(o.json, provenance_json(o.matrix, meta));
        render_heatmap(o.matrix, o.svg);
        outputs.push_back(std::move(o));
    }
    return outputs;
}

std::size_t mask(const std::filesystem::path& run_path, const std::filesystem::path& queries_path,
                 const std::filesystem::path& corpus_path, MaskMode mode, const std::filesystem::path& out) {
    const auto run = read_run(run_path);
    const auto queries = read_queries(queries_path);
    const auto corpus = Corpus::load(corpus_path);
    return generate_masked_pairs(run, queries, corpus, mode, out);
}

}  // namespace rankdiag::pipeline
