#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rankdiag/bm25.hpp"
#include "rankdiag/error.hpp"
#include "rankdiag/index.hpp"
#include "rankdiag/maskgen.hpp"
#include "rankdiag/metrics.hpp"
#include "rankdiag/pipeline.hpp"
#include "rankdiag/rankdiff.hpp"
#include "rankdiag/textprep.hpp"

namespace py = pybind11;
using namespace rankdiag;

namespace {

py::dict report_to_dict(const MetricReport& r) {
    py::dict per_query;
    for (const auto& q : r.per_query) {
        per_query[py::str(q.query_id)] = py::dict(py::arg("ndcg") = q.ndcg, py::arg("map") = q.ap, py::arg("mrr") = q.rr);
    }
    return py::dict(py::arg("ndcg") = r.ndcg, py::arg("map") = r.map, py::arg("mrr") = r.mrr,
                    py::arg("query_count") = r.query_count, py::arg("skipped_queries") = r.skipped_queries,
                    py::arg("per_query") = per_query);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "BM25 retrieval, TREC evaluation, rank provenance and masking ablations";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<DataError>(m, "DataError", error.ptr());
    py::register_exception<IoError>(m, "IoError", error.ptr());

    m.def("analyze", &analyze_terms, py::arg("text"), "Normalized tokens of `text`.");

    py::class_<Bm25Params>(m, "Bm25Params")
        .def(py::init([](double k1, double b, std::size_t k) { return Bm25Params{k1, b, k}; }), py::arg("k1") = 0.9,
             py::arg("b") = 0.4, py::arg("k") = 1000)
        .def_readwrite("k1", &Bm25Params::k1)
        .def_readwrite("b", &Bm25Params::b)
        .def_readwrite("k", &Bm25Params::k);

    py::class_<InvertedIndex>(m, "Index")
        .def_static(
            "build",
            [](const std::vector<std::pair<std::string, std::string>>& docs, unsigned threads) {
                IndexBuilder builder(Analyzer{}, {.threads = threads});
                for (const auto& [id, text] : docs) builder.add({id, text});
                return builder.finish();
            },
            py::arg("docs"), py::arg("threads") = 1, "Build from (doc_id, text) pairs.")
        .def_static("load", &InvertedIndex::load, py::arg("path"))
        .def("save", &InvertedIndex::save, py::arg("path"))
        .def_property_readonly("num_docs", &InvertedIndex::num_docs)
        .def_property_readonly("num_terms", &InvertedIndex::num_terms)
        .def_property_readonly("avgdl", &InvertedIndex::avgdl)
        .def("df", &InvertedIndex::df, py::arg("term"))
        .def(
            "postings",
            [](const InvertedIndex& idx, const std::string& term) {
                std::vector<std::pair<std::string, std::uint32_t>> out;
                for (const auto& p : idx.lookup(term).postings) out.emplace_back(idx.doc_id(p.doc), p.tf);
                return out;
            },
            py::arg("term"), "(doc_id, tf) pairs in doc order.")
        .def(
            "score",
            [](const InvertedIndex& idx, const std::string& query, const std::string& doc_id, const Bm25Params& p) {
                const auto ord = idx.ordinal(doc_id);
                if (!ord) throw py::key_error(doc_id);
                return bm25_score(idx, analyze_terms(query), *ord, p);
            },
            py::arg("query"), py::arg("doc_id"), py::arg("params") = Bm25Params{})
        .def(
            "search",
            [](const InvertedIndex& idx, const std::string& query, const Bm25Params& p) {
                std::vector<std::pair<std::string, double>> out;
                for (auto& h : retrieve(idx, {"q", query}, p)) out.emplace_back(std::move(h.doc_id), h.score);
                return out;
            },
            py::arg("query"), py::arg("params") = Bm25Params{}, "Ranked (doc_id, score) pairs.");

    m.def("ndcg_at_k",
          [](const std::vector<std::string>& ranking, const Qrels::Judgments& qrels, std::size_t k) {
              return ndcg_at_k(ranking, qrels, k);
          },
          py::arg("ranking"), py::arg("qrels"), py::arg("k") = 10);
    m.def("average_precision",
          [](const std::vector<std::string>& ranking, const Qrels::Judgments& qrels, int binarize_at) {
              return average_precision(ranking, qrels, binarize_at);
          },
          py::arg("ranking"), py::arg("qrels"), py::arg("binarize_at") = 2);
    m.def("reciprocal_rank",
          [](const std::vector<std::string>& ranking, const Qrels::Judgments& qrels, int binarize_at) {
              return reciprocal_rank(ranking, qrels, binarize_at);
          },
          py::arg("ranking"), py::arg("qrels"), py::arg("binarize_at") = 2);

    m.def("evaluate_files",
          [](const std::filesystem::path& run, const std::filesystem::path& qrels, std::size_t mrr_cutoff) {
              EvalOptions o;
              o.mrr_cutoff = mrr_cutoff;
              return report_to_dict(evaluate(read_run(run), read_qrels(qrels), o));
          },
          py::arg("run"), py::arg("qrels"), py::arg("mrr_cutoff") = 0,
          "Evaluate a TREC run file against a qrels file.");

    m.def("bm25_run_files",
          [](const std::filesystem::path& index, const std::filesystem::path& queries, const std::filesystem::path& out,
             const Bm25Params& params, const std::string& tag, unsigned threads) {
              return pipeline::retrieve(index, queries, params, tag, out, threads);
          },
          py::arg("index"), py::arg("queries"), py::arg("out"), py::arg("params") = Bm25Params{},
          py::arg("tag") = "bm25", py::arg("threads") = 1);

    m.def("provenance_files",
          [](const std::filesystem::path& base, const std::filesystem::path& target, const std::string& stratum,
             std::optional<std::filesystem::path> qrels, const std::string& ranges, bool allow_unknown_origin) {
              std::optional<Qrels> q;
              if (qrels) q = read_qrels(*qrels);
              ProvenanceOptions opts;
              opts.allow_unknown_origin = allow_unknown_origin;
              const auto mat = provenance(read_run(base), read_run(target), RankRanges::parse(ranges),
                                          Stratum::parse(stratum), q ? &*q : nullptr, opts);
              return py::dict(py::arg("counts") = mat.counts, py::arg("ratios") = mat.ratios,
                              py::arg("row_totals") = mat.row_totals, py::arg("queries") = mat.queries);
          },
          py::arg("base"), py::arg("target"), py::arg("stratum") = "all", py::arg("qrels") = py::none(),
          py::arg("ranges") = "10,100,500,1000", py::arg("allow_unknown_origin") = false,
          "Rank-provenance matrix of `target` against `base`.");

    m.def("mask_only_q",
          [](const std::string& query, const std::string& passage) {
              return Masker(query).apply(passage, MaskMode::only_q);
          },
          py::arg("query"), py::arg("passage"));
    m.def("mask_drop_q",
          [](const std::string& query, const std::string& passage) {
              return Masker(query).apply(passage, MaskMode::drop_q);
          },
          py::arg("query"), py::arg("passage"));
    m.def("mask_files",
          [](const std::filesystem::path& run, const std::filesystem::path& queries, const std::filesystem::path& corpus,
             const std::string& mode, const std::filesystem::path& out) {
              return pipeline::mask(run, queries, corpus, parse_mask_mode(mode), out);
          },
          py::arg("run"), py::arg("queries"), py::arg("corpus"), py::arg("mode"), py::arg("out"));
}
