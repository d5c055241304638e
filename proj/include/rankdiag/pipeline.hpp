#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rankdiag/bm25.hpp"
#include "rankdiag/maskgen.hpp"
#include "rankdiag/metrics.hpp"
#include "rankdiag/rankdiff.hpp"

// File-to-file entry points behind each CLI subcommand.
namespace rankdiag::pipeline {

struct IndexSummary {
    std::size_t documents = 0;
    std::size_t terms = 0;
    double avgdl = 0.0;
};

IndexSummary index_corpus(const std::filesystem::path& corpus, const std::filesystem::path& index_path,
                          unsigned threads = 1);

/// Returns the number of queries that produced a ranking.
std::size_t retrieve(const std::filesystem::path& index_path, const std::filesystem::path& queries,
                     const Bm25Params& params, const std::string& tag, const std::filesystem::path& out_run,
                     unsigned threads = 1);

enum class ReportFormat { table, kv };

struct EvaluateConfig {
    EvalOptions eval;
    ReportFormat format = ReportFormat::table;
    bool per_query = false;
    bool clamp_grades = false;
};

MetricReport evaluate(const std::filesystem::path& run, const std::filesystem::path& qrels,
                      const EvaluateConfig& config, std::ostream& out, std::ostream& log);

/// Prints a report in trec_eval-like layout.
void print_report(const MetricReport& report, const EvaluateConfig& config, std::ostream& out);

struct ProvenanceConfig {
    RankRanges ranges = RankRanges::standard();
    std::vector<Stratum> strata{Stratum::all()};
    ProvenanceOptions options;
};

struct ProvenanceOutputs {
    Stratum stratum;
    ProvenanceMatrix matrix;
    std::filesystem::path ratios_csv, counts_csv, json, svg;
};

/// Writes <prefix>.<stratum>.{ratios.csv,counts.csv,json,svg} per stratum.
std::vector<ProvenanceOutputs> provenance(const std::filesystem::path& base_run,
                                          const std::filesystem::path& target_run,
                                          const std::optional<std::filesystem::path>& qrels,
                                          const ProvenanceConfig& config, const std::filesystem::path& out_prefix);

std::size_t mask(const std::filesystem::path& run, const std::filesystem::path& queries,
                 const std::filesystem::path& corpus, MaskMode mode, const std::filesystem::path& out);

}  // namespace rankdiag::pipeline
