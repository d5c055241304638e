#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rankdiag/corpus_io.hpp"

namespace rankdiag {

// Metric primitives take a ranking as doc ids in rank order and the
// judgments of a single query. Unjudged documents have grade 0.

/// DCG@k / IDCG@k with linear gain and 1/log2(rank + 1) discount. IDCG is
/// taken over every judged grade of the query. 0 when IDCG is 0.
double ndcg_at_k(std::span<const std::string> ranking, const Qrels::Judgments& judgments, std::size_t k = 10);

/// Binarized AP: relevant iff grade >= binarize_at; ranks beyond `depth`
/// are ignored; normalized by the total number of relevant judgments.
double average_precision(std::span<const std::string> ranking, const Qrels::Judgments& judgments,
                         int binarize_at = 2, std::size_t depth = 1000);

/// 1/rank of the first relevant document within `cutoff`; 0 if none.
double reciprocal_rank(std::span<const std::string> ranking, const Qrels::Judgments& judgments,
                       int binarize_at = 2, std::size_t cutoff = 0 /* 0 = full depth */);

struct EvalOptions {
    std::size_t ndcg_cutoff = 10;
    int binarize_at = 2;
    std::size_t map_depth = 1000;
    std::size_t mrr_cutoff = 0;  // 0 = full run depth
};

struct QueryMetrics {
    std::string query_id;
    double ndcg = 0.0;
    double ap = 0.0;
    double rr = 0.0;
    bool retrieved = true;  // false if the run has no ranking for this query
};

struct MetricReport {
    std::vector<QueryMetrics> per_query;  // qrels order
    double ndcg = 0.0;
    double map = 0.0;
    double mrr = 0.0;
    std::size_t query_count = 0;
    std::size_t skipped_queries = 0;  // judged queries without any positive grade
};

/// Evaluates every qrels query with at least one positive grade. A judged
/// query missing from the run scores 0 on all metrics. Throws DataError when
/// run and qrels share no query.
MetricReport evaluate(const RunFile& run, const Qrels& qrels, const EvalOptions& options = {});

/// Neumaier-compensated mean.
double compensated_mean(std::span<const double> values);

std::vector<std::string> ranked_doc_ids(const QueryRanking& ranking);

}  // namespace rankdiag
