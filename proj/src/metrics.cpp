#include "rankdiag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rankdiag/error.hpp"

namespace rankdiag {
namespace {

int grade_of(const Qrels::Judgments& judgments, const std::string& doc) {
    auto it = judgments.find(doc);
    return it == judgments.end() ? 0 : it->second;
}

}  // namespace

double ndcg_at_k(std::span<const std::string> ranking, const Qrels::Judgments& judgments, std::size_t k) {
    std::vector<int> ideal;
    ideal.reserve(judgments.size());
    for (const auto& [doc, g] : judgments)
        if (g > 0) ideal.push_back(g);
    std::sort(ideal.begin(), ideal.end(), std::greater<>());

    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
    if (idcg == 0.0) return 0.0;

    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
        const int g = grade_of(judgments, ranking[i]);
        if (g > 0) dcg += g / std::log2(static_cast<double>(i) + 2.0);
    }
    return dcg / idcg;
}

double average_precision(std::span<const std::string> ranking, const Qrels::Judgments& judgments, int binarize_at,
                         std::size_t depth) {
    std::size_t total_relevant = 0;
    for (const auto& [doc, g] : judgments)
        if (g >= binarize_at) ++total_relevant;
    if (total_relevant == 0) return 0.0;

    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(depth, ranking.size()); ++i) {
        if (grade_of(judgments, ranking[i]) >= binarize_at) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

double reciprocal_rank(std::span<const std::string> ranking, const Qrels::Judgments& judgments, int binarize_at,
                       std::size_t cutoff) {
    const std::size_t n = cutoff == 0 ? ranking.size() : std::min(cutoff, ranking.size());
    for (std::size_t i = 0; i < n; ++i)
        if (grade_of(judgments, ranking[i]) >= binarize_at) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

double compensated_mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    double c = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    return (sum + c) / static_cast<double>(values.size());
}

std::vector<std::string> ranked_doc_ids(const QueryRanking& ranking) {
    std::vector<std::string> ids;
    ids.reserve(ranking.entries.size());
    for (const auto& e : ranking.entries) ids.push_back(e.doc_id);
    return ids;
}

MetricReport evaluate(const RunFile& run, const Qrels& qrels, const EvalOptions& options) {
    bool overlap = false;
    for (const auto& qid : qrels.query_ids())
        if (run.find(qid)) overlap = true;
    if (!overlap) throw DataError("run and qrels share no query");

    MetricReport report;
    std::vector<double> ndcg, ap, rr;
    for (const auto& qid : qrels.query_ids()) {
        const auto& judgments = *qrels.judgments(qid);
        const bool has_positive =
            std::any_of(judgments.begin(), judgments.end(), [](const auto& kv) { return kv.second > 0; });
        if (!has_positive) {
            ++report.skipped_queries;
            continue;
        }
        QueryMetrics m;
        m.query_id = qid;
        if (const auto* ranking = run.find(qid)) {
            const auto ids = ranked_doc_ids(*ranking);
            m.ndcg = ndcg_at_k(ids, judgments, options.ndcg_cutoff);
            m.ap = average_precision(ids, judgments, options.binarize_at, options.map_depth);
            m.rr = reciprocal_rank(ids, judgments, options.binarize_at, options.mrr_cutoff);
        } else {
            m.retrieved = false;
        }
        ndcg.push_back(m.ndcg);
        ap.push_back(m.ap);
        rr.push_back(m.rr);
        report.per_query.push_back(std::move(m));
    }
    report.query_count = report.per_query.size();
    report.ndcg = compensated_mean(ndcg);
    report.map = compensated_mean(ap);
    report.mrr = compensated_mean(rr);
    return report;
}

}  // namespace rankdiag
