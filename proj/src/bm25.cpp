#include "rankdiag/bm25.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <unordered_set>

#include "rankdiag/error.hpp"

namespace rankdiag {

void Bm25Params::validate() const {
    if (!(k1 > 0.0)) throw RangeError("k1 must be > 0");
    if (!(b >= 0.0 && b <= 1.0)) throw RangeError("b must be in [0, 1]");
    if (k == 0) throw RangeError("k must be positive");
}

double bm25_idf(std::uint64_t num_docs, std::uint32_t df) noexcept {
    const double n = static_cast<double>(num_docs);
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double bm25_term_weight(double idf, std::uint32_t tf, std::uint32_t dl, double avgdl, const Bm25Params& params) noexcept {
    const double f = static_cast<double>(tf);
    const double norm = avgdl > 0.0 ? static_cast<double>(dl) / avgdl : 0.0;
    return idf * f / (f + params.k1 * (1.0 - params.b + params.b * norm));
}

std::vector<std::string> distinct_terms(std::vector<std::string> terms) {
    std::unordered_set<std::string> seen;
    std::vector<std::string> out;
    for (auto& t : terms) {
        if (seen.insert(t).second) out.push_back(std::move(t));
    }
    return out;
}

double bm25_score(const InvertedIndex& index, std::span<const std::string> query_terms, DocOrdinal doc,
                  const Bm25Params& params) {
    const auto unique = distinct_terms({query_terms.begin(), query_terms.end()});
    const auto dl = index.doc_length(doc);
    double total = 0.0;
    for (const auto& term : unique) {
        auto cursor = index.cursor(term);
        const auto df = cursor.remaining();
        Posting p;
        while (cursor.next(p) && p.doc <= doc) {
            if (p.doc == doc) {
                total += bm25_term_weight(bm25_idf(index.num_docs(), df), p.tf, dl, index.avgdl(), params);
                break;
            }
        }
    }
    return total;
}

Bm25Searcher::Bm25Searcher(const InvertedIndex& index, Bm25Params params, Analyzer analyzer)
    : index_(index), params_(params), analyzer_(std::move(analyzer)), accumulator_(index.num_docs(), 0.0) {
    params_.validate();
}

std::vector<ScoredDoc> Bm25Searcher::search(std::string_view query_text) {
    const auto terms = analyzer_.terms(query_text);
    return search_terms(terms);
}

std::vector<ScoredDoc> Bm25Searcher::search_terms(std::span<const std::string> query_terms) {
    const auto unique = distinct_terms({query_terms.begin(), query_terms.end()});
    const auto lengths = index_.doc_lengths();
    const double avgdl = index_.avgdl();

    for (const auto& term : unique) {
        auto cursor = index_.cursor(term);
        if (cursor.remaining() == 0) continue;
        const double idf = bm25_idf(index_.num_docs(), cursor.remaining());
        Posting p;
        while (cursor.next(p)) {
            if (accumulator_[p.doc] == 0.0) touched_.push_back(p.doc);
            accumulator_[p.doc] += bm25_term_weight(idf, p.tf, lengths[p.doc], avgdl, params_);
        }
    }

    auto better = [&](DocOrdinal a, DocOrdinal b) {
        if (accumulator_[a] != accumulator_[b]) return accumulator_[a] > accumulator_[b];
        return index_.doc_id(a) < index_.doc_id(b);
    };
    const std::size_t keep = std::min(params_.k, touched_.size());
    std::partial_sort(touched_.begin(), touched_.begin() + static_cast<std::ptrdiff_t>(keep), touched_.end(), better);

    std::vector<ScoredDoc> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back({index_.doc_id(touched_[i]), accumulator_[touched_[i]]});
    for (auto doc : touched_) accumulator_[doc] = 0.0;
    touched_.clear();
    return out;
}

std::vector<ScoredDoc> retrieve(const InvertedIndex& index, const Query& query, const Bm25Params& params,
                                const Analyzer& analyzer) {
    return Bm25Searcher(index, params, analyzer).search(query.text);
}

RunFile bm25_run(const InvertedIndex& index, std::span<const Query> queries, const Bm25Params& params,
                 const std::string& tag, const Analyzer& analyzer, unsigned threads) {
    params.validate();
    std::vector<std::vector<ScoredDoc>> results(queries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        Bm25Searcher searcher(index, params, analyzer);
        for (std::size_t i = next++; i < queries.size(); i = next++) results[i] = searcher.search(queries[i].text);
    };
    const unsigned n = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(queries.size())));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }

    RunFile run;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (results[i].empty()) continue;
        QueryRanking ranking{queries[i].query_id, {}};
        ranking.entries.reserve(results[i].size());
        std::uint32_t rank = 0;
        for (auto& hit : results[i]) ranking.entries.push_back({std::move(hit.doc_id), ++rank, hit.score, tag});
        run.add(std::move(ranking));
    }
    return run;
}

}  // namespace rankdiag
