#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rankdiag/corpus_io.hpp"
#include "rankdiag/index.hpp"
#include "rankdiag/textprep.hpp"

namespace rankdiag {

/// Lucene-style BM25 scoring and top-k retrieval.
///
///   score(q, d) = sum over distinct t in q with tf(t, d) > 0 of
///                 idf(t) * tf / (tf + k1 * (1 - b + b * dl / avgdl))
///   idf(t)      = ln(1 + (N - df + 0.5) / (df + 0.5))
///
/// There is no (k1 + 1) factor in the numerator.
struct Bm25Params {
    static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

    double k1 = 0.9;
    double b = 0.4;
    std::size_t k = 1000;

    /// Throws RangeError unless k1 > 0, 0 <= b <= 1 and k > 0.
    void validate() const;
};

double bm25_idf(std::uint64_t num_docs, std::uint32_t df) noexcept;

double bm25_term_weight(double idf, std::uint32_t tf, std::uint32_t dl, double avgdl, const Bm25Params& params) noexcept;

/// Distinct terms in first-occurrence order.
std::vector<std::string> distinct_terms(std::vector<std::string> terms);

/// Score of a single document. Scans postings linearly, so it is meant for
/// spot checks, not for ranking a collection.
double bm25_score(const InvertedIndex& index, std::span<const std::string> query_terms, DocOrdinal doc,
                  const Bm25Params& params);

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Term-at-a-time retrieval with a reusable dense accumulator. One instance
/// per thread; the index is shared.
class Bm25Searcher {
  public:
    Bm25Searcher(const InvertedIndex& index, Bm25Params params, Analyzer analyzer = {});

    /// Matches sorted by score descending, doc id ascending on ties; only
    /// documents with a positive score; at most params.k of them.
    std::vector<ScoredDoc> search(std::string_view query_text);
    std::vector<ScoredDoc> search_terms(std::span<const std::string> query_terms);

  private:
    const InvertedIndex& index_;
    Bm25Params params_;
    Analyzer analyzer_;
    std::vector<double> accumulator_;
    std::vector<DocOrdinal> touched_;
};

std::vector<ScoredDoc> retrieve(const InvertedIndex& index, const Query& query, const Bm25Params& params,
                                const Analyzer& analyzer = {});

/// Retrieves every query and assigns ranks 1..n. Queries without matches
/// are left out of the run. Output is independent of `threads`.
RunFile bm25_run(const InvertedIndex& index, std::span<const Query> queries, const Bm25Params& params,
                 const std::string& tag = "bm25", const Analyzer& analyzer = {}, unsigned threads = 1);

}  // namespace rankdiag
