#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rankdiag {

struct Passage {
    std::string doc_id;
    std::string text;

    friend bool operator==(const Passage&, const Passage&) = default;
};

struct Query {
    std::string query_id;
    std::string text;

    friend bool operator==(const Query&, const Query&) = default;
};

/// Streams `id<TAB>text` records one line at a time.
///
/// Only the current line is buffered. Id uniqueness is checked against a set
/// of previously seen ids unless disabled.
class TsvReader {
  public:
    explicit TsvReader(const std::filesystem::path& path, bool check_unique_ids = true);

    /// Next record, or nullopt at end of file. Throws ParseError or
    /// StructuralError (duplicate id).
    std::optional<std::pair<std::string, std::string>> next();

    std::size_t line_number() const noexcept { return line_no_; }

  private:
    std::string source_;
    std::ifstream in_;
    std::string line_;
    std::size_t line_no_ = 0;
    bool check_unique_ids_;
    std::unordered_set<std::string> seen_;
};

class CorpusReader {
  public:
    explicit CorpusReader(const std::filesystem::path& path, bool check_unique_ids = true)
        : reader_(path, check_unique_ids) {}

    std::optional<Passage> next();

  private:
    TsvReader reader_;
};

/// Whole corpus held in memory, addressed by doc id. File order is kept.
class Corpus {
  public:
    Corpus() = default;
    explicit Corpus(std::vector<Passage> passages);

    static Corpus load(const std::filesystem::path& path);

    const Passage* find(std::string_view doc_id) const;
    const std::vector<Passage>& passages() const noexcept { return passages_; }
    std::size_t size() const noexcept { return passages_.size(); }

  private:
    std::vector<Passage> passages_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

std::vector<Passage> read_corpus(const std::filesystem::path& path);
std::vector<Query> read_queries(const std::filesystem::path& path);

/// Graded judgments, grade in 0..3, at most one per (query, doc).
class Qrels {
  public:
    using Judgments = std::unordered_map<std::string, int>;

    void add(const std::string& query_id, const std::string& doc_id, int grade);

    /// Grade of a judged pair, nullopt when unjudged.
    std::optional<int> grade(std::string_view query_id, std::string_view doc_id) const;

    /// Judgments for a query; nullptr if the query has none.
    const Judgments* judgments(std::string_view query_id) const;

    /// Query ids in order of first appearance.
    const std::vector<std::string>& query_ids() const noexcept { return query_order_; }

    std::size_t judgment_count() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }

  private:
    std::unordered_map<std::string, Judgments> by_query_;
    std::vector<std::string> query_order_;
    std::size_t count_ = 0;
};

struct QrelsReadOptions {
    /// Clamp grades outside 0..3 into range instead of failing.
    bool clamp_grades = false;
};

Qrels read_qrels(const std::filesystem::path& path, QrelsReadOptions options = {});

struct RunEntry {
    std::string doc_id;
    std::uint32_t rank = 0;  // 1-based
    double score = 0.0;
    std::string tag;

    friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

struct QueryRanking {
    std::string query_id;
    std::vector<RunEntry> entries;  // sorted by rank

    friend bool operator==(const QueryRanking&, const QueryRanking&) = default;
};

/// Ranked lists per query. Queries keep insertion order.
class RunFile {
  public:
    /// Appends a ranking for a new query. Validates rank contiguity and
    /// doc-id uniqueness; throws StructuralError.
    void add(QueryRanking ranking);

    const QueryRanking* find(std::string_view query_id) const;
    const std::vector<QueryRanking>& queries() const noexcept { return queries_; }
    std::size_t entry_count() const noexcept;
    bool empty() const noexcept { return queries_.empty(); }

    friend bool operator==(const RunFile& a, const RunFile& b) { return a.queries_ == b.queries_; }

  private:
    std::vector<QueryRanking> queries_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Reads `qid Q0 docid rank score tag` lines (any whitespace). Entries are
/// re-sorted by rank. Score-order violations are reported through `warnings`
/// and are not fatal.
RunFile read_run(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Writes single-space separated lines, scores fixed-point with 6 decimals.
void write_run(const RunFile& run, const std::filesystem::path& path);
void write_run(const RunFile& run, std::ostream& out);

/// Byte-exact score rendering used by write_run.
std::string format_score(double score);

/// Splits on runs of ASCII whitespace.
std::vector<std::string_view> split_whitespace(std::string_view line);

}  // namespace rankdiag
