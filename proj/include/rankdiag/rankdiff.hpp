#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rankdiag/corpus_io.hpp"

namespace rankdiag {

struct RankRange {
    std::uint32_t first = 1;  // inclusive, 1-based
    std::uint32_t last = 1;   // inclusive

    std::string label() const { return std::to_string(first) + "-" + std::to_string(last); }
    friend bool operator==(const RankRange&, const RankRange&) = default;
};

/// Contiguous rank intervals starting at rank 1.
class RankRanges {
  public:
    /// Upper bounds of each interval, e.g. {10, 100, 500, 1000}. Throws
    /// RangeError unless strictly ascending and positive.
    explicit RankRanges(std::vector<std::uint32_t> upper_bounds);

    /// 1-10, 11-100, 101-500, 501-1000.
    static RankRanges standard() { return RankRanges({10, 100, 500, 1000}); }

    /// Parses "10,100,500,1000".
    static RankRanges parse(std::string_view bounds);

    std::size_t size() const noexcept { return ranges_.size(); }
    const RankRange& operator[](std::size_t i) const { return ranges_.at(i); }
    const std::vector<RankRange>& ranges() const noexcept { return ranges_; }
    std::uint32_t last_bound() const noexcept { return ranges_.back().last; }

    /// Interval holding `rank`, nullopt beyond the last bound.
    std::optional<std::size_t> index_of(std::uint32_t rank) const noexcept;

    friend bool operator==(const RankRanges&, const RankRanges&) = default;

  private:
    std::vector<RankRange> ranges_;
};

/// Relevance filter over (query, doc) pairs. Without a grade set every pair
/// qualifies, judged or not; otherwise only judged pairs with a listed grade.
struct Stratum {
    std::string name;
    std::optional<std::set<int>> grades;

    static Stratum all() { return {"all", std::nullopt}; }
    static Stratum highly_relevant() { return {"highly_relevant", std::set<int>{3}}; }
    static Stratum relevant() { return {"relevant", std::set<int>{2}}; }
    static Stratum non_relevant(bool include_related = true) {
        return include_related ? Stratum{"non_relevant", std::set<int>{0, 1}} : Stratum{"non_relevant", std::set<int>{0}};
    }

    /// Accepts the four stratum names, optionally followed by an explicit
    /// grade list: "non_relevant:0" or "custom:1,2".
    static Stratum parse(std::string_view spec);

    bool needs_qrels() const noexcept { return grades.has_value(); }
    std::string grades_label() const;
};

enum class Aggregation {
    pooled,          // sum counts over queries, then row-normalize
    per_query_mean,  // row-normalize each query, then average non-empty rows
};

struct ProvenanceOptions {
    /// Send target documents missing from the base ranking to an extra
    /// "unknown origin" column instead of failing.
    bool allow_unknown_origin = false;
    Aggregation aggregation = Aggregation::pooled;
};

/// Rows are target-run ranges, columns base-run ranges. When
/// `unknown_column` is set, ratios carry one extra trailing column.
struct ProvenanceMatrix {
    RankRanges ranges = RankRanges::standard();
    Stratum stratum = Stratum::all();
    Aggregation aggregation = Aggregation::pooled;
    bool unknown_column = false;

    std::vector<std::vector<std::uint64_t>> counts;  // ranges x ranges
    std::vector<std::uint64_t> unknown;              // per row
    std::vector<std::uint64_t> row_totals;           // includes unknown
    std::vector<std::vector<double>> ratios;         // all zero on empty rows
    std::size_t queries = 0;                         // queries contributing

    std::size_t columns() const noexcept { return ranges.size() + (unknown_column ? 1 : 0); }
    std::uint64_t total() const noexcept;
    bool row_empty(std::size_t row) const { return row_totals.at(row) == 0; }
};

/// Where the documents in each rank range of `target` sat in `base`.
///
/// Only queries present in both runs contribute. Target documents ranked
/// beyond the last bound are ignored, as are documents whose base rank is
/// beyond it. Throws StructuralError for a target document absent from its
/// base ranking (unless allow_unknown_origin) and DataError when a graded
/// stratum is requested without qrels.
ProvenanceMatrix provenance(const RunFile& base, const RunFile& target, const RankRanges& ranges,
                            const Stratum& stratum, const Qrels* qrels = nullptr,
                            const ProvenanceOptions& options = {});

struct ProvenanceMetadata {
    std::string base_tag;
    std::string target_tag;
    std::string qrels_path;
};

/// Header of range labels, one row per target range, 4 decimal places.
/// Empty rows are written as empty cells.
std::string ratios_csv(const ProvenanceMatrix& m);
std::string counts_csv(const ProvenanceMatrix& m);
std::string provenance_json(const ProvenanceMatrix& m, const ProvenanceMetadata& meta);

/// Stand-alone SVG heatmap: cells shaded by ratio and labelled with the
/// percentage, "–" for rows without documents.
std::string render_heatmap_svg(const ProvenanceMatrix& m, std::string_view title = {});
void render_heatmap(const ProvenanceMatrix& m, const std::filesystem::path& path, std::string_view title = {});

/// Percentage label as drawn in heatmap cells ("33%", "6.1%", "100%").
std::string percent_label(double ratio);

/// First tag found in a run, empty for an empty run.
std::string run_tag(const RunFile& run);

}  // namespace rankdiag
