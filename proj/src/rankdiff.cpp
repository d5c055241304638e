#include "rankdiag/rankdiff.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "rankdiag/error.hpp"

namespace rankdiag {
namespace {

std::vector<std::uint32_t> parse_uint_list(std::string_view s, const char* what) {
    std::vector<std::uint32_t> out;
    std::size_t i = 0;
    while (i <= s.size()) {
        auto j = s.find(',', i);
        if (j == std::string_view::npos) j = s.size();
        auto field = s.substr(i, j - i);
        std::uint32_t v = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
            throw RangeError(std::string("invalid ") + what + " list '" + std::string(s) + "'");
        out.push_back(v);
        i = j + 1;
    }
    return out;
}

using CountGrid = std::vector<std::vector<std::uint64_t>>;

std::string format_ratio(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", r);
    return buf;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

const char* aggregation_name(Aggregation a) { return a == Aggregation::pooled ? "pooled" : "per_query_mean"; }

}  // namespace

RankRanges::RankRanges(std::vector<std::uint32_t> upper_bounds) {
    if (upper_bounds.empty()) throw RangeError("at least one rank range is required");
    std::uint32_t first = 1;
    for (auto bound : upper_bounds) {
        if (bound < first) throw RangeError("rank range bounds must be positive and strictly ascending");
        ranges_.push_back({first, bound});
        first = bound + 1;
    }
}

RankRanges RankRanges::parse(std::string_view bounds) { return RankRanges(parse_uint_list(bounds, "rank range")); }

std::optional<std::size_t> RankRanges::index_of(std::uint32_t rank) const noexcept {
    if (rank == 0) return std::nullopt;
    for (std::size_t i = 0; i < ranges_.size(); ++i)
        if (rank <= ranges_[i].last) return i;
    return std::nullopt;
}

Stratum Stratum::parse(std::string_view spec) {
    const auto colon = spec.find(':');
    const auto name = spec.substr(0, colon);
    Stratum s;
    if (name == "all") {
        s = all();
    } else if (name == "highly_relevant") {
        s = highly_relevant();
    } else if (name == "relevant") {
        s = relevant();
    } else if (name == "non_relevant") {
        s = non_relevant();
    } else if (colon == std::string_view::npos) {
        throw RangeError("unknown stratum '" + std::string(spec) + "'");
    } else {
        s.name = std::string(name);
    }
    if (colon != std::string_view::npos) {
        std::set<int> grades;
        for (auto g : parse_uint_list(spec.substr(colon + 1), "grade")) {
            if (g > 3) throw RangeError("stratum grade " + std::to_string(g) + " outside 0..3");
            grades.insert(static_cast<int>(g));
        }
        s.grades = std::move(grades);
    }
    return s;
}

std::string Stratum::grades_label() const {
    if (!grades) return "*";
    std::string out;
    for (int g : *grades) {
        if (!out.empty()) out += ',';
        out += std::to_string(g);
    }
    return out;
}

std::uint64_t ProvenanceMatrix::total() const noexcept {
    std::uint64_t t = 0;
    for (auto r : row_totals) t += r;
    return t;
}

ProvenanceMatrix provenance(const RunFile& base, const RunFile& target, const RankRanges& ranges,
                            const Stratum& stratum, const Qrels* qrels, const ProvenanceOptions& options) {
    if (stratum.needs_qrels() && !qrels)
        throw DataError("stratum '" + stratum.name + "' requires relevance judgments");

    const std::size_t n = ranges.size();
    ProvenanceMatrix m{ranges, stratum, options.aggregation, options.allow_unknown_origin, {}, {}, {}, {}, 0};
    m.counts.assign(n, std::vector<std::uint64_t>(n, 0));
    m.unknown.assign(n, 0);
    m.row_totals.assign(n, 0);

    const std::size_t cols = m.columns();
    std::vector<std::vector<double>> ratio_sums(n, std::vector<double>(cols, 0.0));
    std::vector<std::size_t> ratio_terms(n, 0);

    std::unordered_map<std::string_view, std::uint32_t> base_rank;
    for (const auto& tq : target.queries()) {
        const auto* bq = base.find(tq.query_id);
        if (!bq) continue;
        ++m.queries;
        base_rank.clear();
        for (const auto& e : bq->entries) base_rank.emplace(e.doc_id, e.rank);

        CountGrid local(n, std::vector<std::uint64_t>(cols, 0));
        for (const auto& e : tq.entries) {
            const auto row = ranges.index_of(e.rank);
            if (!row) break;  // entries are rank-sorted
            if (stratum.grades) {
                const auto g = qrels->grade(tq.query_id, e.doc_id);
                if (!g || !stratum.grades->count(*g)) continue;
            }
            auto it = base_rank.find(e.doc_id);
            if (it == base_rank.end()) {
                if (!options.allow_unknown_origin)
                    throw StructuralError("query '" + tq.query_id + "': doc '" + e.doc_id +
                                          "' is not in the base ranking");
                ++local[*row][n];
                continue;
            }
            const auto col = ranges.index_of(it->second);
            if (!col) continue;
            ++local[*row][*col];
        }

        for (std::size_t r = 0; r < n; ++r) {
            std::uint64_t row_total = 0;
            for (std::size_t c = 0; c < cols; ++c) row_total += local[r][c];
            if (row_total == 0) continue;
            for (std::size_t c = 0; c < n; ++c) m.counts[r][c] += local[r][c];
            if (m.unknown_column) m.unknown[r] += local[r][n];
            m.row_totals[r] += row_total;
            for (std::size_t c = 0; c < cols; ++c)
                ratio_sums[r][c] += static_cast<double>(local[r][c]) / static_cast<double>(row_total);
            ++ratio_terms[r];
        }
    }

    m.ratios.assign(n, std::vector<double>(cols, 0.0));
    for (std::size_t r = 0; r < n; ++r) {
        if (m.row_totals[r] == 0) continue;
        for (std::size_t c = 0; c < cols; ++c) {
            if (options.aggregation == Aggregation::pooled) {
                const auto count = c < n ? m.counts[r][c] : m.unknown[r];
                m.ratios[r][c] = static_cast<double>(count) / static_cast<double>(m.row_totals[r]);
            } else {
                m.ratios[r][c] = ratio_sums[r][c] / static_cast<double>(ratio_terms[r]);
            }
        }
    }
    return m;
}

std::string ratios_csv(const ProvenanceMatrix& m) {
    std::ostringstream out;
    out << "range";
    for (const auto& r : m.ranges.ranges()) out << ',' << r.label();
    if (m.unknown_column) out << ",unknown";
    out << '\n';
    for (std::size_t r = 0; r < m.ranges.size(); ++r) {
        out << m.ranges[r].label();
        for (std::size_t c = 0; c < m.columns(); ++c) {
            out << ',';
            if (!m.row_empty(r)) out << format_ratio(m.ratios[r][c]);
        }
        out << '\n';
    }
    return out.str();
}

std::string counts_csv(const ProvenanceMatrix& m) {
    std::ostringstream out;
    out << "range";
    for (const auto& r : m.ranges.ranges()) out << ',' << r.label();
    if (m.unknown_column) out << ",unknown";
    out << ",total\n";
    for (std::size_t r = 0; r < m.ranges.size(); ++r) {
        out << m.ranges[r].label();
        for (auto v : m.counts[r]) out << ',' << v;
        if (m.unknown_column) out << ',' << m.unknown[r];
        out << ',' << m.row_totals[r] << '\n';
    }
    return out.str();
}

std::string provenance_json(const ProvenanceMatrix& m, const ProvenanceMetadata& meta) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json ranges = nlohmann::ordered_json::array();
    for (const auto& r : m.ranges.ranges()) ranges.push_back({{"first", r.first}, {"last", r.last}, {"label", r.label()}});
    j["ranges"] = ranges;
    j["stratum"] = {{"name", m.stratum.name},
                    {"grades", m.stratum.grades ? nlohmann::ordered_json(*m.stratum.grades) : nlohmann::ordered_json()}};
    j["aggregation"] = aggregation_name(m.aggregation);
    j["unknown_origin_column"] = m.unknown_column;
    j["queries"] = m.queries;
    j["counts"] = m.counts;
    if (m.unknown_column) j["unknown_counts"] = m.unknown;
    j["row_totals"] = m.row_totals;
    nlohmann::ordered_json ratios = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < m.ranges.size(); ++r)
        ratios.push_back(m.row_empty(r) ? nlohmann::ordered_json() : nlohmann::ordered_json(m.ratios[r]));
    j["ratios"] = ratios;
    j["provenance"] = {{"base_run_tag", meta.base_tag},
                       {"target_run_tag", meta.target_tag},
                       {"qrels", meta.qrels_path.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(meta.qrels_path)}};
    return j.dump(2) + "\n";
}

std::string percent_label(double ratio) {
    const double pct = ratio * 100.0;
    char buf[32];
    if (pct > 0.0 && pct < 9.95) {
        std::snprintf(buf, sizeof buf, "%.1f%%", pct);
    } else {
        std::snprintf(buf, sizeof buf, "%.0f%%", pct);
    }
    return buf;
}

std::string render_heatmap_svg(const ProvenanceMatrix& m, std::string_view title) {
    constexpr int cell = 80;
    constexpr int left = 110;
    constexpr int top = 60;
    const int rows = static_cast<int>(m.ranges.size());
    const int cols = static_cast<int>(m.columns());
    const int width = left + cols * cell + 20;
    const int height = top + rows * cell + 70;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    const std::string heading = title.empty() ? "stratum: " + m.stratum.name : std::string(title);
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(heading)
        << "</text>\n";

    for (int r = 0; r < rows; ++r) {
        const bool empty = m.row_empty(static_cast<std::size_t>(r));
        for (int c = 0; c < cols; ++c) {
            const double v = empty ? 0.0 : m.ratios[r][c];
            // White to dark blue.
            const int red = static_cast<int>(255 - v * (255 - 8));
            const int green = static_cast<int>(255 - v * (255 - 48));
            const int blue = static_cast<int>(255 - v * (255 - 107));
            const int x = left + c * cell;
            const int y = top + r * cell;
            char fill[8];
            std::snprintf(fill, sizeof fill, "#%02x%02x%02x", red, green, blue);
            svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
                << "\" fill=\"" << (empty ? "#eeeeee" : fill) << "\" stroke=\"#999999\"/>\n";
            svg << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 5
                << "\" text-anchor=\"middle\" font-size=\"14\" fill=\"" << (v > 0.5 ? "#ffffff" : "#000000") << "\">"
                << (empty ? "–" : percent_label(v)) << "</text>\n";
        }
        svg << "<text x=\"" << left - 8 << "\" y=\"" << top + r * cell + cell / 2 + 5
            << "\" text-anchor=\"end\" font-size=\"13\">" << m.ranges[r].label() << "</text>\n";
    }
    for (int c = 0; c < cols; ++c) {
        const std::string label = c < rows ? m.ranges[c].label() : "unknown";
        svg << "<text x=\"" << left + c * cell + cell / 2 << "\" y=\"" << top + rows * cell + 20
            << "\" text-anchor=\"middle\" font-size=\"13\">" << label << "</text>\n";
    }
    svg << "<text x=\"" << left + cols * cell / 2 << "\" y=\"" << top + rows * cell + 50
        << "\" text-anchor=\"middle\" font-size=\"13\">base run rank range</text>\n";
    svg << "<text x=\"16\" y=\"" << top + rows * cell / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << top + rows * cell / 2 << ")\">re-ranked run rank range</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void render_heatmap(const ProvenanceMatrix& m, const std::filesystem::path& path, std::string_view title) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << render_heatmap_svg(m, title);
    if (!out) throw IoError("write failure on " + path.string());
}

std::string run_tag(const RunFile& run) {
    for (const auto& q : run.queries())
        if (!q.entries.empty()) return q.entries.front().tag;
    return {};
}

}  // namespace rankdiag
