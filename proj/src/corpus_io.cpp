#include "rankdiag/corpus_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "rankdiag/error.hpp"

namespace rankdiag {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    auto is_space = [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
    };
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        if (i == line.size()) break;
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) ++j;
        fields.push_back(line.substr(i, j - i));
        i = j;
    }
    return fields;
}

TsvReader::TsvReader(const std::filesystem::path& path, bool check_unique_ids)
    : source_(path.string()), in_(open_input(path)), check_unique_ids_(check_unique_ids) {}

std::optional<std::pair<std::string, std::string>> TsvReader::next() {
    if (!std::getline(in_, line_)) {
        if (in_.bad()) throw IoError("read failure on " + source_);
        return std::nullopt;
    }
    ++line_no_;
    const auto tab = line_.find('\t');
    if (tab == std::string::npos) throw ParseError(source_, line_no_, "expected id<TAB>text, found no TAB");
    if (line_.find('\t', tab + 1) != std::string::npos)
        throw ParseError(source_, line_no_, "expected 2 fields, found more");
    if (tab == 0) throw ParseError(source_, line_no_, "empty id");

    std::pair<std::string, std::string> record{line_.substr(0, tab), line_.substr(tab + 1)};
    if (check_unique_ids_ && !seen_.insert(record.first).second) {
        throw StructuralError(source_ + ":" + std::to_string(line_no_) + ": duplicate id '" +
                              record.first + "'");
    }
    return record;
}

std::optional<Passage> CorpusReader::next() {
    auto rec = reader_.next();
    if (!rec) return std::nullopt;
    return Passage{std::move(rec->first), std::move(rec->second)};
}

Corpus::Corpus(std::vector<Passage> passages) : passages_(std::move(passages)) {
    by_id_.reserve(passages_.size());
    for (std::size_t i = 0; i < passages_.size(); ++i) {
        if (!by_id_.emplace(passages_[i].doc_id, i).second)
            throw StructuralError("duplicate doc id '" + passages_[i].doc_id + "'");
    }
}

Corpus Corpus::load(const std::filesystem::path& path) { return Corpus(read_corpus(path)); }

const Passage* Corpus::find(std::string_view doc_id) const {
    auto it = by_id_.find(std::string(doc_id));
    return it == by_id_.end() ? nullptr : &passages_[it->second];
}

std::vector<Passage> read_corpus(const std::filesystem::path& path) {
    CorpusReader reader(path);
    std::vector<Passage> out;
    while (auto p = reader.next()) out.push_back(std::move(*p));
    return out;
}

std::vector<Query> read_queries(const std::filesystem::path& path) {
    TsvReader reader(path);
    std::vector<Query> out;
    while (auto rec = reader.next()) out.push_back(Query{std::move(rec->first), std::move(rec->second)});
    return out;
}

void Qrels::add(const std::string& query_id, const std::string& doc_id, int grade) {
    if (grade < 0 || grade > 3)
        throw RangeError("grade " + std::to_string(grade) + " outside 0..3 for (" + query_id + ", " + doc_id + ")");
    auto [it, fresh] = by_query_.try_emplace(query_id);
    if (fresh) query_order_.push_back(query_id);
    if (!it->second.emplace(doc_id, grade).second)
        throw StructuralError("duplicate judgment for (" + query_id + ", " + doc_id + ")");
    ++count_;
}

std::optional<int> Qrels::grade(std::string_view query_id, std::string_view doc_id) const {
    const auto* j = judgments(query_id);
    if (!j) return std::nullopt;
    auto it = j->find(std::string(doc_id));
    if (it == j->end()) return std::nullopt;
    return it->second;
}

const Qrels::Judgments* Qrels::judgments(std::string_view query_id) const {
    auto it = by_query_.find(std::string(query_id));
    return it == by_query_.end() ? nullptr : &it->second;
}

Qrels read_qrels(const std::filesystem::path& path, QrelsReadOptions options) {
    const std::string source = path.string();
    auto in = open_input(path);
    Qrels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_whitespace(line);
        if (fields.empty()) continue;
        if (fields.size() != 4)
            throw ParseError(source, line_no, "expected 4 fields (qid 0 docid grade), found " +
                                                  std::to_string(fields.size()));
        int grade = 0;
        if (!parse_int(fields[3], grade)) throw ParseError(source, line_no, "grade is not an integer");
        if (grade < 0 || grade > 3) {
            if (!options.clamp_grades)
                throw RangeError(source + ":" + std::to_string(line_no) + ": grade " + std::to_string(grade) +
                                 " outside 0..3");
            grade = std::clamp(grade, 0, 3);
        }
        try {
            qrels.add(std::string(fields[0]), std::string(fields[2]), grade);
        } catch (const StructuralError& e) {
            throw StructuralError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (in.bad()) throw IoError("read failure on " + source);
    return qrels;
}

void RunFile::add(QueryRanking ranking) {
    if (by_id_.count(ranking.query_id))
        throw StructuralError("query '" + ranking.query_id + "' added twice to run");
    std::unordered_set<std::string_view> docs;
    for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
        const auto& e = ranking.entries[i];
        if (e.rank != i + 1)
            throw StructuralError("query '" + ranking.query_id + "': expected rank " + std::to_string(i + 1) +
                                  ", found " + std::to_string(e.rank));
        if (!docs.insert(e.doc_id).second)
            throw StructuralError("query '" + ranking.query_id + "': doc '" + e.doc_id + "' ranked twice");
    }
    by_id_.emplace(ranking.query_id, queries_.size());
    queries_.push_back(std::move(ranking));
}

const QueryRanking* RunFile::find(std::string_view query_id) const {
    auto it = by_id_.find(std::string(query_id));
    return it == by_id_.end() ? nullptr : &queries_[it->second];
}

std::size_t RunFile::entry_count() const noexcept {
    std::size_t n = 0;
    for (const auto& q : queries_) n += q.entries.size();
    return n;
}

RunFile read_run(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    const std::string source = path.string();
    auto in = open_input(path);

    std::vector<QueryRanking> grouped;
    std::unordered_map<std::string, std::size_t> slot;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = split_whitespace(line);
        if (f.empty()) continue;
        if (f.size() != 6)
            throw ParseError(source, line_no,
                             "expected 6 fields (qid Q0 docid rank score tag), found " + std::to_string(f.size()));
        RunEntry e;
        e.doc_id = std::string(f[2]);
        if (!parse_int(f[3], e.rank) || e.rank == 0) throw ParseError(source, line_no, "rank is not a positive integer");
        if (!parse_double(f[4], e.score)) throw ParseError(source, line_no, "score is not a number");
        e.tag = std::string(f[5]);

        auto [it, fresh] = slot.try_emplace(std::string(f[0]), grouped.size());
        if (fresh) grouped.push_back(QueryRanking{std::string(f[0]), {}});
        grouped[it->second].entries.push_back(std::move(e));
    }
    if (in.bad()) throw IoError("read failure on " + source);

    RunFile run;
    for (auto& q : grouped) {
        std::stable_sort(q.entries.begin(), q.entries.end(),
                         [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
        if (warnings) {
            for (std::size_t i = 1; i < q.entries.size(); ++i) {
                if (q.entries[i].score > q.entries[i - 1].score) {
                    warnings->push_back(source + ": query '" + q.query_id + "': score increases at rank " +
                                        std::to_string(q.entries[i].rank));
                    break;
                }
            }
        }
        try {
            run.add(std::move(q));
        } catch (const StructuralError& e) {
            throw StructuralError(source + ": " + e.what());
        }
    }
    return run;
}

std::string format_score(double score) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.6f", score);
    std::string s(buf, static_cast<std::size_t>(n));
    if (s == "-0.000000") s.erase(0, 1);
    return s;
}

void write_run(const RunFile& run, std::ostream& out) {
    for (const auto& q : run.queries()) {
        for (const auto& e : q.entries) {
            out << q.query_id << " Q0 " << e.doc_id << ' ' << e.rank << ' ' << format_score(e.score) << ' '
                << (e.tag.empty() ? "run" : e.tag) << '\n';
        }
    }
}

void write_run(const RunFile& run, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_run(run, out);
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace rankdiag
