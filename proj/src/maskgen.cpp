#include "rankdiag/maskgen.hpp"

#include <fstream>
#include <unordered_map>

#include "rankdiag/error.hpp"

namespace rankdiag {

MaskMode parse_mask_mode(std::string_view name) {
    if (name == "only_q" || name == "only-q") return MaskMode::only_q;
    if (name == "drop_q" || name == "drop-q") return MaskMode::drop_q;
    throw RangeError("unknown mask mode '" + std::string(name) + "' (expected only_q or drop_q)");
}

std::string_view mask_mode_name(MaskMode mode) { return mode == MaskMode::only_q ? "only_q" : "drop_q"; }

const Analyzer& Masker::analyzer() {
    static const Analyzer a(Analyzer::Options{.recognize_mask_token = true});
    return a;
}

Masker::Masker(std::string_view query_text) {
    for (auto& t : analyzer().terms(query_text))
        if (t != kMaskToken) terms_.insert(std::move(t));
}

std::string Masker::apply(std::string_view passage_text, MaskMode mode) const {
    std::string out;
    out.reserve(passage_text.size());
    for (const auto& tok : analyzer().analyze(passage_text)) {
        if (!out.empty()) out += ' ';
        const bool is_query_term = !tok.is_mask() && terms_.count(tok.normalized) > 0;
        const bool keep = mode == MaskMode::only_q ? is_query_term : !tok.is_mask() && !is_query_term;
        out += keep ? std::string_view(tok.surface) : kMaskToken;
    }
    return out;
}

MaskedPair mask_only_q(const Query& query, const Passage& passage) {
    return {query.query_id, passage.doc_id, Masker(query.text).apply(passage.text, MaskMode::only_q)};
}

MaskedPair mask_drop_q(const Query& query, const Passage& passage) {
    return {query.query_id, passage.doc_id, Masker(query.text).apply(passage.text, MaskMode::drop_q)};
}

namespace {

using QueryLookup = std::unordered_map<std::string_view, const Query*>;

QueryLookup resolve(const RunFile& run, std::span<const Query> queries, const Corpus& corpus) {
    QueryLookup by_id;
    for (const auto& q : queries) by_id.emplace(q.query_id, &q);
    for (const auto& q : run.queries()) {
        if (!by_id.count(q.query_id)) throw StructuralError("run query '" + q.query_id + "' not in query set");
        for (const auto& e : q.entries)
            if (!corpus.find(e.doc_id)) throw StructuralError("run doc '" + e.doc_id + "' not in corpus");
    }
    return by_id;
}

}  // namespace

std::size_t generate_masked_pairs(const RunFile& run, std::span<const Query> queries, const Corpus& corpus,
                                  MaskMode mode, std::ostream& out) {
    const auto by_id = resolve(run, queries, corpus);

    std::size_t records = 0;
    for (const auto& q : run.queries()) {
        const Query& query = *by_id.at(q.query_id);
        const Masker masker(query.text);
        for (const auto& e : q.entries) {
            out << query.query_id << '\t' << e.doc_id << '\t' << query.text << '\t'
                << masker.apply(corpus.find(e.doc_id)->text, mode) << '\n';
            ++records;
        }
    }
    return records;
}

std::size_t generate_masked_pairs(const RunFile& run, std::span<const Query> queries, const Corpus& corpus,
                                  MaskMode mode, const std::filesystem::path& path) {
    // Fail before creating the file.
    resolve(run, queries, corpus);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    const auto n = generate_masked_pairs(run, queries, corpus, mode, out);
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
    return n;
}

}  // namespace rankdiag
