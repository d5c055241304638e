#include "rankdiag/index.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "rankdiag/error.hpp"
#include "rankdiag/varint.hpp"

namespace rankdiag {
namespace {

constexpr char kMagic[4] = {'R', 'L', 'I', 'X'};
constexpr std::size_t kHeaderBytes = 40;
constexpr std::size_t kTrailerBytes = 8;

class ByteWriter {
  public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void u32(std::uint32_t v) { fixed(v, 4); }
    void u64(std::uint64_t v) { fixed(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void raw(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        out_.insert(out_.end(), p, p + n);
    }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }

  private:
    void fixed(std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    std::vector<std::uint8_t>& out_;
};

class ByteReader {
  public:
    ByteReader(std::span<const std::uint8_t> in, std::size_t pos) : in_(in), pos_(pos) {}

    std::uint32_t u32() { return static_cast<std::uint32_t>(fixed(4)); }
    std::uint64_t u64() { return fixed(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::span<const std::uint8_t> bytes(std::uint64_t n) {
        need(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::string str() {
        const auto n = u32();
        auto b = bytes(n);
        return std::string(reinterpret_cast<const char*>(b.data()), b.size());
    }
    std::size_t pos() const noexcept { return pos_; }

  private:
    void need(std::uint64_t n) const {
        if (n > in_.size() - pos_) throw CorruptionError("index file truncated");
    }
    std::uint64_t fixed(int bytes) {
        need(static_cast<std::uint64_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_;
};

// Distinct terms with their within-document frequency, sorted by term.
using TermCounts = std::vector<std::pair<std::string, std::uint32_t>>;

TermCounts count_terms(std::vector<std::string> terms) {
    std::sort(terms.begin(), terms.end());
    TermCounts counts;
    for (auto& t : terms) {
        if (!counts.empty() && counts.back().first == t) {
            ++counts.back().second;
        } else {
            counts.emplace_back(std::move(t), 1);
        }
    }
    return counts;
}

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool PostingCursor::next(Posting& out) {
    if (remaining_ == 0) return false;
    std::uint32_t gap = 0;
    std::uint32_t tf = 0;
    if (!varint::decode(bytes_, pos_, gap) || !varint::decode(bytes_, pos_, tf))
        throw CorruptionError("malformed postings");
    last_ += gap;
    out = Posting{last_, tf};
    --remaining_;
    return true;
}

std::optional<std::size_t> InvertedIndex::find_term(std::string_view term) const {
    auto it = term_slot_.find(term);
    if (it == term_slot_.end()) return std::nullopt;
    return it->second;
}

PostingCursor InvertedIndex::cursor(std::string_view term) const {
    auto slot = find_term(term);
    if (!slot) return {};
    const auto& e = entries_[*slot];
    return PostingCursor(std::span<const std::uint8_t>(postings_).subspan(e.offset, e.length), e.df);
}

PostingsList InvertedIndex::lookup(std::string_view term) const {
    PostingsList list;
    auto c = cursor(term);
    list.df = c.remaining();
    list.postings.reserve(list.df);
    Posting p;
    while (c.next(p)) list.postings.push_back(p);
    return list;
}

std::uint32_t InvertedIndex::df(std::string_view term) const {
    auto slot = find_term(term);
    return slot ? entries_[*slot].df : 0;
}

std::optional<DocOrdinal> InvertedIndex::ordinal(std::string_view doc_id) const {
    auto it = doc_slot_.find(doc_id);
    if (it == doc_slot_.end()) return std::nullopt;
    return it->second;
}

void InvertedIndex::finalize_maps() {
    term_slot_.clear();
    term_slot_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) term_slot_.emplace(terms_[i], i);
    doc_slot_.clear();
    doc_slot_.reserve(doc_ids_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        if (!doc_slot_.emplace(doc_ids_[i], static_cast<DocOrdinal>(i)).second)
            throw StructuralError("duplicate doc id '" + doc_ids_[i] + "'");
    }
}

std::vector<std::uint8_t> InvertedIndex::serialize() const {
    std::vector<std::uint8_t> out;
    ByteWriter w(out);
    w.raw(kMagic, sizeof kMagic);
    w.u32(kFormatVersion);
    w.u64(doc_ids_.size());
    w.u64(terms_.size());
    w.f64(avgdl_);
    w.u64(postings_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        w.str(terms_[i]);
        w.u32(entries_[i].df);
        w.u64(entries_[i].offset);
    }
    w.raw(postings_.data(), postings_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        w.str(doc_ids_[i]);
        w.u32(doc_lengths_[i]);
    }
    const auto checksum = fnv1a64(out);
    w.u64(checksum);
    return out;
}

InvertedIndex InvertedIndex::deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < sizeof kMagic) throw CorruptionError("index file empty or truncated");
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw FormatError("not an index file (bad magic)");
    if (bytes.size() < kHeaderBytes + kTrailerBytes) throw CorruptionError("index file truncated");

    ByteReader header(bytes, sizeof kMagic);
    const auto version = header.u32();
    if (version != kFormatVersion)
        throw FormatError("unsupported index format version " + std::to_string(version));

    const auto body = bytes.first(bytes.size() - kTrailerBytes);
    const auto stored = ByteReader(bytes, body.size()).u64();
    if (fnv1a64(body) != stored) throw CorruptionError("index checksum mismatch");

    InvertedIndex index;
    const auto num_docs = header.u64();
    const auto num_terms = header.u64();
    index.avgdl_ = header.f64();
    const auto postings_size = header.u64();
    if (num_docs > std::numeric_limits<DocOrdinal>::max()) throw CorruptionError("document count out of range");

    ByteReader r(body, kHeaderBytes);
    index.terms_.reserve(std::min<std::uint64_t>(num_terms, body.size()));
    index.entries_.reserve(std::min<std::uint64_t>(num_terms, body.size()));
    for (std::uint64_t i = 0; i < num_terms; ++i) {
        auto term = r.str();
        TermEntry e;
        e.df = r.u32();
        e.offset = r.u64();
        if (!index.terms_.empty() && !(index.terms_.back() < term)) throw CorruptionError("dictionary not sorted");
        if (e.df == 0 || e.df > num_docs) throw CorruptionError("document frequency out of range");
        if (!index.entries_.empty()) {
            auto& prev = index.entries_.back();
            if (e.offset < prev.offset) throw CorruptionError("postings offsets not ascending");
            prev.length = e.offset - prev.offset;
        }
        index.terms_.push_back(std::move(term));
        index.entries_.push_back(e);
    }
    if (!index.entries_.empty()) {
        auto& last = index.entries_.back();
        if (last.offset > postings_size) throw CorruptionError("postings offset out of range");
        last.length = postings_size - last.offset;
    }
    if (!index.entries_.empty() && index.entries_.front().offset != 0)
        throw CorruptionError("postings section does not start at offset 0");

    auto postings = r.bytes(postings_size);
    index.postings_.assign(postings.begin(), postings.end());

    index.doc_ids_.reserve(num_docs);
    index.doc_lengths_.reserve(num_docs);
    for (std::uint64_t i = 0; i < num_docs; ++i) {
        index.doc_ids_.push_back(r.str());
        index.doc_lengths_.push_back(r.u32());
    }
    if (r.pos() != body.size()) throw CorruptionError("trailing bytes after document table");

    index.finalize_maps();
    return index;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
    const auto bytes = serialize();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on " + path.string());
    return deserialize(bytes);
}

IndexBuilder::IndexBuilder(Analyzer analyzer, Options options)
    : analyzer_(std::move(analyzer)), options_(options) {
    if (options_.threads == 0) options_.threads = 1;
    if (options_.batch_size == 0) options_.batch_size = 1;
}

void IndexBuilder::add(Passage passage) {
    pending_.push_back(std::move(passage));
    if (pending_.size() >= options_.batch_size) flush();
}

void IndexBuilder::flush() {
    if (pending_.empty()) return;
    const std::size_t n = pending_.size();
    std::vector<TermCounts> counts(n);
    std::vector<std::uint32_t> lengths(n);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            auto terms = analyzer_.terms(pending_[i].text);
            lengths[i] = static_cast<std::uint32_t>(terms.size());
            counts[i] = count_terms(std::move(terms));
        }
    };
    const std::size_t threads = std::min<std::size_t>(options_.threads, n);
    if (threads <= 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const auto doc = static_cast<DocOrdinal>(doc_ids_.size());
        doc_ids_.push_back(std::move(pending_[i].doc_id));
        doc_lengths_.push_back(lengths[i]);
        for (auto& [term, tf] : counts[i]) {
            auto [it, fresh] = term_ids_.try_emplace(term, static_cast<std::uint32_t>(term_names_.size()));
            if (fresh) {
                term_names_.push_back(term);
                accumulators_.emplace_back();
            }
            auto& acc = accumulators_[it->second];
            varint::encode(doc - acc.last, acc.bytes);
            varint::encode(tf, acc.bytes);
            acc.last = doc;
            ++acc.df;
        }
    }
    pending_.clear();
}

InvertedIndex IndexBuilder::finish() {
    flush();
    std::vector<std::uint32_t> order(term_names_.size());
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return term_names_[a] < term_names_[b]; });

    InvertedIndex index;
    std::size_t total = 0;
    for (const auto& acc : accumulators_) total += acc.bytes.size();
    index.postings_.reserve(total);
    index.terms_.reserve(order.size());
    index.entries_.reserve(order.size());
    for (auto id : order) {
        auto& acc = accumulators_[id];
        InvertedIndex::TermEntry e;
        e.df = acc.df;
        e.offset = index.postings_.size();
        e.length = acc.bytes.size();
        index.postings_.insert(index.postings_.end(), acc.bytes.begin(), acc.bytes.end());
        index.terms_.push_back(std::move(term_names_[id]));
        index.entries_.push_back(e);
        std::vector<std::uint8_t>().swap(acc.bytes);
    }
    index.doc_ids_ = std::move(doc_ids_);
    index.doc_lengths_ = std::move(doc_lengths_);
    if (!index.doc_lengths_.empty()) {
        const double sum = std::accumulate(index.doc_lengths_.begin(), index.doc_lengths_.end(), 0.0);
        index.avgdl_ = sum / static_cast<double>(index.doc_lengths_.size());
    }
    index.finalize_maps();

    term_ids_.clear();
    term_names_.clear();
    accumulators_.clear();
    return index;
}

InvertedIndex build_index(std::span<const Passage> corpus, const Analyzer& analyzer, IndexBuilder::Options options) {
    IndexBuilder builder(analyzer, options);
    for (const auto& p : corpus) builder.add(p);
    return builder.finish();
}

InvertedIndex build_index(CorpusReader& corpus, const Analyzer& analyzer, IndexBuilder::Options options) {
    IndexBuilder builder(analyzer, options);
    while (auto p = corpus.next()) builder.add(std::move(*p));
    return builder.finish();
}

}  // namespace rankdiag
