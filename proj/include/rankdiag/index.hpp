#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankdiag/corpus_io.hpp"
#include "rankdiag/textprep.hpp"

namespace rankdiag {

using DocOrdinal = std::uint32_t;

struct Posting {
    DocOrdinal doc = 0;
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

struct PostingsList {
    std::uint32_t df = 0;
    std::vector<Posting> postings;
};

/// Forward iterator over one term's compressed postings.
class PostingCursor {
  public:
    PostingCursor() = default;
    PostingCursor(std::span<const std::uint8_t> bytes, std::uint32_t df) : bytes_(bytes), remaining_(df) {}

    /// Decodes the next posting; false when exhausted.
    bool next(Posting& out);
    std::uint32_t remaining() const noexcept { return remaining_; }

  private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::uint32_t remaining_ = 0;
    DocOrdinal last_ = 0;
};

/// Term dictionary plus compressed postings and per-document statistics.
///
/// Terms are kept sorted by their UTF-8 bytes; each term's postings are a
/// run of (doc-ordinal gap, tf) varint pairs. Doc ordinals follow corpus
/// order. The index is immutable once built or loaded and may be queried
/// from any number of threads.
class InvertedIndex {
  public:
    static constexpr std::uint32_t kFormatVersion = 1;

    InvertedIndex() = default;
    InvertedIndex(InvertedIndex&&) noexcept = default;
    InvertedIndex& operator=(InvertedIndex&&) noexcept = default;
    // Lookup tables view into the owned strings, so copies are not allowed.
    InvertedIndex(const InvertedIndex&) = delete;
    InvertedIndex& operator=(const InvertedIndex&) = delete;

    PostingsList lookup(std::string_view term) const;
    PostingCursor cursor(std::string_view term) const;
    std::uint32_t df(std::string_view term) const;

    std::size_t num_docs() const noexcept { return doc_ids_.size(); }
    std::size_t num_terms() const noexcept { return terms_.size(); }
    double avgdl() const noexcept { return avgdl_; }
    std::uint32_t doc_length(DocOrdinal doc) const { return doc_lengths_.at(doc); }
    std::span<const std::uint32_t> doc_lengths() const noexcept { return doc_lengths_; }

    const std::string& doc_id(DocOrdinal doc) const { return doc_ids_.at(doc); }
    std::optional<DocOrdinal> ordinal(std::string_view doc_id) const;

    /// i-th term in sorted order, for enumeration.
    const std::string& term(std::size_t i) const { return terms_.at(i); }
    std::uint32_t term_df(std::size_t i) const { return entries_.at(i).df; }

    std::size_t postings_bytes() const noexcept { return postings_.size(); }

    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

    /// Serialized form, as written by save().
    std::vector<std::uint8_t> serialize() const;
    static InvertedIndex deserialize(std::span<const std::uint8_t> bytes);

  private:
    friend class IndexBuilder;

    struct TermEntry {
        std::uint32_t df = 0;
        std::uint64_t offset = 0;  // into postings_
        std::uint64_t length = 0;  // bytes
    };

    std::optional<std::size_t> find_term(std::string_view term) const;
    void finalize_maps();

    std::vector<std::string> terms_;
    std::vector<TermEntry> entries_;
    std::unordered_map<std::string_view, std::size_t> term_slot_;
    std::vector<std::uint8_t> postings_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    std::unordered_map<std::string_view, DocOrdinal> doc_slot_;
    double avgdl_ = 0.0;
};

/// Incremental index construction.
///
/// Passages are buffered and analyzed in parallel batches; postings are
/// appended in corpus order afterwards, so the result does not depend on the
/// thread count.
class IndexBuilder {
  public:
    struct Options {
        unsigned threads = 1;
        std::size_t batch_size = 1 << 14;
    };

    explicit IndexBuilder(Analyzer analyzer = {}) : IndexBuilder(std::move(analyzer), Options{}) {}
    IndexBuilder(Analyzer analyzer, Options options);

    void add(Passage passage);
    /// Throws StructuralError if any doc id was added twice.
    InvertedIndex finish();

  private:
    struct TermAccumulator {
        std::vector<std::uint8_t> bytes;
        std::uint32_t df = 0;
        DocOrdinal last = 0;
    };

    void flush();

    Analyzer analyzer_;
    Options options_;
    std::vector<Passage> pending_;
    std::unordered_map<std::string, std::uint32_t> term_ids_;
    std::vector<std::string> term_names_;
    std::vector<TermAccumulator> accumulators_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
};

InvertedIndex build_index(std::span<const Passage> corpus, const Analyzer& analyzer = {},
                          IndexBuilder::Options options = {});
InvertedIndex build_index(CorpusReader& corpus, const Analyzer& analyzer = {},
                          IndexBuilder::Options options = {});

/// 64-bit FNV-1a, the checksum appended to index files.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace rankdiag
