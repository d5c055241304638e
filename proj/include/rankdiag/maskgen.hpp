#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>

#include "rankdiag/corpus_io.hpp"
#include "rankdiag/textprep.hpp"

namespace rankdiag {

enum class MaskMode {
    only_q,  // keep query-term occurrences, mask everything else
    drop_q,  // mask query-term occurrences, keep everything else
};

MaskMode parse_mask_mode(std::string_view name);
std::string_view mask_mode_name(MaskMode mode);

struct MaskedPair {
    std::string query_id;
    std::string doc_id;
    std::string masked_text;

    friend bool operator==(const MaskedPair&, const MaskedPair&) = default;
};

/// Whole-word masking over analyzer tokens.
///
/// Query and passage are analyzed with the same rules; a passage token
/// matches when its normalized form is one of the query's normalized terms.
/// Kept tokens retain their surface form, masked ones become "[MASK]", and
/// the result is space-joined, so punctuation does not survive. A literal
/// "[MASK]" already in the passage is left as a mask in both modes.
class Masker {
  public:
    explicit Masker(std::string_view query_text);

    std::string apply(std::string_view passage_text, MaskMode mode) const;

    const std::unordered_set<std::string>& query_terms() const noexcept { return terms_; }

    /// Analyzer that treats "[MASK]" as one token.
    static const Analyzer& analyzer();

  private:
    std::unordered_set<std::string> terms_;
};

MaskedPair mask_only_q(const Query& query, const Passage& passage);
MaskedPair mask_drop_q(const Query& query, const Passage& passage);

/// One `query_id<TAB>doc_id<TAB>query_text<TAB>masked_text` line per run
/// entry, in run order. Throws StructuralError naming the first query or
/// document id that cannot be resolved. Returns the number of records.
std::size_t generate_masked_pairs(const RunFile& run, std::span<const Query> queries, const Corpus& corpus,
                                  MaskMode mode, std::ostream& out);
std::size_t generate_masked_pairs(const RunFile& run, std::span<const Query> queries, const Corpus& corpus,
                                  MaskMode mode, const std::filesystem::path& path);

}  // namespace rankdiag
