#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rankdiag {

/// Literal placeholder emitted by the masking ablations.
inline constexpr std::string_view kMaskToken = "[MASK]";

struct Token {
    std::string surface;     // bytes exactly as they appear in the source
    std::string normalized;  // lowercase form used for matching
    std::size_t begin = 0;   // byte offsets into the source, [begin, end)
    std::size_t end = 0;

    bool is_mask() const noexcept { return surface == kMaskToken; }

    friend bool operator==(const Token&, const Token&) = default;
};

/// Tokenizer shared by indexing, retrieval and masking.
///
/// Tokens are maximal runs of Unicode letters and digits (general categories
/// L* and N*); everything else separates. Tokens are lowercased code point by
/// code point. There is no stemming and no stopword list. Malformed UTF-8
/// bytes are treated as separators.
///
/// With `recognize_mask_token` set, the literal "[MASK]" is returned as a
/// single token whose surface and normalized forms are both "[MASK]", so
/// masked text can be re-analyzed without the placeholder turning into the
/// ordinary word "mask".
class Analyzer {
  public:
    struct Options {
        bool recognize_mask_token = false;
    };

    Analyzer() = default;
    explicit Analyzer(Options options) : options_(options) {}

    std::vector<Token> analyze(std::string_view text) const;

    /// Normalized forms only; the hot path for indexing and querying.
    std::vector<std::string> terms(std::string_view text) const;

    const Options& options() const noexcept { return options_; }

  private:
    template <typename Sink>
    void scan(std::string_view text, Sink&& sink) const;

    Options options_{};
};

/// Convenience wrappers over a default-configured Analyzer.
std::vector<Token> analyze(std::string_view text);
std::vector<std::string> analyze_terms(std::string_view text);

namespace unicode {

bool is_alnum(char32_t cp) noexcept;
char32_t to_lower(char32_t cp) noexcept;

}  // namespace unicode

}  // namespace rankdiag
