#include "rankdiag/textprep.hpp"

#include <algorithm>
#include <iterator>

namespace rankdiag {
namespace unicode {
namespace {

struct CodePointRange {
    char32_t lo;
    char32_t hi;
};

struct LowerMapping {
    char32_t from;
    char32_t to;
};

#include "unicode_tables.inc"

constexpr char32_t kInvalid = 0xFFFFFFFF;

struct Decoded {
    char32_t cp;
    std::size_t length;
};

// Strict UTF-8 decoding; anything malformed consumes one byte as kInvalid.
Decoded decode(std::string_view s, std::size_t i) noexcept {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return {b0, 1};

    std::size_t len;
    char32_t cp;
    char32_t min;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
        return {kInvalid, 1};
    }
    if (i + len > s.size()) return {kInvalid, 1};
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return {kInvalid, 1};
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return {kInvalid, 1};
    return {cp, len};
}

void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace

bool is_alnum(char32_t cp) noexcept {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    auto it = std::upper_bound(std::begin(kAlnumRanges), std::end(kAlnumRanges), cp,
                               [](char32_t v, const CodePointRange& r) { return v < r.lo; });
    if (it == std::begin(kAlnumRanges)) return false;
    --it;
    return cp <= it->hi;
}

char32_t to_lower(char32_t cp) noexcept {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    auto it = std::lower_bound(std::begin(kLowerMappings), std::end(kLowerMappings), cp,
                               [](const LowerMapping& m, char32_t v) { return m.from < v; });
    if (it != std::end(kLowerMappings) && it->from == cp) return it->to;
    return cp;
}

}  // namespace unicode

// Calls sink(begin, end, normalized) for every token in order.
template <typename Sink>
void Analyzer::scan(std::string_view text, Sink&& sink) const {
    std::size_t i = 0;
    std::string normalized;
    while (i < text.size()) {
        if (options_.recognize_mask_token && text.compare(i, kMaskToken.size(), kMaskToken) == 0) {
            sink(i, i + kMaskToken.size(), std::string(kMaskToken));
            i += kMaskToken.size();
            continue;
        }
        auto d = unicode::decode(text, i);
        if (d.cp == unicode::kInvalid || !unicode::is_alnum(d.cp)) {
            i += d.length;
            continue;
        }
        const std::size_t begin = i;
        normalized.clear();
        while (i < text.size()) {
            d = unicode::decode(text, i);
            if (d.cp == unicode::kInvalid || !unicode::is_alnum(d.cp)) break;
            unicode::encode(unicode::to_lower(d.cp), normalized);
            i += d.length;
        }
        sink(begin, i, normalized);
    }
}

std::vector<Token> Analyzer::analyze(std::string_view text) const {
    std::vector<Token> tokens;
    scan(text, [&](std::size_t b, std::size_t e, const std::string& norm) {
        tokens.push_back(Token{std::string(text.substr(b, e - b)), norm, b, e});
    });
    return tokens;
}

std::vector<std::string> Analyzer::terms(std::string_view text) const {
    std::vector<std::string> out;
    scan(text, [&](std::size_t, std::size_t, const std::string& norm) { out.push_back(norm); });
    return out;
}

std::vector<Token> analyze(std::string_view text) { return Analyzer{}.analyze(text); }

std::vector<std::string> analyze_terms(std::string_view text) { return Analyzer{}.terms(text); }

}  // namespace rankdiag
