#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rankdiag::varint {

/// Base-128, little-endian groups, high bit set on every byte but the last.
inline void encode(std::uint32_t value, std::vector<std::uint8_t>& out) {
    while (value >= 0x80) {
        out.push_back(static_cast<std::uint8_t>((value & 0x7F) | 0x80));
        value >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(value));
}

/// Decodes one value starting at `pos` and advances it. Returns false on a
/// truncated or over-long encoding, leaving `pos` unspecified.
inline bool decode(std::span<const std::uint8_t> in, std::size_t& pos, std::uint32_t& value) {
    value = 0;
    for (unsigned shift = 0; shift < 35; shift += 7) {
        if (pos >= in.size()) return false;
        const std::uint8_t byte = in[pos++];
        if (shift == 28 && (byte & 0x70)) return false;
        value |= static_cast<std::uint32_t>(byte & 0x7F) << shift;
        if (!(byte & 0x80)) return true;
    }
    return false;
}

}  // namespace rankdiag::varint
