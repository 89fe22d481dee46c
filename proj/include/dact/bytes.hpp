#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dact {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);

/// Accepts an optional "0x" prefix. Throws std::invalid_argument on odd
/// length or a non-hex digit.
Bytes from_hex(std::string_view hex);

/// 32-byte big-endian word, the integer encoding used on every wire format.
std::array<std::uint8_t, 32> be_word(std::uint64_t v) noexcept;

inline void append(Bytes& out, ByteView data)
{
    out.insert(out.end(), data.begin(), data.end());
}

inline ByteView as_bytes(std::string_view s) noexcept
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// True iff `needle` occurs anywhere in `haystack` (empty needle never matches).
bool contains_bytes(ByteView haystack, ByteView needle) noexcept;

} // namespace dact
