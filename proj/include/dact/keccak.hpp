#pragma once

#include <dact/bytes.hpp>

#include <array>
#include <compare>
#include <cstdint>
#include <string>

namespace dact {

struct ByteHash32 {
    std::array<std::uint8_t, 32> bytes{};

    std::string to_hex() const { return dact::to_hex(bytes); }
    static ByteHash32 from_hex(std::string_view hex);

    friend auto operator<=>(const ByteHash32&, const ByteHash32&) = default;
};

/// Keccak-256 with the original 0x01 domain padding (the EVM variant, not
/// FIPS-202 SHA3-256). Charges one keccak block per permutation.
ByteHash32 keccak256(ByteView data);

namespace detail {
/// Same digest, not charged to the op-counter (seed derivation, RNG).
ByteHash32 keccak256_uncounted(ByteView data);
} // namespace detail

/// Number of Keccak-f[1600] permutations absorbing `len` bytes at rate 136.
constexpr std::uint64_t keccak_blocks(std::size_t len) noexcept
{
    return len / 136 + 1;
}

} // namespace dact
