#pragma once

#include <dact/bytes.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dact {

/// Element of the BN254 scalar field,
/// p = 21888242871839275222246405745257275088548364400416034343698204186575808495617.
///
/// Stored in Montgomery form over four little-endian 64-bit limbs; the value
/// is always fully reduced so equality is limb equality. The canonical
/// external encoding is 32 bytes big-endian.
class FieldElement {
public:
    using Limbs = std::array<std::uint64_t, 4>;

    static const Limbs kModulus;

    constexpr FieldElement() noexcept = default;

    static FieldElement from_u64(std::uint64_t v) noexcept;

    /// Rejects encodings >= p.
    static std::optional<FieldElement> from_canonical(ByteView be32);

    /// Interprets up to 32 big-endian bytes as an integer and reduces mod p.
    static FieldElement from_bytes_reduce(ByteView be);

    /// Canonical 64-hex-digit form (with or without 0x). Throws
    /// std::invalid_argument for malformed or non-canonical input.
    static FieldElement from_hex(std::string_view hex);

    std::array<std::uint8_t, 32> to_bytes() const noexcept;
    std::string to_hex() const { return dact::to_hex(to_bytes()); }

    /// Plain (non-Montgomery) little-endian limbs.
    Limbs to_limbs() const noexcept;
    static FieldElement from_limbs(const Limbs& plain) noexcept; // reduces

    bool is_zero() const noexcept { return (m_[0] | m_[1] | m_[2] | m_[3]) == 0; }

    FieldElement operator+(const FieldElement& o) const noexcept;
    FieldElement operator-(const FieldElement& o) const noexcept;
    FieldElement operator*(const FieldElement& o) const noexcept;
    FieldElement operator-() const noexcept;
    FieldElement& operator+=(const FieldElement& o) noexcept { return *this = *this + o; }
    FieldElement& operator*=(const FieldElement& o) noexcept { return *this = *this * o; }

    FieldElement square() const noexcept { return *this * *this; }
    FieldElement pow(std::uint64_t e) const noexcept;
    /// Multiplicative inverse; the inverse of zero is zero.
    FieldElement inverse() const noexcept;

    friend bool operator==(const FieldElement&, const FieldElement&) = default;

    /// Total order on the canonical integer value (for ordered containers).
    friend bool operator<(const FieldElement& a, const FieldElement& b) noexcept;

private:
    Limbs m_{}; // Montgomery form
};

} // namespace dact
