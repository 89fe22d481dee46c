#pragma once

#include <dact/field.hpp>
#include <dact/keccak.hpp>

#include <cstdint>
#include <span>
#include <string_view>

namespace dact {

/// Deterministic byte stream keyed by a root seed and a label path.
///
/// Every actor gets its own child stream (`child("wallet/alice")`), so adding
/// draws in one actor never shifts another actor's randomness.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t root_seed);

    SeededRng child(std::string_view label) const;

    void fill(std::span<std::uint8_t> out);
    std::uint64_t next_u64();
    /// Uniform in [0, bound); bound must be > 0.
    std::uint64_t uniform(std::uint64_t bound);

private:
    explicit SeededRng(const ByteHash32& key) : key_(key) {}

    ByteHash32 key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint8_t, 32> block_{};
    std::size_t used_ = 32;
};

/// 31 random bytes read big-endian; always < 2^248 < p.
FieldElement random_field_31(SeededRng& rng);

} // namespace dact
