#pragma once

#include <dact/field.hpp>

#include <array>
#include <span>
#include <string_view>

namespace dact {

/// MiMC-Feistel with exponent 5 and 220 rounds. Round constants are the
/// iterated Keccak-256 chain seeded with "mimcsponge", reduced mod p, with the
/// first and last constants forced to zero.
inline constexpr int kMimcRounds = 220;

const std::array<FieldElement, kMimcRounds>& mimc_round_constants();

struct FeistelState {
    FieldElement left;
    FieldElement right;
};

/// One keyed Feistel permutation of (left, right). Not charged.
FeistelState mimc_feistel(FeistelState s, const FieldElement& key) noexcept;

/// Rate-1 sponge: for each input, left += input, then permute. Returns the
/// final left lane. Charges one mimc unit.
FieldElement mimc_sponge(std::span<const FieldElement> inputs, const FieldElement& key);

/// Two-to-one compression used by the Merkle tree: mimc_sponge({l, r}, 0).
FieldElement mimc_hash2(const FieldElement& left, const FieldElement& right);

/// keccak256(tag) reduced mod p; used for domain constants and ZERO.
FieldElement field_from_tag(std::string_view tag);

} // namespace dact
