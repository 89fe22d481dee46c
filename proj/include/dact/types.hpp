#pragma once

#include <dact/bytes.hpp>
#include <dact/field.hpp>
#include <dact/keccak.hpp>
#include <dact/rng.hpp>

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dact {

// Tiers: versions and chain ids live in disjoint integer ranges so one can
// never be mistaken for the other.
inline constexpr std::uint64_t kMinVersion = 1;
inline constexpr std::uint64_t kMaxVersion = 1000;
inline constexpr std::uint64_t kMinChainId = 1001;
inline constexpr std::uint64_t kMaxChainId = 10000;

constexpr bool is_valid_version(std::uint64_t v) noexcept { return v >= kMinVersion && v <= kMaxVersion; }
constexpr bool is_valid_chain_id(std::uint64_t v) noexcept { return v >= kMinChainId && v <= kMaxChainId; }

class ChainId {
public:
    /// Throws ChainIdOutOfTier outside [1001, 10000].
    explicit ChainId(std::uint64_t value);
    std::uint64_t value() const noexcept { return value_; }
    std::array<std::uint8_t, 32> word() const noexcept { return be_word(value_); }
    FieldElement field() const noexcept { return FieldElement::from_u64(value_); }
    friend auto operator<=>(const ChainId&, const ChainId&) = default;

private:
    std::uint64_t value_;
};

class Version {
public:
    /// Throws VersionOutOfTier outside [1, 1000].
    explicit Version(std::uint64_t value);
    std::uint64_t value() const noexcept { return value_; }
    std::array<std::uint8_t, 32> word() const noexcept { return be_word(value_); }
    friend auto operator<=>(const Version&, const Version&) = default;

private:
    std::uint64_t value_;
};

/// Opaque 20-byte contract or account identifier.
struct Address {
    std::array<std::uint8_t, 20> bytes{};

    static Address from_label(std::string_view label); // first 20 bytes of keccak256(label)
    static Address from_hex(std::string_view hex);
    std::string to_hex() const { return dact::to_hex(bytes); }
    friend auto operator<=>(const Address&, const Address&) = default;
};

struct Note {
    FieldElement secret;
    FieldElement nullifier;
    FieldElement salt;
};

using Payload = std::array<std::uint8_t, 32>;

struct PayloadIntent {
    Payload payload{};
    ChainId dest_chain;
};

struct DappGlobalHash {
    ByteHash32 digest;
    std::string to_hex() const { return digest.to_hex(); }
    friend auto operator<=>(const DappGlobalHash&, const DappGlobalHash&) = default;
};

inline constexpr int kTpcBits = 73;

/// Low 73 bits of a Keccak digest; always < 2^73, hence a valid field element.
struct TrustlessPublicCommitment {
    FieldElement value;
    friend bool operator==(const TrustlessPublicCommitment&, const TrustlessPublicCommitment&) = default;
};

struct Leaf {
    FieldElement value;
    FieldElement commitment;
    TrustlessPublicCommitment tpc;
    ChainId source_chain;

    /// What the dApp signs: 32-byte big-endian leaf value.
    std::array<std::uint8_t, 32> canonical_bytes() const noexcept { return value.to_bytes(); }
};

struct DepositRequest {
    FieldElement commitment;
    ByteHash32 obfuscated_data;
    Version version;
    Address dapp_address;

    friend bool operator==(const DepositRequest&, const DepositRequest&) = default;
};

Note note_new(SeededRng& rng);

FieldElement nullifier_hash(const FieldElement& nullifier);

/// keccak256(payload || dest_chain_id as word || salt as word).
ByteHash32 obfuscate(const PayloadIntent& intent, const FieldElement& salt);

/// Low 73 bits of keccak256(global_hash || version as word || obfuscated_data).
TrustlessPublicCommitment trustless_public_commitment(const DappGlobalHash& g, Version v, const ByteHash32& od);

/// (commitment + tpc + source_chain) mod p.
Leaf make_leaf(const FieldElement& commitment, const TrustlessPublicCommitment& tpc, ChainId source_chain);

/// keccak256(caller || others...) in submitted order. Throws CallerInList,
/// DuplicateAddress, or PreconditionViolated for an empty list.
DappGlobalHash dapp_global_hash(const Address& caller, std::span<const Address> others);

/// Fixed 116-byte layout:
///   [0, 32)    commitment, big-endian field element
///   [32, 64)   obfuscated data
///   [64, 96)   version, big-endian word
///   [96, 116)  dApp contract address
inline constexpr std::size_t kDepositWireSize = 116;

Bytes serialize_deposit(const DepositRequest& req);
/// Throws MalformedDeposit on wrong length, non-canonical commitment, or a
/// version outside its tier.
DepositRequest parse_deposit(ByteView bytes);

} // namespace dact
