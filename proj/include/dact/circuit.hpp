#pragma once

#include <dact/merkle.hpp>
#include <dact/rng.hpp>
#include <dact/signature.hpp>
#include <dact/types.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace dact {

enum class CircuitId : std::uint8_t { Settlement = 1, Revert = 2 };

std::string_view circuit_name(CircuitId id) noexcept;

// Settlement circuit signals.
struct SettlementWitness {
    FieldElement nullifier;
    FieldElement secret;
    MerklePath path;
    ChainId source_chain;
    Signature leaf_signature;
};

struct SettlementPublic {
    FieldElement nullifier_hash;
    FieldElement merkle_root;
    TrustlessPublicCommitment tpc;
    VerifyingKey dapp_key;

    friend bool operator==(const SettlementPublic&, const SettlementPublic&) = default;
};

// Revert circuit signals. The trustless public commitment is exposed so the
// destination router can bind the revert to the intended destination chain.
struct RevertWitness {
    FieldElement nullifier;
    FieldElement secret;
    MerklePath path;
};

struct RevertPublic {
    FieldElement commitment;
    ChainId source_chain;
    FieldElement nullifier_hash;
    FieldElement merkle_root;
    TrustlessPublicCommitment tpc;

    friend bool operator==(const RevertPublic&, const RevertPublic&) = default;
};

inline constexpr std::size_t kSettlementPublicSize = 128;
inline constexpr std::size_t kRevertPublicSize = 160;

Bytes encode_public(const SettlementPublic& p);
Bytes encode_public(const RevertPublic& p);
/// Throws InvalidProof if the bytes are not a well-formed signal vector.
SettlementPublic decode_settlement_public(ByteView bytes);
RevertPublic decode_revert_public(ByteView bytes);

/// Wire form: circuit id byte || canonical public signals || 32-byte attestation.
struct Proof {
    CircuitId circuit = CircuitId::Settlement;
    Bytes public_signals;
    std::array<std::uint8_t, 32> attestation{};

    Bytes serialize() const;
    /// Throws InvalidProof on unknown circuit id or length mismatch.
    static Proof parse(ByteView bytes);

    friend bool operator==(const Proof&, const Proof&) = default;
};

/// Name of the first failed constraint, in evaluation order, or nullopt.
/// Settlement order: "nullifier_hash", "merkle_root", "signature".
std::optional<std::string_view> settlement_violation(const SettlementWitness& w, const SettlementPublic& p);
/// Revert order: "commitment", "nullifier_hash", "merkle_root".
std::optional<std::string_view> revert_violation(const RevertWitness& w, const RevertPublic& p);

inline bool settlement_constraints(const SettlementWitness& w, const SettlementPublic& p)
{
    return !settlement_violation(w, p).has_value();
}
inline bool revert_constraints(const RevertWitness& w, const RevertPublic& p)
{
    return !revert_violation(w, p).has_value();
}

/// Simulated proving system. Each circuit has a secret attestation key that
/// only this object holds; a proof is a keyed Keccak tag over the circuit id
/// and the public signals, issued only when every constraint holds.
///
/// The output depends on (circuit, public signals, key) alone, so nothing
/// witness-derived can leak into a proof.
class ProofSystem {
public:
    explicit ProofSystem(SeededRng rng);

    /// Throws ConstraintViolation(<constraint name>).
    Proof prove(const SettlementWitness& w, const SettlementPublic& p) const;
    Proof prove(const RevertWitness& w, const RevertPublic& p) const;

    /// Constant cost: one keyed Keccak over a fixed-size message.
    bool verify(CircuitId circuit, const Proof& proof) const noexcept;

private:
    std::array<std::uint8_t, 32> attest(CircuitId circuit, ByteView public_signals) const;

    std::array<std::uint8_t, 32> settlement_key_{};
    std::array<std::uint8_t, 32> revert_key_{};
};

} // namespace dact
