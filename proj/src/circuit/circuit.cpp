#include <dact/circuit.hpp>
#include <dact/commitment.hpp>
#include <dact/error.hpp>
#include <dact/op_counter.hpp>

#include <algorithm>

namespace dact {

std::string_view circuit_name(CircuitId id) noexcept
{
    switch (id) {
    case CircuitId::Settlement: return "settlement";
    case CircuitId::Revert: return "revert";
    }
    return "unknown";
}

namespace {

FieldElement read_field(ByteView bytes, std::size_t off)
{
    auto f = FieldElement::from_canonical(bytes.subspan(off, 32));
    if (!f) fail(Errc::InvalidProof, "non-canonical field signal");
    return *f;
}

TrustlessPublicCommitment read_tpc(ByteView bytes, std::size_t off)
{
    auto word = bytes.subspan(off, 32);
    if (std::any_of(word.begin(), word.begin() + 22, [](auto b) { return b != 0; }) || word[22] > 1)
        fail(Errc::InvalidProof, "tpc wider than 73 bits");
    return {read_field(bytes, off)};
}

ChainId read_chain(ByteView bytes, std::size_t off)
{
    auto word = bytes.subspan(off, 32);
    if (std::any_of(word.begin(), word.begin() + 24, [](auto b) { return b != 0; }))
        fail(Errc::InvalidProof, "chain id word overflows");
    std::uint64_t v = 0;
    for (std::size_t i = 24; i < 32; ++i) v = v << 8 | word[i];
    if (!is_valid_chain_id(v)) fail(Errc::InvalidProof, "chain id out of tier");
    return ChainId(v);
}

// Each evaluated constraint charges one unit; path folding charges one per level.
void charge(std::uint64_t n = 1) { op_counter().constraints += n; }

bool check_membership(const FieldElement& root, const FieldElement& leaf, const MerklePath& path)
{
    charge(path.elements.size() + 1);
    return verify_path(root, leaf, path);
}

} // namespace

Bytes encode_public(const SettlementPublic& p)
{
    Bytes out;
    out.reserve(kSettlementPublicSize);
    append(out, p.nullifier_hash.to_bytes());
    append(out, p.merkle_root.to_bytes());
    append(out, p.tpc.value.to_bytes());
    append(out, p.dapp_key.bytes);
    return out;
}

Bytes encode_public(const RevertPublic& p)
{
    Bytes out;
    out.reserve(kRevertPublicSize);
    append(out, p.commitment.to_bytes());
    append(out, p.source_chain.word());
    append(out, p.nullifier_hash.to_bytes());
    append(out, p.merkle_root.to_bytes());
    append(out, p.tpc.value.to_bytes());
    return out;
}

SettlementPublic decode_settlement_public(ByteView bytes)
{
    if (bytes.size() != kSettlementPublicSize) fail(Errc::InvalidProof, "settlement signal length");
    SettlementPublic p;
    p.nullifier_hash = read_field(bytes, 0);
    p.merkle_root = read_field(bytes, 32);
    p.tpc = read_tpc(bytes, 64);
    std::copy_n(bytes.begin() + 96, 32, p.dapp_key.bytes.begin());
    return p;
}

RevertPublic decode_revert_public(ByteView bytes)
{
    if (bytes.size() != kRevertPublicSize) fail(Errc::InvalidProof, "revert signal length");
    return RevertPublic{read_field(bytes, 0), read_chain(bytes, 32), read_field(bytes, 64), read_field(bytes, 96),
                        read_tpc(bytes, 128)};
}

Bytes Proof::serialize() const
{
    Bytes out;
    out.reserve(1 + public_signals.size() + attestation.size());
    out.push_back(static_cast<std::uint8_t>(circuit));
    append(out, public_signals);
    append(out, attestation);
    return out;
}

Proof Proof::parse(ByteView bytes)
{
    if (bytes.empty()) fail(Errc::InvalidProof, "empty proof");
    Proof p;
    std::size_t signals = 0;
    switch (bytes[0]) {
    case static_cast<std::uint8_t>(CircuitId::Settlement): signals = kSettlementPublicSize; break;
    case static_cast<std::uint8_t>(CircuitId::Revert): signals = kRevertPublicSize; break;
    default: fail(Errc::InvalidProof, "unknown circuit id");
    }
    if (bytes.size() != 1 + signals + 32) fail(Errc::InvalidProof, "proof length");
    p.circuit = static_cast<CircuitId>(bytes[0]);
    p.public_signals.assign(bytes.begin() + 1, bytes.begin() + 1 + static_cast<std::ptrdiff_t>(signals));
    std::copy_n(bytes.begin() + 1 + static_cast<std::ptrdiff_t>(signals), 32, p.attestation.begin());
    return p;
}

std::optional<std::string_view> settlement_violation(const SettlementWitness& w, const SettlementPublic& p)
{
    const auto& scheme = default_commitment_scheme();

    charge();
    if (scheme.nullifier_hash(w.nullifier) != p.nullifier_hash) return "nullifier_hash";

    charge();
    Leaf leaf = make_leaf(scheme.commit(w.secret, w.nullifier), p.tpc, w.source_chain);

    if (!check_membership(p.merkle_root, leaf.value, w.path)) return "merkle_root";

    charge();
    if (!verify(p.dapp_key, leaf.canonical_bytes(), w.leaf_signature)) return "signature";
    return std::nullopt;
}

std::optional<std::string_view> revert_violation(const RevertWitness& w, const RevertPublic& p)
{
    const auto& scheme = default_commitment_scheme();

    charge();
    if (scheme.commit(w.secret, w.nullifier) != p.commitment) return "commitment";

    charge();
    if (scheme.nullifier_hash(w.nullifier) != p.nullifier_hash) return "nullifier_hash";

    charge();
    Leaf leaf = make_leaf(p.commitment, p.tpc, p.source_chain);

    if (!check_membership(p.merkle_root, leaf.value, w.path)) return "merkle_root";
    return std::nullopt;
}

ProofSystem::ProofSystem(SeededRng rng)
{
    auto s = rng.child("circuit/settlement");
    auto r = rng.child("circuit/revert");
    s.fill(settlement_key_);
    r.fill(revert_key_);
}

std::array<std::uint8_t, 32> ProofSystem::attest(CircuitId circuit, ByteView public_signals) const
{
    const auto& key = circuit == CircuitId::Settlement ? settlement_key_ : revert_key_;
    Bytes msg(key.begin(), key.end());
    msg.push_back(static_cast<std::uint8_t>(circuit));
    append(msg, public_signals);
    return keccak256(msg).bytes;
}

Proof ProofSystem::prove(const SettlementWitness& w, const SettlementPublic& p) const
{
    if (auto failed = settlement_violation(w, p)) fail(Errc::ConstraintViolation, std::string(*failed));
    Proof proof{CircuitId::Settlement, encode_public(p), {}};
    proof.attestation = attest(proof.circuit, proof.public_signals);
    return proof;
}

Proof ProofSystem::prove(const RevertWitness& w, const RevertPublic& p) const
{
    if (auto failed = revert_violation(w, p)) fail(Errc::ConstraintViolation, std::string(*failed));
    Proof proof{CircuitId::Revert, encode_public(p), {}};
    proof.attestation = attest(proof.circuit, proof.public_signals);
    return proof;
}

bool ProofSystem::verify(CircuitId circuit, const Proof& proof) const noexcept
{
    if (proof.circuit != circuit) return false;
    const std::size_t expected = circuit == CircuitId::Settlement ? kSettlementPublicSize : kRevertPublicSize;
    if (proof.public_signals.size() != expected) return false;
    return attest(circuit, proof.public_signals) == proof.attestation;
}

} // namespace dact
