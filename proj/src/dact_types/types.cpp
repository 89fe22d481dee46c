#include <dact/commitment.hpp>
#include <dact/error.hpp>
#include <dact/types.hpp>

#include <algorithm>
#include <cstring>
#include <set>

namespace dact {

ChainId::ChainId(std::uint64_t value) : value_(value)
{
    if (!is_valid_chain_id(value)) fail(Errc::ChainIdOutOfTier, std::to_string(value));
}

Version::Version(std::uint64_t value) : value_(value)
{
    if (!is_valid_version(value)) fail(Errc::VersionOutOfTier, std::to_string(value));
}

Address Address::from_label(std::string_view label)
{
    auto h = detail::keccak256_uncounted(as_bytes(label));
    Address a;
    std::copy_n(h.bytes.begin(), a.bytes.size(), a.bytes.begin());
    return a;
}

Address Address::from_hex(std::string_view hex)
{
    Bytes raw = dact::from_hex(hex);
    if (raw.size() != 20) throw std::invalid_argument("address must be 20 bytes");
    Address a;
    std::copy(raw.begin(), raw.end(), a.bytes.begin());
    return a;
}

Note note_new(SeededRng& rng)
{
    Note n;
    n.secret = random_field_31(rng);
    n.nullifier = random_field_31(rng);
    n.salt = random_field_31(rng);
    return n;
}

FieldElement nullifier_hash(const FieldElement& nullifier)
{
    return default_commitment_scheme().nullifier_hash(nullifier);
}

ByteHash32 obfuscate(const PayloadIntent& intent, const FieldElement& salt)
{
    Bytes buf;
    buf.reserve(96);
    append(buf, intent.payload);
    append(buf, intent.dest_chain.word());
    append(buf, salt.to_bytes());
    return keccak256(buf);
}

TrustlessPublicCommitment trustless_public_commitment(const DappGlobalHash& g, Version v, const ByteHash32& od)
{
    Bytes buf;
    buf.reserve(96);
    append(buf, g.digest.bytes);
    append(buf, v.word());
    append(buf, od.bytes);
    auto digest = keccak256(buf).bytes;

    // Keep bytes 22..31 (80 bits), then clear the top 7 bits of byte 22.
    std::array<std::uint8_t, 32> masked{};
    std::copy(digest.begin() + 22, digest.end(), masked.begin() + 22);
    masked[22] &= 0x01;
    return {*FieldElement::from_canonical(masked)};
}

Leaf make_leaf(const FieldElement& commitment, const TrustlessPublicCommitment& tpc, ChainId source_chain)
{
    return {commitment + tpc.value + source_chain.field(), commitment, tpc, source_chain};
}

DappGlobalHash dapp_global_hash(const Address& caller, std::span<const Address> others)
{
    if (others.empty()) fail(Errc::PreconditionViolated, "dApp address list is empty");
    std::set<Address> seen;
    for (const auto& a : others) {
        if (a == caller) fail(Errc::CallerInList, caller.to_hex());
        if (!seen.insert(a).second) fail(Errc::DuplicateAddress, a.to_hex());
    }
    Bytes buf;
    buf.reserve(20 * (others.size() + 1));
    append(buf, caller.bytes);
    for (const auto& a : others) append(buf, a.bytes);
    return {keccak256(buf)};
}

Bytes serialize_deposit(const DepositRequest& req)
{
    Bytes out;
    out.reserve(kDepositWireSize);
    append(out, req.commitment.to_bytes());
    append(out, req.obfuscated_data.bytes);
    append(out, req.version.word());
    append(out, req.dapp_address.bytes);
    return out;
}

DepositRequest parse_deposit(ByteView bytes)
{
    if (bytes.size() != kDepositWireSize)
        fail(Errc::MalformedDeposit, "length " + std::to_string(bytes.size()));
    auto commitment = FieldElement::from_canonical(bytes.subspan(0, 32));
    if (!commitment) fail(Errc::MalformedDeposit, "commitment not canonical");

    ByteHash32 od;
    std::memcpy(od.bytes.data(), bytes.data() + 32, 32);

    auto version_word = bytes.subspan(64, 32);
    if (std::any_of(version_word.begin(), version_word.begin() + 24, [](auto b) { return b != 0; }))
        fail(Errc::MalformedDeposit, "version word overflows");
    std::uint64_t v = 0;
    for (std::size_t i = 24; i < 32; ++i) v = v << 8 | version_word[i];
    if (!is_valid_version(v)) fail(Errc::MalformedDeposit, "version " + std::to_string(v));

    Address addr;
    std::memcpy(addr.bytes.data(), bytes.data() + 96, 20);
    return {*commitment, od, Version(v), addr};
}

} // namespace dact
