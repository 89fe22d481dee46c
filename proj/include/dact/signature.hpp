#pragma once

#include <dact/bytes.hpp>

#include <array>
#include <compare>
#include <cstdint>

namespace dact {

struct VerifyingKey {
    std::array<std::uint8_t, 32> bytes{};
    friend auto operator<=>(const VerifyingKey&, const VerifyingKey&) = default;
};

struct Signature {
    std::array<std::uint8_t, 64> bytes{};
    friend bool operator==(const Signature&, const Signature&) = default;
};

/// Ed25519 key pair (deterministic Schnorr signatures over a prime-order
/// group). The signing key never leaves this object.
class KeyPair {
public:
    static KeyPair from_seed(std::span<const std::uint8_t, 32> seed);

    const VerifyingKey& verifying_key() const noexcept { return vk_; }
    Signature sign(ByteView message) const;

private:
    KeyPair() = default;

    std::array<std::uint8_t, 64> sk_{};
    VerifyingKey vk_;
};

/// Never throws; any malformed or mismatching input is simply false.
bool verify(const VerifyingKey& key, ByteView message, const Signature& sig) noexcept;

} // namespace dact
