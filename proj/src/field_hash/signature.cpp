#include <dact/op_counter.hpp>
#include <dact/signature.hpp>

#include <sodium.h>

#include <stdexcept>

namespace dact {

static void ensure_sodium()
{
    static const bool ok = sodium_init() >= 0;
    if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

KeyPair KeyPair::from_seed(std::span<const std::uint8_t, 32> seed)
{
    ensure_sodium();
    KeyPair kp;
    crypto_sign_seed_keypair(kp.vk_.bytes.data(), kp.sk_.data(), seed.data());
    return kp;
}

Signature KeyPair::sign(ByteView message) const
{
    op_counter().sig_sign += 1;
    Signature sig;
    crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), sk_.data());
    return sig;
}

bool verify(const VerifyingKey& key, ByteView message, const Signature& sig) noexcept
{
    ensure_sodium();
    op_counter().sig_verify += 1;
    return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(), key.bytes.data()) == 0;
}

} // namespace dact
