#pragma once

#include <dact/field.hpp>

#include <string_view>

namespace dact {

/// Plug point for the hiding/binding hash behind commitments and nullifier
/// hashes. A Pedersen instantiation would implement this interface.
class CommitmentScheme {
public:
    virtual ~CommitmentScheme() = default;
    virtual std::string_view name() const noexcept = 0;
    virtual FieldElement commit(const FieldElement& secret, const FieldElement& nullifier) const = 0;
    virtual FieldElement nullifier_hash(const FieldElement& nullifier) const = 0;
};

/// MiMC sponge keyed with per-purpose domain constants.
class MimcCommitmentScheme final : public CommitmentScheme {
public:
    MimcCommitmentScheme();
    std::string_view name() const noexcept override { return "mimc-sponge"; }
    FieldElement commit(const FieldElement& secret, const FieldElement& nullifier) const override;
    FieldElement nullifier_hash(const FieldElement& nullifier) const override;

private:
    FieldElement commit_key_;
    FieldElement nullifier_key_;
};

const CommitmentScheme& default_commitment_scheme();

inline FieldElement commit(const FieldElement& secret, const FieldElement& nullifier)
{
    return default_commitment_scheme().commit(secret, nullifier);
}

} // namespace dact
