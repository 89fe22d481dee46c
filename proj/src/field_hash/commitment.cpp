#include <dact/commitment.hpp>
#include <dact/mimc.hpp>

namespace dact {

MimcCommitmentScheme::MimcCommitmentScheme()
    : commit_key_(field_from_tag("dact.commitment")), nullifier_key_(field_from_tag("dact.nullifier"))
{
}

FieldElement MimcCommitmentScheme::commit(const FieldElement& secret, const FieldElement& nullifier) const
{
    const FieldElement in[2] = {secret, nullifier};
    return mimc_sponge(in, commit_key_);
}

FieldElement MimcCommitmentScheme::nullifier_hash(const FieldElement& nullifier) const
{
    return mimc_sponge({&nullifier, 1}, nullifier_key_);
}

const CommitmentScheme& default_commitment_scheme()
{
    static const MimcCommitmentScheme scheme;
    return scheme;
}

} // namespace dact
