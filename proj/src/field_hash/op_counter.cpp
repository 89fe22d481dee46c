#include <dact/op_counter.hpp>

namespace dact {

OpCounts& OpCounts::operator+=(const OpCounts& o) noexcept
{
    mimc += o.mimc;
    keccak_blocks += o.keccak_blocks;
    sig_verify += o.sig_verify;
    sig_sign += o.sig_sign;
    constraints += o.constraints;
    return *this;
}

OpCounts operator-(OpCounts a, const OpCounts& b) noexcept
{
    a.mimc -= b.mimc;
    a.keccak_blocks -= b.keccak_blocks;
    a.sig_verify -= b.sig_verify;
    a.sig_sign -= b.sig_sign;
    a.constraints -= b.constraints;
    return a;
}

OpCounts& op_counter() noexcept
{
    thread_local OpCounts counts;
    return counts;
}

} // namespace dact
