#pragma once

#include <cstdint>

namespace dact {

/// Operation counts under the simulator's cost model: one unit per MiMC
/// sponge call, per Keccak-f permutation, per signature verification.
/// Constraint evaluations are tallied separately for the circuit reports.
struct OpCounts {
    std::uint64_t mimc = 0;
    std::uint64_t keccak_blocks = 0;
    std::uint64_t sig_verify = 0;
    std::uint64_t sig_sign = 0;
    std::uint64_t constraints = 0;

    OpCounts& operator+=(const OpCounts& o) noexcept;
    friend OpCounts operator-(OpCounts a, const OpCounts& b) noexcept;
    friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

// The counter is per thread: one scenario owns one thread.
OpCounts& op_counter() noexcept;

/// Snapshot helper: `delta()` is what was charged since construction.
class OpScope {
public:
    OpScope() noexcept : start_(op_counter()) {}
    OpCounts delta() const noexcept { return op_counter() - start_; }

private:
    OpCounts start_;
};

} // namespace dact
