#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dact {

enum class Errc {
    DepthOutOfRange,
    TreeFull,
    IndexUnknown,
    ChainIdOutOfTier,
    VersionOutOfTier,
    DuplicateAddress,
    CallerInList,
    MalformedDeposit,
    ConstraintViolation,
    AlreadyRegistered,
    Unauthorized,
    UnknownDapp,
    DuplicateCommitment,
    DoubleSpend,
    UnknownRoot,
    WrongChain,
    TpcMismatch,
    InvalidProof,
    UnknownCommitment,
    AlreadyPending,
    CoolDownActive,
    NoPending,
    WindowExpired,
    WindowActive,
    Halted,
    SignatureExists,
    SignatureMissing,
    ThresholdUnmet,
    NoteUnknown,
    Censored,
    Offline,
    PreconditionViolated,
    ConfigInvalid,
};

std::string_view errc_name(Errc code) noexcept;

/// Every protocol-level rejection. `detail()` carries extra context, e.g. the
/// name of the first failed constraint for ConstraintViolation.
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(Errc code, std::string detail = {});

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

[[noreturn]] inline void fail(Errc code, std::string detail = {})
{
    throw ProtocolError(code, std::move(detail));
}

} // namespace dact
