#include <dact/error.hpp>

namespace dact {

std::string_view errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::DepthOutOfRange: return "DepthOutOfRange";
    case Errc::TreeFull: return "TreeFull";
    case Errc::IndexUnknown: return "IndexUnknown";
    case Errc::ChainIdOutOfTier: return "ChainIdOutOfTier";
    case Errc::VersionOutOfTier: return "VersionOutOfTier";
    case Errc::DuplicateAddress: return "DuplicateAddress";
    case Errc::CallerInList: return "CallerInList";
    case Errc::MalformedDeposit: return "MalformedDeposit";
    case Errc::ConstraintViolation: return "ConstraintViolation";
    case Errc::AlreadyRegistered: return "AlreadyRegistered";
    case Errc::Unauthorized: return "Unauthorized";
    case Errc::UnknownDapp: return "UnknownDapp";
    case Errc::DuplicateCommitment: return "DuplicateCommitment";
    case Errc::DoubleSpend: return "DoubleSpend";
    case Errc::UnknownRoot: return "UnknownRoot";
    case Errc::WrongChain: return "WrongChain";
    case Errc::TpcMismatch: return "TpcMismatch";
    case Errc::InvalidProof: return "InvalidProof";
    case Errc::UnknownCommitment: return "UnknownCommitment";
    case Errc::AlreadyPending: return "AlreadyPending";
    case Errc::CoolDownActive: return "CoolDownActive";
    case Errc::NoPending: return "NoPending";
    case Errc::WindowExpired: return "WindowExpired";
    case Errc::WindowActive: return "WindowActive";
    case Errc::Halted: return "Halted";
    case Errc::SignatureExists: return "SignatureExists";
    case Errc::SignatureMissing: return "SignatureMissing";
    case Errc::ThresholdUnmet: return "ThresholdUnmet";
    case Errc::NoteUnknown: return "NoteUnknown";
    case Errc::Censored: return "Censored";
    case Errc::Offline: return "Offline";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

static std::string compose(Errc code, const std::string& detail)
{
    std::string msg(errc_name(code));
    if (!detail.empty()) msg += "(" + detail + ")";
    return msg;
}

ProtocolError::ProtocolError(Errc code, std::string detail)
    : std::runtime_error(compose(code, detail)), code_(code), detail_(std::move(detail))
{
}

} // namespace dact
