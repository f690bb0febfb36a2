#include "mgcc/error.hpp"

namespace mgcc {

const char* to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::NotSquare: return "NotSquare";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::Disconnected: return "Disconnected";
    case Errc::EmptyTopology: return "EmptyTopology";
    case Errc::InvalidSequence: return "InvalidSequence";
    case Errc::BudgetInfeasible: return "BudgetInfeasible";
    case Errc::AttemptSpacingViolation: return "AttemptSpacingViolation";
    case Errc::ClockNotExpired: return "ClockNotExpired";
    case Errc::MissingTimestamp: return "MissingTimestamp";
    case Errc::CriterionViolated: return "CriterionViolated";
    case Errc::EmptyMg: return "EmptyMg";
    case Errc::InconsistentDroops: return "InconsistentDroops";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Config: return "ConfigError";
    case Errc::Io: return "IoError";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message)
{
}

}  // namespace mgcc
