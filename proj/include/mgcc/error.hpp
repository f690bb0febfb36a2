#pragma once

#include <stdexcept>
#include <string>

namespace mgcc {

enum class Errc {
    NotSquare,
    NotSymmetric,
    SelfLoop,
    NegativeWeight,
    Disconnected,
    EmptyTopology,
    InvalidSequence,
    BudgetInfeasible,
    AttemptSpacingViolation,
    ClockNotExpired,
    MissingTimestamp,
    CriterionViolated,
    EmptyMg,
    InconsistentDroops,
    InvalidArgument,
    Config,
    Io,
};

const char* to_string(Errc code) noexcept;

/// Library-wide exception. `what()` is prefixed with the error name so CLI
/// diagnostics carry it verbatim.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }

    /// The message without the error-name prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

}  // namespace mgcc
