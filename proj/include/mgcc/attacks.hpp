#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mgcc::attacks {

/// Frequency/duration budget of one channel's DoS sequence:
///   n(t1,t2)   <= eta   + (t2 - t1) / tau_f
///   |Xi(t1,t2)| <= kappa + (t2 - t1) / tau_d
/// `delta_star` is the minimum spacing between transmission attempts on
/// the channel.
struct DosParams {
    double eta = 0.0;
    double kappa = 0.0;
    double tau_f = 1.0;
    double tau_d = 1.0;
    double delta_star = 0.01;

    double phi() const noexcept { return 1.0 / tau_d + delta_star / tau_f; }

    friend bool operator==(const DosParams&, const DosParams&) = default;
};

/// Worst-case delay from a failed attempt to the next successful one:
///   (kappa + (eta + 1) delta_star) / (1 - phi).
/// Throws BudgetInfeasible when phi >= 1.
double podf_bound(const DosParams& p);

/// kappa for which podf_bound(p) == target with the other fields fixed.
/// Throws BudgetInfeasible if no non-negative kappa reaches the target.
double calibrate_kappa(DosParams p, double target);

/// Scale a budget to 1/factor of its intensity: both the burst offsets and
/// the asymptotic rates shrink by `factor`.
DosParams soften(DosParams p, double factor);

/// Half-open attack window [start, end).
struct Interval {
    double start;
    double end;

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted, disjoint attack windows inside [0, horizon). Touching windows are
/// merged on construction.
class DosSequence {
public:
    DosSequence() = default;
    DosSequence(std::vector<Interval> intervals, double horizon);

    const std::vector<Interval>& intervals() const noexcept { return intervals_; }
    double horizon() const noexcept { return horizon_; }
    bool empty() const noexcept { return intervals_.empty(); }

    bool attacked(double t) const noexcept;

    /// |Xi(t1,t2)|: attacked measure inside [t1, t2).
    double attacked_measure(double t1, double t2) const noexcept;

    /// n(t1,t2): off->on transitions (window starts) inside [t1, t2).
    std::size_t transitions(double t1, double t2) const noexcept;

    friend bool operator==(const DosSequence&, const DosSequence&) = default;

private:
    std::vector<Interval> intervals_;
    double horizon_ = 0.0;
};

struct Violation {
    enum class Bound { Frequency, Duration };
    Bound bound;
    double t1;
    double t2;
    double lhs;
    double rhs;

    std::string describe() const;
};

struct VerifyReport {
    bool frequency_ok = true;
    bool duration_ok = true;
    std::optional<Violation> frequency;  // worst violation, if any
    std::optional<Violation> duration;

    bool passed() const noexcept { return frequency_ok && duration_ok; }
};

/// Check both budget inequalities on every sub-window of [t1, t2).
///
/// Both sides are piecewise linear in the window ends, so only windows
/// anchored at transition points need checking. The frequency count is taken
/// in the limit of windows closing just after a start, i.e. starts in
/// [s_k, s_m] against length s_m - s_k.
VerifyReport verify_sequence(const DosSequence& s, const DosParams& p, double t1, double t2);
VerifyReport verify_sequence(const DosSequence& s, const DosParams& p);

struct GeneratorOptions {
    double gap_scale = 0.5;     // candidate inter-arrival mean, in units of tau_f
    double length_scale = 1.0;  // candidate length cap multiplier
};

/// Pseudo-random sequence that satisfies the budget by construction: each
/// candidate window is pushed later until the frequency bound admits it and
/// clipped until the duration bound admits it. Deterministic in
/// (p, horizon, seed). Throws BudgetInfeasible when phi >= 1.
DosSequence generate_sequence(const DosParams& p, double horizon, std::uint64_t seed,
                              GeneratorOptions options = {});

/// Deterministic adversary: windows start as early as the frequency budget
/// allows (at least `gap` after the previous end) and last as long as the
/// duration budget allows.
DosSequence worst_case_sequence(const DosParams& p, double horizon, double gap);

struct PodfWitness {
    double max_delay = 0.0;
    double bound = 0.0;
    std::size_t failed_attempts = 0;
    std::size_t unresolved = 0;  // failed attempts with no later success in the train

    bool holds() const noexcept { return max_delay <= bound; }
};

/// For every attempt that falls in an attack window, the delay until the next
/// attempt that does not. Attempts must be ascending and spaced by at least
/// delta_star (AttemptSpacingViolation otherwise).
PodfWitness podf_witness(const DosSequence& s, const DosParams& p,
                         std::span<const double> attempt_times);

}  // namespace mgcc::attacks
