#include "mgcc/attacks.hpp"

#include "mgcc/error.hpp"
#include "mgcc/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mgcc::attacks {

namespace {

constexpr double kTol = 1e-9;
constexpr double kMinLength = 1e-9;

void require_budget(const DosParams& p)
{
    if (!(p.tau_f > 0.0) || !(p.tau_d > 0.0) || p.eta < 0.0 || p.kappa < 0.0 ||
        !(p.delta_star > 0.0)) {
        throw Error(Errc::InvalidArgument,
                    "DoS parameters need eta, kappa >= 0 and tau_f, tau_d, delta_star > 0");
    }
    if (p.phi() >= 1.0) {
        std::ostringstream os;
        os << "phi = 1/tau_d + delta_star/tau_f = " << p.phi() << " >= 1";
        throw Error(Errc::BudgetInfeasible, os.str());
    }
}

/// Earliest admissible start for a window appended after `out`, given the
/// frequency budget.
double earliest_start(const std::vector<Interval>& out, const DosParams& p, double candidate)
{
    double a = candidate;
    const std::size_t m = out.size();
    for (std::size_t k = 0; k < m; ++k) {
        const double count = static_cast<double>(m - k + 1);
        if (count > p.eta) {
            a = std::max(a, out[k].start + p.tau_f * (count - p.eta) + kTol);
        }
    }
    return a;
}

/// Longest admissible window starting at `a`, given the duration budget on
/// every window anchored at an earlier start (or at `a` itself).
double max_length(const std::vector<Interval>& out, const DosParams& p, double a)
{
    double min_slack = p.kappa;
    double attacked = 0.0;
    for (std::size_t k = out.size(); k-- > 0;) {
        attacked += out[k].end - out[k].start;
        const double slack = p.kappa + (a - out[k].start) / p.tau_d - attacked;
        min_slack = std::min(min_slack, slack);
    }
    const double stretch = 1.0 / (1.0 - 1.0 / p.tau_d);
    return min_slack * stretch * (1.0 - kTol) - kTol;
}

DosSequence greedy(const DosParams& p, double horizon, Rng* rng, double gap_mean,
                   double length_cap, double fixed_gap)
{
    std::vector<Interval> out;
    if (horizon <= 0.0 || p.eta < 1.0 || p.kappa <= 0.0) {
        // A lone window needs eta >= 1 (count 1 in an arbitrarily short
        // window) and kappa > 0 (its own duration); nothing fits otherwise.
        return DosSequence(std::move(out), std::max(horizon, 0.0));
    }
    double cursor = 0.0;
    bool first = true;
    while (true) {
        double a;
        double wanted;
        if (rng != nullptr) {
            a = cursor + rng->exponential(gap_mean);
            wanted = rng->uniform() * length_cap;
        } else {
            a = first ? 0.0 : cursor + fixed_gap;
            wanted = std::numeric_limits<double>::infinity();
        }
        first = false;
        if (!out.empty()) {
            a = std::max(a, out.back().end + kTol);
        }
        a = earliest_start(out, p, a);
        if (a >= horizon) {
            break;
        }
        const double len = std::min({wanted, max_length(out, p, a), horizon - a});
        if (len <= kMinLength) {
            // Budget exhausted for now; slack regrows at rate 1/tau_d.
            cursor = a + std::max(kTol, rng != nullptr ? 0.0 : fixed_gap);
            continue;
        }
        out.push_back({a, a + len});
        cursor = a + len;
    }
    return DosSequence(std::move(out), horizon);
}

}  // namespace

double podf_bound(const DosParams& p)
{
    require_budget(p);
    return (p.kappa + (p.eta + 1.0) * p.delta_star) / (1.0 - p.phi());
}

double calibrate_kappa(DosParams p, double target)
{
    p.kappa = 0.0;
    require_budget(p);
    const double kappa = target * (1.0 - p.phi()) - (p.eta + 1.0) * p.delta_star;
    if (kappa < 0.0) {
        std::ostringstream os;
        os << "target bound " << target << " is below the kappa = 0 bound " << podf_bound(p);
        throw Error(Errc::BudgetInfeasible, os.str());
    }
    return kappa;
}

DosParams soften(DosParams p, double factor)
{
    if (!(factor > 0.0)) {
        throw Error(Errc::InvalidArgument, "soften factor must be positive");
    }
    p.eta /= factor;
    p.kappa /= factor;
    p.tau_f *= factor;
    p.tau_d *= factor;
    return p;
}

DosSequence::DosSequence(std::vector<Interval> intervals, double horizon) : horizon_(horizon)
{
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw Error(Errc::InvalidSequence, "horizon must be finite and non-negative");
    }
    for (std::size_t k = 0; k < intervals.size(); ++k) {
        const Interval& iv = intervals[k];
        if (!(iv.start < iv.end)) {
            throw Error(Errc::InvalidSequence,
                        "interval " + std::to_string(k) + " is empty or reversed");
        }
        if (iv.start < 0.0 || iv.end > horizon) {
            throw Error(Errc::InvalidSequence,
                        "interval " + std::to_string(k) + " leaves [0, horizon)");
        }
        if (k > 0 && iv.start < intervals[k - 1].end) {
            throw Error(Errc::InvalidSequence,
                        "interval " + std::to_string(k) + " overlaps or precedes its predecessor");
        }
        if (!intervals_.empty() && iv.start == intervals_.back().end) {
            intervals_.back().end = iv.end;
        } else {
            intervals_.push_back(iv);
        }
    }
}

bool DosSequence::attacked(double t) const noexcept
{
    const auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                                     [](double v, const Interval& iv) { return v < iv.start; });
    if (it == intervals_.begin()) {
        return false;
    }
    return t < std::prev(it)->end;
}

double DosSequence::attacked_measure(double t1, double t2) const noexcept
{
    if (!(t1 < t2)) {
        return 0.0;
    }
    auto it = std::lower_bound(intervals_.begin(), intervals_.end(), t1,
                               [](const Interval& iv, double v) { return iv.end <= v; });
    double total = 0.0;
    for (; it != intervals_.end() && it->start < t2; ++it) {
        total += std::min(it->end, t2) - std::max(it->start, t1);
    }
    return total;
}

std::size_t DosSequence::transitions(double t1, double t2) const noexcept
{
    if (!(t1 < t2)) {
        return 0;
    }
    const auto lo = std::lower_bound(intervals_.begin(), intervals_.end(), t1,
                                     [](const Interval& iv, double v) { return iv.start < v; });
    const auto hi = std::lower_bound(intervals_.begin(), intervals_.end(), t2,
                                     [](const Interval& iv, double v) { return iv.start < v; });
    return static_cast<std::size_t>(hi - lo);
}

std::string Violation::describe() const
{
    std::ostringstream os;
    os.precision(12);
    if (bound == Bound::Frequency) {
        os << "frequency bound violated on [" << t1 << ", " << t2 << "]: n = " << lhs
           << " > eta + (t2 - t1)/tau_f = " << rhs;
    } else {
        os << "duration bound violated on [" << t1 << ", " << t2 << "): |Xi| = " << lhs
           << " > kappa + (t2 - t1)/tau_d = " << rhs;
    }
    return os.str();
}

VerifyReport verify_sequence(const DosSequence& s, const DosParams& p, double t1, double t2)
{
    if (!(t1 < t2)) {
        throw Error(Errc::InvalidArgument, "verification window needs t1 < t2");
    }
    if (t2 > s.horizon() + kTol) {
        throw Error(Errc::InvalidArgument, "verification window extends past the horizon");
    }

    VerifyReport report;

    std::vector<double> starts;
    std::vector<Interval> clipped;
    for (const Interval& iv : s.intervals()) {
        if (iv.start >= t1 && iv.start < t2) {
            starts.push_back(iv.start);
        }
        const double a = std::max(iv.start, t1);
        const double b = std::min(iv.end, t2);
        if (a < b) {
            clipped.push_back({a, b});
        }
    }

    auto record = [](std::optional<Violation>& slot, Violation v) {
        if (!slot || v.lhs - v.rhs > slot->lhs - slot->rhs) {
            slot = v;
        }
    };

    for (std::size_t k = 0; k < starts.size(); ++k) {
        for (std::size_t m = k; m < starts.size(); ++m) {
            const double count = static_cast<double>(m - k + 1);
            const double rhs = p.eta + (starts[m] - starts[k]) / p.tau_f;
            if (count > rhs + kTol) {
                report.frequency_ok = false;
                record(report.frequency,
                       {Violation::Bound::Frequency, starts[k], starts[m], count, rhs});
            }
        }
    }

    // prefix[k] = attacked measure of clipped[0..k)
    std::vector<double> prefix(clipped.size() + 1, 0.0);
    for (std::size_t k = 0; k < clipped.size(); ++k) {
        prefix[k + 1] = prefix[k] + (clipped[k].end - clipped[k].start);
    }
    auto measure_until = [&](double t) {
        const auto it = std::upper_bound(clipped.begin(), clipped.end(), t,
                                         [](double v, const Interval& iv) { return v < iv.start; });
        const std::size_t k = static_cast<std::size_t>(it - clipped.begin());
        if (k == 0) {
            return 0.0;
        }
        return prefix[k - 1] + (std::min(t, clipped[k - 1].end) - clipped[k - 1].start);
    };

    std::vector<double> lefts{t1};
    std::vector<double> rights{t2};
    for (const Interval& iv : clipped) {
        lefts.push_back(iv.start);
        rights.push_back(iv.end);
    }
    for (const double a : lefts) {
        const double base = measure_until(a);
        for (const double b : rights) {
            if (!(a < b)) {
                continue;
            }
            const double lhs = measure_until(b) - base;
            const double rhs = p.kappa + (b - a) / p.tau_d;
            if (lhs > rhs + kTol) {
                report.duration_ok = false;
                record(report.duration, {Violation::Bound::Duration, a, b, lhs, rhs});
            }
        }
    }
    return report;
}

VerifyReport verify_sequence(const DosSequence& s, const DosParams& p)
{
    if (s.horizon() <= 0.0) {
        return {};
    }
    return verify_sequence(s, p, 0.0, s.horizon());
}

DosSequence generate_sequence(const DosParams& p, double horizon, std::uint64_t seed,
                              GeneratorOptions options)
{
    require_budget(p);
    Rng rng(seed);
    const double gap_mean = options.gap_scale * p.tau_f;
    const double stretch = 1.0 / (1.0 - 1.0 / p.tau_d);
    const double length_cap = options.length_scale * (p.kappa + gap_mean / p.tau_d) * stretch;
    return greedy(p, horizon, &rng, gap_mean, length_cap, 0.0);
}

DosSequence worst_case_sequence(const DosParams& p, double horizon, double gap)
{
    require_budget(p);
    if (!(gap > 0.0)) {
        throw Error(Errc::InvalidArgument, "worst-case gap must be positive");
    }
    return greedy(p, horizon, nullptr, 0.0, 0.0, gap);
}

PodfWitness podf_witness(const DosSequence& s, const DosParams& p,
                         std::span<const double> attempt_times)
{
    PodfWitness w;
    w.bound = podf_bound(p);
    for (std::size_t k = 1; k < attempt_times.size(); ++k) {
        if (attempt_times[k] - attempt_times[k - 1] < p.delta_star - 1e-12) {
            std::ostringstream os;
            os << "attempts at " << attempt_times[k - 1] << " and " << attempt_times[k]
               << " are closer than delta_star = " << p.delta_star;
            throw Error(Errc::AttemptSpacingViolation, os.str());
        }
    }
    std::optional<double> next_success;
    for (std::size_t k = attempt_times.size(); k-- > 0;) {
        const double t = attempt_times[k];
        if (!s.attacked(t)) {
            next_success = t;
            continue;
        }
        ++w.failed_attempts;
        if (next_success) {
            w.max_delay = std::max(w.max_delay, *next_success - t);
        } else {
            ++w.unresolved;
        }
    }
    return w;
}

}  // namespace mgcc::attacks
