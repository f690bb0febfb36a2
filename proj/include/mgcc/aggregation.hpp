#pragma once

#include <span>
#include <vector>

namespace mgcc::aggregation {

/// One droop-controlled inverter. `droop` in Hz/kW (or rad/s per kW when
/// `omega` is angular); `cutoff` is the low-pass filter corner.
struct DgSpec {
    double rating = 0.0;  // P_max, kW
    double droop = 0.0;   // m_P
    double omega = 0.0;
    double cutoff = 1.0;
};

/// Equivalent single-machine model of one microgrid.
struct MgEquivalent {
    double droop = 0.0;    // 1 / sum(1 / m_j)
    double omega = 0.0;    // droop-weighted mean frequency
    double power = 0.0;    // total active power
    double omega_n = 0.0;  // omega + droop * power
};

/// Throws EmptyMg for an empty list and InvalidArgument for non-positive
/// droops or mixed cutoffs. The cutoff cancels out of the weighted mean.
MgEquivalent aggregate(std::span<const DgSpec> dgs, double power = 0.0);

/// omega_n = omega + m_P P.
double set_point(double omega, double droop, double power) noexcept;

/// m_j = c / P_max,j for every rating.
std::vector<double> droops_from_ratings(std::span<const double> ratings, double c);

/// DG specs with droops from ratings and a common frequency.
std::vector<DgSpec> dgs_from_ratings(std::span<const double> ratings, double c,
                                     double omega = 0.0, double cutoff = 1.0);

/// Split a microgrid's power so every DG sits at the same droop offset:
/// P_j = P (1/m_j) / sum(1/m). Throws InconsistentDroops unless m_j P_max,j
/// agrees across the DGs (relative 1e-9), which makes P_j proportional to
/// the rating.
std::vector<double> share_power(double total, std::span<const DgSpec> dgs);

struct Objectives {
    double sync_error = 0.0;     // max |omega_i - omega_j|
    double sharing_error = 0.0;  // max |m_i P_i - m_j P_j|
    double ref_deviation = 0.0;  // max |omega_i - omega_ref|, reported only
};

/// Objectives at one instant from the frequency states and the droop-scaled
/// power states of all microgrids. Either span may be empty.
Objectives objective_metrics(std::span<const double> frequency, std::span<const double> power,
                             double omega_ref);

}  // namespace mgcc::aggregation
