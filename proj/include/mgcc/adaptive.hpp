#pragma once

#include <cstddef>
#include <optional>

namespace mgcc::adaptive {

/// Timestamps of the k-th trigger of one directed edge.
struct LedgerEntry {
    std::size_t k = 0;
    double t_trigger = 0.0;                 // t_ij^k
    std::optional<double> own_stamp;        // stamp of x_i used
    std::optional<double> neighbour_stamp;  // stamp of x_j used
    std::optional<double> actuated;         // s_ij^k, once known
    double t_hat_i0 = 0.0;                  // running estimate of s - t

    /// t_ij^k - own stamp. Throws MissingTimestamp.
    double t_ii() const;
    /// t_ij^k - neighbour stamp. Throws MissingTimestamp.
    double t_ij() const;
    /// s_ij^k - t_ij^k if actuated, else the running estimate.
    double t_i0() const noexcept;
};

/// d_i (t_ii + t_i0) + d_j (t_ij + t_i0).
double gamma(const LedgerEntry& entry, std::size_t d_i, std::size_t d_j);

struct AdaptiveParams {
    double gamma = 0.0;
    double eps = 0.0;
    double rate = 0.0;
};

/// eps = max(floor, alpha gamma), rate = beta eps / (2 (eps - gamma)).
/// With gamma = 0 this gives rate = beta / 2.
AdaptiveParams adapt_params(double gamma, double alpha, double beta, double eps_floor);

/// u' = u vartheta / (vartheta + phi_i0) with vartheta = theta / rate.
double scaled_input(int u, double theta, double rate, double phi_i0) noexcept;

/// After a failed actuation attempt at `breve_s`, the next one happens
/// `delta_star` later: t_hat = breve_s + delta_star - t_ij^k.
void actuation_estimator(LedgerEntry& entry, double breve_s, double delta_star) noexcept;

/// Switch time of the bang-zero input that moves the state as far as u'
/// held over [s_k, s_next): s_k + vartheta (s_next - s_k) / (vartheta + phi).
double equivalent_switch_time(double s_k, double s_next, double vartheta, double phi) noexcept;

}  // namespace mgcc::adaptive
