#include "mgcc/adaptive.hpp"

#include "mgcc/error.hpp"

#include <algorithm>
#include <string>

namespace mgcc::adaptive {

double LedgerEntry::t_ii() const
{
    if (!own_stamp) {
        throw Error(Errc::MissingTimestamp, "trigger " + std::to_string(k) + " has no local stamp");
    }
    return t_trigger - *own_stamp;
}

double LedgerEntry::t_ij() const
{
    if (!neighbour_stamp) {
        throw Error(Errc::MissingTimestamp,
                    "trigger " + std::to_string(k) + " has no neighbour stamp");
    }
    return t_trigger - *neighbour_stamp;
}

double LedgerEntry::t_i0() const noexcept
{
    return actuated ? *actuated - t_trigger : t_hat_i0;
}

double gamma(const LedgerEntry& entry, std::size_t d_i, std::size_t d_j)
{
    const double t_i0 = entry.t_i0();
    return static_cast<double>(d_i) * (entry.t_ii() + t_i0) +
           static_cast<double>(d_j) * (entry.t_ij() + t_i0);
}

AdaptiveParams adapt_params(double gamma, double alpha, double beta, double eps_floor)
{
    if (!(alpha > 1.0) || !(beta > 1.0) || !(eps_floor > 0.0) || gamma < 0.0) {
        throw Error(Errc::InvalidArgument,
                    "adaptation needs alpha > 1, beta > 1, eps_floor > 0 and gamma >= 0");
    }
    AdaptiveParams p;
    p.gamma = gamma;
    p.eps = std::max(eps_floor, alpha * gamma);
    p.rate = beta * p.eps / (2.0 * (p.eps - gamma));
    return p;
}

double scaled_input(int u, double theta, double rate, double phi_i0) noexcept
{
    const double vartheta = theta / rate;
    return static_cast<double>(u) * vartheta / (vartheta + phi_i0);
}

void actuation_estimator(LedgerEntry& entry, double breve_s, double delta_star) noexcept
{
    entry.t_hat_i0 = breve_s + delta_star - entry.t_trigger;
}

double equivalent_switch_time(double s_k, double s_next, double vartheta, double phi) noexcept
{
    return s_k + vartheta * (s_next - s_k) / (vartheta + phi);
}

}  // namespace mgcc::adaptive
