#include "mgcc/controller.hpp"

#include "mgcc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mgcc::controller {

namespace {

constexpr double kExpiryTol = 1e-9;

}  // namespace

int sign_eps(double z, double eps) noexcept
{
    if (std::abs(z) < eps) {
        return 0;
    }
    return z > 0.0 ? 1 : -1;
}

double clock_reset(double d, double eps, std::size_t d_i, std::size_t d_j) noexcept
{
    return std::max(std::abs(d), eps) / (2.0 * static_cast<double>(d_i + d_j));
}

double dwell_time(double eps, double rate, std::size_t d_i, std::size_t d_j) noexcept
{
    return eps / (2.0 * rate * static_cast<double>(d_i + d_j));
}

const char* to_string(TriggerStatus status) noexcept
{
    switch (status) {
    case TriggerStatus::Healthy: return "healthy";
    case TriggerStatus::Attacked: return "attacked";
    case TriggerStatus::NoData: return "nodata";
    case TriggerStatus::Stale: return "stale";
    }
    return "?";
}

TriggerOutcome on_clock_expiry(EdgeControllerState& state, const TriggerInput& in, Law law)
{
    if (state.trigger_count > 0 && in.now < state.expiry() - kExpiryTol) {
        std::ostringstream os;
        os.precision(17);
        os << "clock expires at " << state.expiry() << ", trigger requested at " << in.now;
        throw Error(Errc::ClockNotExpired, os.str());
    }

    TriggerOutcome out;
    const bool have_data = in.own.has_value() && in.neighbour.has_value();
    const bool use_data = have_data && (in.comm_healthy || law == Law::Nominal);
    if (use_data) {
        out.status = in.comm_healthy ? TriggerStatus::Healthy : TriggerStatus::Stale;
        out.d = in.neighbour->value - in.own->value;
        out.u = sign_eps(out.d, state.eps);
        out.theta = clock_reset(out.d, state.eps, in.d_i, in.d_j);
    } else {
        out.status = have_data ? TriggerStatus::Attacked : TriggerStatus::NoData;
        out.u = 0;
        out.theta = clock_reset(0.0, state.eps, in.d_i, in.d_j);
    }

    state.u = out.u;
    state.theta = out.theta;
    state.last_trigger_time = in.now;
    ++state.trigger_count;
    return out;
}

double node_input(std::span<const double> edge_inputs) noexcept
{
    return std::accumulate(edge_inputs.begin(), edge_inputs.end(), 0.0);
}

}  // namespace mgcc::controller
