#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace mgcc::controller {

/// Dead-zone quantiser: sign(z) when |z| >= eps, 0 otherwise.
int sign_eps(double z, double eps) noexcept;

/// Clock reset value max(|D|, eps) / (2 (d_i + d_j)).
double clock_reset(double d, double eps, std::size_t d_i, std::size_t d_j) noexcept;

/// Shortest possible interval between two triggers of one edge.
double dwell_time(double eps, double rate, std::size_t d_i, std::size_t d_j) noexcept;

/// A captured state value and the time it was captured.
struct Sample {
    double value = 0.0;
    double stamp = 0.0;
};

enum class TriggerStatus {
    Healthy,   // fresh neighbour data, quantised difference applied
    Attacked,  // communication blocked, input zeroed
    NoData,    // no successful measurement yet on one side
    Stale,     // nominal law running on the last delivered neighbour value
};

const char* to_string(TriggerStatus status) noexcept;

enum class Law {
    Nominal,    // always acts on the latest data it holds
    Resilient,  // zeroes the edge while communication is blocked
};

/// Per directed edge (i, j). `theta` is the clock value set at the last
/// trigger; it decays at `rate` until `expiry()`.
struct EdgeControllerState {
    int u = 0;
    double theta = 0.0;
    double rate = 1.0;
    double eps = 1.0;
    double last_trigger_time = 0.0;
    std::size_t trigger_count = 0;

    double expiry() const noexcept { return last_trigger_time + theta / rate; }
    double clock(double now) const noexcept { return theta - rate * (now - last_trigger_time); }
};

struct TriggerInput {
    std::optional<Sample> own;        // x_i as last measured
    std::optional<Sample> neighbour;  // x_j as delivered to i
    bool comm_healthy = true;
    double now = 0.0;
    std::size_t d_i = 1;
    std::size_t d_j = 1;
};

struct TriggerOutcome {
    TriggerStatus status = TriggerStatus::Healthy;
    double d = 0.0;  // D used, 0 when none was formed
    int u = 0;
    double theta = 0.0;
};

/// Discrete transition at a clock expiry. Updates u, theta and the trigger
/// bookkeeping of `state` and reports what was used. Throws ClockNotExpired
/// if `now` is before the clock reaches zero.
TriggerOutcome on_clock_expiry(EdgeControllerState& state, const TriggerInput& in, Law law);

/// u_i = sum of the edge inputs of node i.
double node_input(std::span<const double> edge_inputs) noexcept;

}  // namespace mgcc::controller
