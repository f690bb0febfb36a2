#pragma once

#include "mgcc/channels.hpp"
#include "mgcc/controller.hpp"
#include "mgcc/design.hpp"
#include "mgcc/state_metrics.hpp"
#include "mgcc/topology.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mgcc::engine {

struct Disturbance {
    double time = 0.0;
    NodeId node = 0;
    double jump = 0.0;
};

/// Everything one closed-loop run needs. Per-edge vectors follow
/// Topology::directed_edges().
struct EngineConfig {
    Topology topology = Topology::from_edges(1, {});
    ChannelSet channels;
    design::Mode mode = design::Mode::Global;

    std::vector<double> eps;   // initial eps_ij
    std::vector<double> rate;  // initial R_ij

    double eps_floor = 0.01;  // self-adaptive only
    double alpha = 1.5;
    double beta = 1.1;
    std::vector<double> phi_i0;  // per node, scales self-adaptive inputs

    std::vector<double> measurement_period;  // Delta*_i per node
    std::vector<double> actuation_period;    // Delta*_i0 per node

    std::vector<double> initial;
    std::vector<Disturbance> disturbances;

    double activation_time = 0.0;
    double horizon = 10.0;
    double record_period = 0.1;  // <= 0 disables periodic samples
    double delta = 0.0;          // consensus set radius tracked by the metrics

    bool log_triggers = true;
    bool log_samples = true;
};

struct SampleRow {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> u_star;
    double v = 0.0;
    double disagreement = 0.0;
};

struct TriggerRow {
    double t = 0.0;
    NodeId node = 0;
    NodeId neighbour = 0;
    controller::TriggerStatus status = controller::TriggerStatus::Healthy;
    double d = 0.0;
    int u = 0;
    double theta = 0.0;
    double eps = 0.0;
    double rate = 0.0;
    double v = 0.0;  // Lyapunov value of the true states at the trigger
};

struct AdaptationRow {
    std::size_t k = 0;
    NodeId node = 0;
    NodeId neighbour = 0;
    double t_trigger = 0.0;
    double t_actuated = 0.0;
    double t_ii = 0.0;
    double t_ij = 0.0;
    double t_i0 = 0.0;
    double gamma = 0.0;
    double eps = 0.0;
    double rate = 0.0;
    double vartheta = 0.0;
    double u_scaled = 0.0;
};

struct EdgeStats {
    std::size_t triggers = 0;
    std::size_t healthy = 0;
    std::size_t attacked = 0;  // attacked, no-data and stale triggers
    double min_interval = 0.0; // +inf until two triggers have happened
    double min_dwell = 0.0;    // smallest eps/(2 R (d_i + d_j)) in force at a trigger, +inf if none
};

struct ChannelStats {
    std::string id;
    std::size_t attempts = 0;
    std::size_t failures = 0;
};

/// Stretch between activation, disturbances and the horizon.
struct Segment {
    double start = 0.0;
    double end = 0.0;
    std::optional<double> entry;  // entry into the consensus set, kept to `end`
    bool recovered = false;
};

struct RunMetrics {
    std::vector<EdgeStats> edges;
    std::vector<ChannelStats> channels;
    std::vector<Segment> segments;
    std::optional<double> settle_time;       // absolute entry time, kept to the horizon
    std::optional<double> convergence_time;  // settle_time - activation, at least 0
    bool converged = false;
    double final_disagreement = 0.0;
    double final_v = 0.0;
    std::vector<double> final_x;
    std::size_t events = 0;
};

struct RunResult {
    std::vector<SampleRow> samples;
    std::vector<TriggerRow> triggers;
    std::vector<AdaptationRow> adaptation;
    RunMetrics metrics;
};

/// Deterministic event-driven closed loop: dx_i/dt = u*_i integrated exactly
/// between events, with measurement, communication and actuation gated by
/// the channel set.
class Engine {
public:
    explicit Engine(EngineConfig config);
    ~Engine();
    Engine(Engine&&) noexcept;
    Engine& operator=(Engine&&) noexcept;

    /// Processes the next event. Returns false once the horizon is reached
    /// and the final sample has been taken.
    bool step();

    double time() const noexcept;

    /// True states at the current time.
    std::vector<double> states() const;

    /// Runs to the horizon if needed and hands over the logs and metrics.
    RunResult finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

RunResult run(const EngineConfig& config);

}  // namespace mgcc::engine
