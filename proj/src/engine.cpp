#include "mgcc/engine.hpp"

#include "mgcc/adaptive.hpp"
#include "mgcc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

namespace mgcc::engine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Processing order of events that share a timestamp.
enum class Kind : int {
    AttackBoundary = 0,
    Measurement = 1,
    ClockExpiry = 2,
    Actuation = 3,
    Disturbance = 4,
    Sample = 5,
};

struct Event {
    double time;
    Kind kind;
    std::uint64_t seq;
    std::size_t index;
    std::uint64_t tag;  // boundary direction or actuation generation
};

struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept
    {
        if (a.time != b.time) {
            return a.time > b.time;
        }
        if (a.kind != b.kind) {
            return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        }
        return a.seq > b.seq;
    }
};

struct PendingAdaptation {
    adaptive::LedgerEntry entry;
    double d = 0.0;
    adaptive::AdaptiveParams params;
    double theta = 0.0;
    int u = 0;
    double u_scaled = 0.0;
};

struct EdgeRuntime {
    NodeId i = 0;
    NodeId j = 0;
    std::size_t comm_channel = 0;
    controller::EdgeControllerState ctl;
    double applied = 0.0;  // contribution to the commanded node input
    std::optional<controller::Sample> delivered;
    std::optional<PendingAdaptation> pending;
    std::size_t k = 0;
    double last_trigger = -kInf;
    double last_dwell = 0.0;
};

void require(bool ok, const std::string& what)
{
    if (!ok) {
        throw Error(Errc::Config, what);
    }
}

}  // namespace

struct Engine::Impl {
    EngineConfig cfg;
    std::size_t n = 0;
    std::vector<const Channel*> channel_list;
    std::vector<bool> attacked;

    std::vector<double> x0;
    std::vector<double> t0;
    std::vector<double> u_star;
    std::vector<std::optional<controller::Sample>> cache;
    std::vector<std::size_t> measurement_count;
    std::vector<std::uint64_t> generation;
    std::vector<EdgeRuntime> edges;

    std::priority_queue<Event, std::vector<Event>, Later> queue;
    std::uint64_t seq = 0;
    std::size_t sample_count = 0;
    double now = 0.0;
    bool done = false;

    std::optional<double> inside_since;
    std::size_t segment_index = 0;

    RunResult result;

    explicit Impl(EngineConfig config) : cfg(std::move(config))
    {
        validate();
        n = cfg.topology.node_count();
        channel_list = std::as_const(cfg.channels).all();
        attacked.assign(channel_list.size(), false);
        x0 = cfg.initial;
        t0.assign(n, 0.0);
        u_star.assign(n, 0.0);
        cache.assign(n, std::nullopt);
        measurement_count.assign(n, 0);
        generation.assign(n, 0);

        const auto& directed = cfg.topology.directed_edges();
        for (std::size_t k = 0; k < directed.size(); ++k) {
            EdgeRuntime e;
            e.i = directed[k].node;
            e.j = directed[k].neighbour;
            const Channel* c = &cfg.channels.communication(e.i, e.j);
            e.comm_channel = static_cast<std::size_t>(
                std::find(channel_list.begin(), channel_list.end(), c) - channel_list.begin());
            e.ctl.eps = cfg.eps[k];
            e.ctl.rate = cfg.rate[k];
            edges.push_back(e);
        }

        result.metrics.edges.assign(edges.size(), EdgeStats{});
        for (EdgeStats& s : result.metrics.edges) {
            s.min_interval = kInf;
            s.min_dwell = kInf;
        }
        for (const Channel* c : channel_list) {
            result.metrics.channels.push_back({c->id.str(), 0, 0});
        }

        if (cfg.horizon <= 0.0) {
            done = true;
            return;
        }
        build_segments();
        seed_events();
        observe_instant();
    }

    void validate() const
    {
        const std::size_t nodes = cfg.topology.node_count();
        const std::size_t m = cfg.topology.directed_edges().size();
        require(cfg.channels.node_count() == nodes, "channel set does not match the topology");
        require(cfg.eps.size() == m && cfg.rate.size() == m,
                "need one eps and one rate per directed edge");
        for (std::size_t k = 0; k < m; ++k) {
            require(cfg.eps[k] > 0.0 && cfg.rate[k] > 0.0, "eps and rate must be positive");
        }
        require(cfg.initial.size() == nodes, "need one initial state per node");
        require(cfg.measurement_period.size() == nodes && cfg.actuation_period.size() == nodes,
                "need measurement and actuation periods per node");
        for (std::size_t i = 0; i < nodes; ++i) {
            require(cfg.measurement_period[i] > 0.0 && cfg.actuation_period[i] > 0.0,
                    "attempt periods must be positive");
        }
        if (cfg.mode == design::Mode::SelfAdaptive) {
            require(cfg.phi_i0.size() == nodes, "self-adaptive mode needs Phi_i0 per node");
            require(cfg.alpha > 1.0 && cfg.beta > 1.0 && cfg.eps_floor > 0.0,
                    "self-adaptive mode needs alpha > 1, beta > 1 and a positive floor");
        }
        require(std::isfinite(cfg.horizon) && cfg.horizon >= 0.0, "horizon must be finite");
        for (const Disturbance& d : cfg.disturbances) {
            require(d.node < nodes, "disturbance node out of range");
            require(d.time >= 0.0, "disturbance time must be non-negative");
        }
    }

    void push(double time, Kind kind, std::size_t index, std::uint64_t tag = 0)
    {
        if (time < cfg.horizon) {
            queue.push({time, kind, seq++, index, tag});
        }
    }

    void build_segments()
    {
        std::vector<double> cuts{cfg.activation_time};
        for (const Disturbance& d : cfg.disturbances) {
            if (d.time > cfg.activation_time && d.time < cfg.horizon) {
                cuts.push_back(d.time);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t k = 0; k < cuts.size(); ++k) {
            if (cuts[k] >= cfg.horizon) {
                break;
            }
            const double end = k + 1 < cuts.size() ? cuts[k + 1] : cfg.horizon;
            result.metrics.segments.push_back({cuts[k], end, std::nullopt, false});
        }
    }

    void seed_events()
    {
        for (std::size_t c = 0; c < channel_list.size(); ++c) {
            for (const attacks::Interval& iv : channel_list[c]->sequence.intervals()) {
                push(iv.start, Kind::AttackBoundary, c, 1);
                push(iv.end, Kind::AttackBoundary, c, 0);
            }
        }
        for (NodeId i = 0; i < n; ++i) {
            push(0.0, Kind::Measurement, i);
        }
        for (std::size_t k = 0; k < edges.size(); ++k) {
            push(cfg.activation_time, Kind::ClockExpiry, k);
        }
        for (std::size_t d = 0; d < cfg.disturbances.size(); ++d) {
            push(cfg.disturbances[d].time, Kind::Disturbance, d);
        }
        if (cfg.log_samples && cfg.record_period > 0.0) {
            push(0.0, Kind::Sample, 0);
        }
    }

    double x_at(NodeId i, double t) const { return x0[i] + u_star[i] * (t - t0[i]); }

    std::vector<double> states_at(double t) const
    {
        std::vector<double> x(n);
        for (NodeId i = 0; i < n; ++i) {
            x[i] = x_at(i, t);
        }
        return x;
    }

    bool inside(double t) const
    {
        if (n < 2) {
            return true;
        }
        const std::vector<double> x = states_at(t);
        return max_disagreement(x) < cfg.delta;
    }

    /// Moves the consensus-set bookkeeping from `now` to `t` with the slopes
    /// currently in force. Between events the spread is convex in time, so
    /// a set entered by `t` was entered at a single crossing.
    void advance_to(double t)
    {
        if (inside(t)) {
            if (!inside_since) {
                double lo = now;
                double hi = t;
                for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                    const double mid = lo + 0.5 * (hi - lo);
                    if (mid <= lo || mid >= hi) {
                        break;
                    }
                    (inside(mid) ? hi : lo) = mid;
                }
                inside_since = hi;
            }
        } else {
            inside_since.reset();
        }
        now = t;
    }

    void observe_instant()
    {
        if (inside(now)) {
            if (!inside_since) {
                inside_since = now;
            }
        } else {
            inside_since.reset();
        }
    }

    void close_segments_until(double t)
    {
        auto& segs = result.metrics.segments;
        while (segment_index < segs.size() && segs[segment_index].end <= t) {
            Segment& s = segs[segment_index++];
            s.recovered = inside_since.has_value();
            if (inside_since) {
                s.entry = std::max(*inside_since, s.start);
            }
        }
    }

    void set_u_star(NodeId i, double value)
    {
        x0[i] = x_at(i, now);
        t0[i] = now;
        u_star[i] = value;
    }

    bool channel_ok(std::size_t c) const { return !attacked[c]; }
    std::size_t measurement_channel(NodeId i) const { return i; }
    std::size_t actuation_channel(NodeId i) const { return n + i; }

    void attempt(std::size_t c, bool ok)
    {
        ChannelStats& s = result.metrics.channels[c];
        ++s.attempts;
        if (!ok) {
            ++s.failures;
        }
    }

    void on_measurement(NodeId i)
    {
        const bool ok = channel_ok(measurement_channel(i));
        attempt(measurement_channel(i), ok);
        if (ok) {
            cache[i] = controller::Sample{x_at(i, now), now};
        }
        ++measurement_count[i];
        push(static_cast<double>(measurement_count[i]) * cfg.measurement_period[i],
             Kind::Measurement, i);
    }

    void refresh(NodeId node)
    {
        if (channel_ok(measurement_channel(node))) {
            cache[node] = controller::Sample{x_at(node, now), now};
        }
    }

    void on_clock_expiry(std::size_t k)
    {
        EdgeRuntime& e = edges[k];
        const std::size_t d_i = cfg.topology.degree(e.i);
        const std::size_t d_j = cfg.topology.degree(e.j);

        refresh(e.i);
        const bool comm_ok = channel_ok(e.comm_channel);
        attempt(e.comm_channel, comm_ok);
        if (comm_ok) {
            refresh(e.j);
            if (cache[e.j]) {
                e.delivered = cache[e.j];
            }
        }

        controller::TriggerInput in;
        in.own = cache[e.i];
        in.neighbour = comm_ok ? cache[e.j] : e.delivered;
        in.comm_healthy = comm_ok;
        in.now = now;
        in.d_i = d_i;
        in.d_j = d_j;
        const double v = cfg.log_triggers ? lyapunov(states_at(now)) : 0.0;
        const controller::Law law = cfg.mode == design::Mode::Nominal
                                        ? controller::Law::Nominal
                                        : controller::Law::Resilient;
        const controller::TriggerOutcome out = controller::on_clock_expiry(e.ctl, in, law);

        EdgeStats& stats = result.metrics.edges[k];
        ++stats.triggers;
        if (out.status == controller::TriggerStatus::Healthy) {
            ++stats.healthy;
        } else {
            ++stats.attacked;
        }
        if (e.last_trigger > -kInf) {
            stats.min_interval = std::min(stats.min_interval, now - e.last_trigger);
            stats.min_dwell = std::min(stats.min_dwell, e.last_dwell);
        }
        e.last_trigger = now;
        ++e.k;

        if (cfg.log_triggers) {
            result.triggers.push_back({now, e.i, e.j, out.status, out.d, out.u, out.theta,
                                       e.ctl.eps, e.ctl.rate, v});
        }

        const bool adapt = cfg.mode == design::Mode::SelfAdaptive &&
                           out.status == controller::TriggerStatus::Healthy;
        if (adapt) {
            PendingAdaptation p;
            p.entry.k = e.k - 1;
            p.entry.t_trigger = now;
            p.entry.own_stamp = in.own->stamp;
            p.entry.neighbour_stamp = in.neighbour->stamp;
            p.d = out.d;
            e.pending = p;
            e.applied = 0.0;
        } else {
            e.pending.reset();
            e.applied = static_cast<double>(out.u);
            e.last_dwell = controller::dwell_time(e.ctl.eps, e.ctl.rate, d_i, d_j);
            push(e.ctl.expiry(), Kind::ClockExpiry, k);
        }

        ++generation[e.i];
        push(now, Kind::Actuation, e.i, generation[e.i]);
    }

    void adapt_pending(EdgeRuntime& e)
    {
        PendingAdaptation& p = *e.pending;
        const std::size_t d_i = cfg.topology.degree(e.i);
        const std::size_t d_j = cfg.topology.degree(e.j);
        p.entry.t_hat_i0 = now - p.entry.t_trigger;
        const double g = adaptive::gamma(p.entry, d_i, d_j);
        p.params = adaptive::adapt_params(g, cfg.alpha, cfg.beta, cfg.eps_floor);
        p.u = controller::sign_eps(p.d, p.params.eps);
        p.theta = controller::clock_reset(p.d, p.params.eps, d_i, d_j);
        p.u_scaled = adaptive::scaled_input(p.u, p.theta, p.params.rate, cfg.phi_i0[e.i]);
        e.applied = p.u_scaled;
    }

    void finalize_pending(std::size_t k)
    {
        EdgeRuntime& e = edges[k];
        PendingAdaptation& p = *e.pending;
        const std::size_t d_i = cfg.topology.degree(e.i);
        const std::size_t d_j = cfg.topology.degree(e.j);
        p.entry.actuated = now;
        e.ctl.eps = p.params.eps;
        e.ctl.rate = p.params.rate;
        e.ctl.theta = p.theta;
        e.ctl.u = p.u;
        const double vartheta = p.theta / p.params.rate;
        e.last_dwell = controller::dwell_time(p.params.eps, p.params.rate, d_i, d_j);
        if (cfg.log_triggers) {
            result.adaptation.push_back({p.entry.k, e.i, e.j, p.entry.t_trigger, now,
                                         p.entry.t_ii(), p.entry.t_ij(), p.entry.t_i0(),
                                         p.params.gamma, p.params.eps, p.params.rate, vartheta,
                                         p.u_scaled});
        }
        push(now + vartheta, Kind::ClockExpiry, k);
        e.pending.reset();
    }

    void on_actuation(NodeId i, std::uint64_t gen)
    {
        if (gen != generation[i]) {
            return;  // superseded by a newer controller output
        }
        const auto out = cfg.topology.outgoing(i);
        double commanded = 0.0;
        for (const std::size_t k : out) {
            if (edges[k].pending) {
                adapt_pending(edges[k]);
            }
            commanded += edges[k].applied;
        }
        const bool ok = channel_ok(actuation_channel(i));
        attempt(actuation_channel(i), ok);
        if (ok) {
            set_u_star(i, commanded);
            for (const std::size_t k : out) {
                if (edges[k].pending) {
                    finalize_pending(k);
                }
            }
        } else {
            for (const std::size_t k : out) {
                if (edges[k].pending) {
                    adaptive::actuation_estimator(edges[k].pending->entry, now,
                                                  cfg.actuation_period[i]);
                }
            }
            push(now + cfg.actuation_period[i], Kind::Actuation, i, gen);
        }
    }

    void on_disturbance(std::size_t d)
    {
        close_segments_until(now);
        const Disturbance& dist = cfg.disturbances[d];
        x0[dist.node] = x_at(dist.node, now) + dist.jump;
        t0[dist.node] = now;
        observe_instant();
    }

    void record_sample()
    {
        SampleRow row;
        row.t = now;
        row.x = states_at(now);
        row.u_star = u_star;
        row.v = lyapunov(row.x);
        row.disagreement = max_disagreement(row.x);
        result.samples.push_back(std::move(row));
    }

    void on_sample()
    {
        record_sample();
        ++sample_count;
        push(static_cast<double>(sample_count) * cfg.record_period, Kind::Sample, 0);
    }

    void finalize()
    {
        advance_to(cfg.horizon);
        close_segments_until(cfg.horizon);
        if (cfg.log_samples) {
            record_sample();
        }
        RunMetrics& m = result.metrics;
        m.final_x = states_at(cfg.horizon);
        m.final_v = lyapunov(m.final_x);
        m.final_disagreement = max_disagreement(m.final_x);
        m.converged = inside_since.has_value();
        m.settle_time = inside_since;
        if (inside_since) {
            m.convergence_time = std::max(0.0, *inside_since - cfg.activation_time);
        }
        done = true;
    }

    bool step()
    {
        if (done) {
            return false;
        }
        if (queue.empty()) {
            finalize();
            return false;
        }
        const Event e = queue.top();
        queue.pop();
        advance_to(e.time);
        ++result.metrics.events;
        switch (e.kind) {
        case Kind::AttackBoundary: attacked[e.index] = e.tag == 1; break;
        case Kind::Measurement: on_measurement(e.index); break;
        case Kind::ClockExpiry: on_clock_expiry(e.index); break;
        case Kind::Actuation: on_actuation(e.index, e.tag); break;
        case Kind::Disturbance: on_disturbance(e.index); break;
        case Kind::Sample: on_sample(); break;
        }
        return true;
    }
};

Engine::Engine(EngineConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

bool Engine::step()
{
    return impl_->step();
}

double Engine::time() const noexcept
{
    return impl_->now;
}

std::vector<double> Engine::states() const
{
    return impl_->states_at(impl_->now);
}

RunResult Engine::finish()
{
    while (impl_->step()) {
    }
    return std::move(impl_->result);
}

RunResult run(const EngineConfig& config)
{
    return Engine(config).finish();
}

}  // namespace mgcc::engine
