#include "mgcc/engine.hpp"
#include "mgcc/error.hpp"
#include "mgcc/random.hpp"
#include "mgcc/state_metrics.hpp"

#include <doctest.h>

#include <cmath>

using namespace mgcc;
using namespace mgcc::engine;

namespace {

Topology ring4()
{
    return Topology::from_adjacency({{0, 1, 0, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}, {1, 0, 1, 0}});
}

EngineConfig uniform_config(const Topology& t, std::vector<double> x0, double eps, double rate,
                            double horizon)
{
    EngineConfig c;
    c.topology = t;
    c.channels = ChannelSet(t, false, horizon);
    c.mode = design::Mode::Global;
    const std::size_t m = t.directed_edges().size();
    c.eps.assign(m, eps);
    c.rate.assign(m, rate);
    c.measurement_period.assign(t.node_count(), 0.01);
    c.actuation_period.assign(t.node_count(), 0.01);
    c.initial = std::move(x0);
    c.horizon = horizon;
    c.record_period = 0.05;
    c.delta = eps * static_cast<double>(t.node_count() - 1);
    return c;
}

void attack_all(ChannelSet& set, double start, double end, bool comm_only)
{
    for (Channel* c : set.all()) {
        if (comm_only && c->id.kind != ChannelKind::Communication) {
            continue;
        }
        attacks::DosParams p;
        p.eta = 1e6;
        p.kappa = 1e6;
        c->params = p;
        c->sequence = attacks::DosSequence({{start, end}}, set.horizon());
    }
}

}  // namespace

TEST_SUITE("engine")
{
    TEST_CASE("two nodes settle at the hand-computed states")
    {
        const auto t = Topology::from_adjacency({{0, 1}, {1, 0}});
        const RunResult r = run(uniform_config(t, {0.0, 1.0}, 0.1, 1.0, 2.0));
        REQUIRE(r.metrics.final_x.size() == 2);
        CHECK(r.metrics.final_x[0] == 0.46875);
        CHECK(r.metrics.final_x[1] == 0.53125);
        CHECK(r.metrics.converged);
        // Triggers of 0>1 at 0, 0.25, 0.375, 0.4375, 0.46875, then every 0.025.
        std::vector<double> times;
        for (const TriggerRow& row : r.triggers) {
            if (row.node == 0 && times.size() < 5) {
                times.push_back(row.t);
            }
        }
        CHECK(times == std::vector<double>{0, 0.25, 0.375, 0.4375, 0.46875});
    }

    TEST_CASE("attack-free ring enters the consensus set with V non-increasing")
    {
        const RunResult r = run(uniform_config(ring4(), {0, 1, 2, 3}, 0.1, 1.0, 20.0));
        CHECK(r.metrics.converged);
        CHECK(r.metrics.final_disagreement < 0.3);
        double last = 1e300;
        for (const TriggerRow& row : r.triggers) {
            CHECK(row.v <= last + 1e-12);
            last = row.v;
        }
        // Strict decrease between successive triggers that act on |D| >= eps.
        std::optional<double> prev;
        for (const TriggerRow& row : r.triggers) {
            if (row.status == controller::TriggerStatus::Healthy && std::abs(row.d) >= row.eps) {
                if (prev && row.t > 0) {
                    CHECK(row.v <= *prev);
                }
                prev = row.v;
            }
        }
    }

    TEST_CASE("permanently attacked communication freezes the states")
    {
        const Topology t = ring4();
        EngineConfig c = uniform_config(t, {0, 1, 2, 3}, 0.1, 1.0, 5.0);
        attack_all(c.channels, 0.0, 5.0, true);
        const RunResult r = run(c);
        for (const TriggerRow& row : r.triggers) {
            CHECK(row.u == 0);
            // Nothing was ever delivered, so these report as no-data.
            CHECK(row.status != controller::TriggerStatus::Healthy);
        }
        CHECK(r.metrics.final_x == std::vector<double>{0, 1, 2, 3});
        for (const SampleRow& s : r.samples) {
            CHECK(s.v == doctest::Approx(lyapunov(std::vector<double>{0, 1, 2, 3})));
        }
        CHECK_FALSE(r.metrics.converged);
    }

    TEST_CASE("single node and zero horizon")
    {
        const auto one = Topology::from_adjacency({{0}});
        const RunResult r = run(uniform_config(one, {4.2}, 0.1, 1.0, 3.0));
        CHECK(r.triggers.empty());
        CHECK(r.metrics.final_x == std::vector<double>{4.2});
        CHECK(r.metrics.converged);

        const RunResult z = run(uniform_config(ring4(), {0, 1, 2, 3}, 0.1, 1.0, 0.0));
        CHECK(z.samples.empty());
        CHECK(z.triggers.empty());
        CHECK(z.metrics.segments.empty());
        CHECK_FALSE(z.metrics.convergence_time);
    }

    TEST_CASE("activation gates the controller")
    {
        EngineConfig c = uniform_config(ring4(), {0, 1, 2, 3}, 0.1, 1.0, 6.0);
        c.activation_time = 2.0;
        const RunResult r = run(c);
        for (const SampleRow& s : r.samples) {
            if (s.t < 2.0) {
                CHECK(s.x == std::vector<double>{0, 1, 2, 3});
            }
        }
        REQUIRE_FALSE(r.triggers.empty());
        CHECK(r.triggers.front().t == 2.0);
        REQUIRE(r.metrics.convergence_time);
        CHECK(*r.metrics.convergence_time == doctest::Approx(*r.metrics.settle_time - 2.0));
    }

    TEST_CASE("blocked actuation delays the effect")
    {
        const auto t = Topology::from_adjacency({{0, 1}, {1, 0}});
        EngineConfig c = uniform_config(t, {0.0, 1.0}, 0.1, 1.0, 3.0);
        Channel& a = c.channels.actuation(0);
        attacks::DosParams p;
        p.eta = 10;
        p.kappa = 10;
        a.params = p;
        a.sequence = attacks::DosSequence({{0.0, 1.0}}, 3.0);
        const RunResult r = run(c);
        for (const SampleRow& s : r.samples) {
            if (s.t < 1.0) {
                CHECK(s.x[0] == 0.0);
                CHECK(s.u_star[0] == 0.0);
            }
        }
        const auto& stats = r.metrics.channels;
        const auto it = std::find_if(stats.begin(), stats.end(),
                                     [](const ChannelStats& s) { return s.id == "act:0"; });
        REQUIRE(it != stats.end());
        CHECK(it->failures > 0);
    }

    TEST_CASE("disturbances open new segments and consensus recovers")
    {
        EngineConfig c = uniform_config(ring4(), {0, 1, 2, 3}, 0.1, 1.0, 30.0);
        c.disturbances = {{10.0, 1, 2.0}, {20.0, 3, -1.5}};
        const RunResult r = run(c);
        REQUIRE(r.metrics.segments.size() == 3);
        for (const Segment& s : r.metrics.segments) {
            CHECK(s.recovered);
            REQUIRE(s.entry);
            CHECK(*s.entry >= s.start);
            CHECK(*s.entry <= s.end);
        }
        CHECK(r.metrics.settle_time.value_or(0) >= 20.0);
    }

    TEST_CASE("random runs: slope bound, dwell time, determinism")
    {
        Rng rng(101);
        const Topology t = ring4();
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> x0;
            for (int k = 0; k < 4; ++k) {
                x0.push_back(rng.uniform(-3, 3));
            }
            EngineConfig c = uniform_config(t, x0, 0.2, 1.2, 15.0);
            attacks::DosParams p;
            p.eta = 2;
            p.kappa = 0.1;
            p.tau_f = 2;
            p.tau_d = 6;
            p.delta_star = 0.01;
            for (Channel* ch : c.channels.all()) {
                ch->params = p;
            }
            c.channels.generate(trial);
            const RunResult a = run(c);
            const RunResult b = run(c);
            CHECK(a.samples.size() == b.samples.size());
            for (std::size_t k = 0; k < a.samples.size(); ++k) {
                CHECK(a.samples[k].x == b.samples[k].x);
            }
            for (std::size_t k = 1; k < a.samples.size(); ++k) {
                const double dt = a.samples[k].t - a.samples[k - 1].t;
                for (NodeId i = 0; i < 4; ++i) {
                    CHECK(std::abs(a.samples[k].x[i] - a.samples[k - 1].x[i]) <=
                          t.degree(i) * dt + 1e-12);
                    CHECK(std::abs(a.samples[k].u_star[i]) <= t.degree(i));
                }
            }
            for (const EdgeStats& s : a.metrics.edges) {
                CHECK(s.min_interval >= s.min_dwell - 1e-12);
            }
        }
    }

    TEST_CASE("stepping by hand matches run")
    {
        EngineConfig c = uniform_config(ring4(), {0, 3, 1, 2}, 0.1, 1.0, 4.0);
        Engine e(c);
        while (e.step()) {
        }
        const RunResult stepped = e.finish();
        const RunResult whole = run(c);
        CHECK(stepped.metrics.final_x == whole.metrics.final_x);
        CHECK(stepped.triggers.size() == whole.triggers.size());
    }
}
