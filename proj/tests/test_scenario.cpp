#include "mgcc/error.hpp"
#include "mgcc/output.hpp"
#include "mgcc/scenario.hpp"
#include "mgcc/sweep.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mgcc;
using namespace mgcc::scenario;

namespace {

const char* kBase = R"(version: 1
name: small
seed: 3
horizon: 12
activation_time: 1
record_period: 0.1
topology:
  adjacency: [[0,1,0,1],[1,0,1,0],[0,1,0,1],[1,0,1,0]]
controller: {mode: resilient-global, eps_floor: 0.01}
channels:
  measurement:
    attacks: {eta: 2, podf: 0.0526, tau_f: 2, tau_d: 8}
    overrides:
      "2": null
  actuation:
    attacks: {eta: 2, podf: 0.0526, tau_f: 2, tau_d: 8}
  communication:
    attacks: {eta: 1, kappa: 0.1, tau_f: 5, tau_d: 5}
microgrids:
  droop_constant: 16
  groups:
    - {load_kw: 60, ratings_kw: [20, 15, 15, 15, 15]}
    - {load_kw: 40, ratings_kw: [20, 20, 15, 15, 10]}
    - {load_kw: 56, ratings_kw: [15, 20, 20, 15]}
    - {load_kw: 10, ratings_kw: [10, 10, 15]}
  load_steps:
    - {time: 6, mg: 1, delta_kw: 20}
instances:
  - {name: frequency, from: frequency}
  - {name: power, from: power}
  - name: explicit
    initial: [0, 4, 8, 12]
    disturbances: [{time: 5, node: 0, jump: 1.5}]
)";

std::string error_of(const std::string& text, Errc* code = nullptr)
{
    try {
        parse_scenario(text, "case.yaml");
    } catch (const Error& e) {
        if (code) {
            *code = e.code();
        }
        return e.what();
    }
    return "";
}

std::string replace(std::string text, const std::string& from, const std::string& to)
{
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

}  // namespace

TEST_SUITE("scenario")
{
    TEST_CASE("full scenario parses")
    {
        const Scenario s = parse_scenario(kBase);
        CHECK(s.name == "small");
        CHECK(s.topology.node_count() == 4);
        CHECK(s.instances.size() == 3);
        CHECK(s.instances[0].source == InstanceSource::Frequency);
        CHECK(s.instances[2].disturbances.size() == 1);
        REQUIRE(s.microgrids);
        CHECK(s.microgrids->groups[1].ratings.size() == 5);
        CHECK(s.measurement.overrides.count("2") == 1);
    }

    TEST_CASE("diagnostics carry the line")
    {
        Errc code{};
        std::string msg = error_of(replace(kBase, "record_period: 0.1", "record_period: 0.1\nbogus: 1"), &code);
        CHECK(code == Errc::Config);
        CHECK(msg.find("case.yaml:7:") != std::string::npos);
        CHECK(msg.find("unknown key 'bogus'") != std::string::npos);

        msg = error_of(replace(kBase, "[[0,1,0,1],[1,0,1,0]", "[[0,1,0,1],[0,0,1,0]"), &code);
        CHECK(code == Errc::NotSymmetric);
        CHECK(msg.find("case.yaml:8:") != std::string::npos);

        msg = error_of(replace(kBase, "horizon: 12", "horizon: 0.5"), &code);
        CHECK(code == Errc::Config);
        CHECK(msg.find("horizon") != std::string::npos);

        msg = error_of(replace(kBase, "mode: resilient-global", "mode: turbo"), &code);
        CHECK(msg.find("turbo") != std::string::npos);

        msg = error_of(replace(kBase, "mode: resilient-global", "mode: nominal"), &code);
        CHECK(msg.find("nominal mode needs") != std::string::npos);

        msg = error_of(replace(kBase, "initial: [0, 4, 8, 12]", "initial: [0, 4, 8]"), &code);
        CHECK(msg.find("one value per node") != std::string::npos);

        msg = error_of(replace(kBase, "tau_f: 2, tau_d: 8}\n    overrides", "tau_f: x, tau_d: 8}\n    overrides"), &code);
        CHECK(msg.find("must be a number") != std::string::npos);

        msg = error_of(replace(kBase, "version: 1", "version: 2"), &code);
        CHECK(msg.find("unsupported scenario version") != std::string::npos);

        msg = error_of("version: 1\nhorizon: [1\n", &code);
        CHECK(code == Errc::Config);
        CHECK(msg.find("case.yaml:") != std::string::npos);
    }

    TEST_CASE("referenced channels must exist")
    {
        const Scenario bad = parse_scenario(replace(kBase, "\"2\": null", "\"9\": null"));
        CHECK_THROWS_AS(prepare(bad), Error);
        const Scenario comm = parse_scenario(
            replace(kBase, "tau_f: 5, tau_d: 5}", "tau_f: 5, tau_d: 5}\n    overrides: {\"0-2\": null}"));
        CHECK_THROWS_AS(prepare(comm), Error);
        const Scenario ok = parse_scenario(
            replace(kBase, "tau_f: 5, tau_d: 5}", "tau_f: 5, tau_d: 5}\n    overrides: {\"0-1\": null}"));
        const Plan plan = prepare(ok);
        CHECK_FALSE(plan.channels.communication(0, 1).params);
        CHECK(plan.channels.communication(1, 2).params);
    }

    TEST_CASE("plan contents")
    {
        const Scenario s = parse_scenario(kBase);
        const Plan plan = prepare(s);
        CHECK(plan.seed == 3);
        CHECK_FALSE(plan.channels.measurement(2).params);
        CHECK(plan.channels.measurement(1).params);
        REQUIRE(plan.instances.size() == 3);
        const auto droops = s.microgrids->droops();
        CHECK(droops[0] == doctest::Approx(16.0 / 80));
        const auto& f = plan.instances[0].config;
        CHECK(f.initial[0] == doctest::Approx(50 - 0.2 * 60));
        const auto& p = plan.instances[1].config;
        CHECK(p.initial[3] == doctest::Approx(16.0 / 35 * 10));
        REQUIRE(f.disturbances.size() == 1);
        CHECK(f.disturbances[0].jump == doctest::Approx(-0.2 * 20));
        CHECK(p.disturbances[0].jump == doctest::Approx(0.2 * 20));
        CHECK(plan.certificate.instances.size() == 3);
        CHECK(plan.channels.verify().empty());

        Overrides o;
        o.seed = 99;
        CHECK_FALSE(prepare(s, o).channels.actuation(0).sequence ==
                    plan.channels.actuation(0).sequence);
    }

    TEST_CASE("softening one class lowers only its bound")
    {
        const Scenario s = parse_scenario(kBase);
        Overrides o;
        o.soften[ChannelClass::Actuation] = 2.0;
        const auto [c1, base] = design_only(s);
        const auto [c2, soft] = design_only(s, o);
        CHECK(soft.phi.i0_max < base.phi.i0_max);
        CHECK(soft.phi.i_max == base.phi.i_max);
        CHECK(*soft.eps < *base.eps);
        CHECK_THROWS_AS(channel_class_from_string("radio"), Error);
    }

    TEST_CASE("trace replay reproduces the run")
    {
        const Scenario s = parse_scenario(kBase);
        const Plan plan = prepare(s);
        const auto first = output::run_plan(plan);

        const auto dir = std::filesystem::temp_directory_path() / "mgcc_replay_test";
        std::filesystem::create_directories(dir);
        write_attack_trace(dir / "attacks.json", plan.channels);
        Overrides o;
        o.attacks = dir / "attacks.json";
        o.seed = 12345;  // ignored when replaying
        const Plan replay = prepare(s, o);
        const auto second = output::run_plan(replay);
        REQUIRE(first.size() == second.size());
        for (std::size_t k = 0; k < first.size(); ++k) {
            CHECK(first[k].metrics.final_x == second[k].metrics.final_x);
            CHECK(first[k].metrics.settle_time == second[k].metrics.settle_time);
            CHECK(first[k].triggers.size() == second[k].triggers.size());
        }
        std::ostringstream a;
        std::ostringstream b;
        output::write_trace_csv(a, first[0], 4);
        output::write_trace_csv(b, second[0], 4);
        CHECK(a.str() == b.str());
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("output formats")
    {
        CHECK(output::format_number(0.1) == "0.10000000000000001");
        CHECK(output::format_number(2.0) == "2");
        const Scenario s = parse_scenario(kBase);
        const Plan plan = prepare(s);
        const auto results = output::run_plan(plan);
        std::ostringstream trace;
        output::write_trace_csv(trace, results[0], 4);
        CHECK(trace.str().rfind("t,x_0,x_1,x_2,x_3,ustar_0,ustar_1,ustar_2,ustar_3,V,max_disagreement\n", 0) == 0);
        std::ostringstream triggers;
        output::write_triggers_csv(triggers, results[0]);
        CHECK(triggers.str().rfind("t,node,neighbour,status,D,u,theta,eps,rate,V\n", 0) == 0);

        const auto summary = output::run_summary(s, plan, results);
        CHECK(summary["instances"].size() == 3);
        const auto& mg = summary["instances"][0]["microgrids"];
        const auto& shares = mg["groups"][1]["dg_power_kw"];
        REQUIRE(shares.size() == 5);
        CHECK(shares[0].get<double>() / shares[4].get<double>() == doctest::Approx(2.0));
        CHECK(mg["objectives"]["sync_error"].get<double>() ==
              doctest::Approx(results[0].metrics.final_disagreement));
        CHECK(summary["instances"][2].count("microgrids") == 0);
        // Frequency and power instances are mirror images.
        CHECK(summary["instances"][0]["final_disagreement"].get<double>() ==
              doctest::Approx(summary["instances"][1]["final_disagreement"].get<double>()));
    }

    TEST_CASE("sweep is independent of the thread count")
    {
        const Scenario s = parse_scenario(kBase);
        sweep::SweepOptions o;
        o.seeds = {1, 2, 3, 4};
        o.variants = {sweep::parse_variant("baseline"), sweep::parse_variant("actuation=2"),
                      sweep::parse_variant("measurement=2,communication=2")};
        o.threads = 1;
        const auto one = sweep::run_sweep(s, o);
        o.threads = 4;
        const auto four = sweep::run_sweep(s, o);
        CHECK(sweep::to_json(one).dump() == sweep::to_json(four).dump());
        std::ostringstream a;
        std::ostringstream b;
        sweep::write_cells_csv(a, one);
        sweep::write_cells_csv(b, four);
        CHECK(a.str() == b.str());
        CHECK(one.cells.size() == 3 * 4 * 3);
        CHECK(one.summaries.front().improvement == 0.0);
        CHECK_THROWS_AS(sweep::parse_variant("actuation"), Error);
        CHECK_THROWS_AS(sweep::parse_variant("actuation=-1"), Error);
        CHECK(sweep::median({3, 1, 2}) == 2.0);
        CHECK(sweep::median({4, 1, 2, 3}) == 2.5);
    }
}
