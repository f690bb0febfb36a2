#include "mgcc/output.hpp"

#include "mgcc/aggregation.hpp"
#include "mgcc/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace mgcc::output {

namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

// nlohmann writes non-finite doubles as null already; this keeps it explicit.
json finite_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::Io, "cannot write " + path.string());
    }
    return out;
}

json microgrid_section(const scenario::MicrogridsSpec& m, const scenario::InstanceSpec& spec,
                       std::span<const double> x)
{
    const std::vector<double> droops = m.droops();
    const double ref = spec.reference.value_or(m.reference_hz);
    std::vector<double> frequency;
    std::vector<double> scaled_power;  // m_Pi P_i
    for (const double xi : x) {
        const double f = spec.source == scenario::InstanceSource::Power ? m.reference_hz - xi : xi;
        frequency.push_back(f);
        scaled_power.push_back(m.reference_hz - f);
    }
    const aggregation::Objectives o = aggregation::objective_metrics(frequency, scaled_power, ref);

    json groups = json::array();
    for (std::size_t i = 0; i < m.groups.size(); ++i) {
        const double total = scaled_power[i] / droops[i];
        const auto dgs = aggregation::dgs_from_ratings(m.groups[i].ratings, m.droop_constant,
                                                       frequency[i], m.cutoff);
        json shares = aggregation::share_power(total, dgs);
        groups.push_back({{"mg", i},
                          {"frequency_hz", frequency[i]},
                          {"power_kw", total},
                          {"droop", droops[i]},
                          {"ratings_kw", m.groups[i].ratings},
                          {"dg_power_kw", std::move(shares)}});
    }
    return {{"objectives",
             {{"sync_error", o.sync_error},
              {"sharing_error", o.sharing_error},
              {"ref_deviation", o.ref_deviation},
              {"reference_hz", ref}}},
            {"groups", std::move(groups)}};
}

}  // namespace

std::string format_number(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_trace_csv(std::ostream& out, const engine::RunResult& result, std::size_t n)
{
    out << 't';
    for (std::size_t i = 0; i < n; ++i) {
        out << ",x_" << i;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out << ",ustar_" << i;
    }
    out << ",V,max_disagreement\n";
    for (const engine::SampleRow& row : result.samples) {
        out << format_number(row.t);
        for (const double x : row.x) {
            out << ',' << format_number(x);
        }
        for (const double u : row.u_star) {
            out << ',' << format_number(u);
        }
        out << ',' << format_number(row.v) << ',' << format_number(row.disagreement) << '\n';
    }
}

void write_triggers_csv(std::ostream& out, const engine::RunResult& result)
{
    out << "t,node,neighbour,status,D,u,theta,eps,rate,V\n";
    for (const engine::TriggerRow& r : result.triggers) {
        out << format_number(r.t) << ',' << r.node << ',' << r.neighbour << ','
            << controller::to_string(r.status) << ',' << format_number(r.d) << ',' << r.u << ','
            << format_number(r.theta) << ',' << format_number(r.eps) << ','
            << format_number(r.rate) << ',' << format_number(r.v) << '\n';
    }
}

void write_adaptation_csv(std::ostream& out, const engine::RunResult& result)
{
    out << "k,node,neighbour,t_trigger,t_actuated,t_ii,t_ij,t_i0,gamma,eps,rate,vartheta,"
           "u_scaled\n";
    for (const engine::AdaptationRow& r : result.adaptation) {
        out << r.k << ',' << r.node << ',' << r.neighbour << ',' << format_number(r.t_trigger)
            << ',' << format_number(r.t_actuated) << ',' << format_number(r.t_ii) << ','
            << format_number(r.t_ij) << ',' << format_number(r.t_i0) << ','
            << format_number(r.gamma) << ',' << format_number(r.eps) << ','
            << format_number(r.rate) << ',' << format_number(r.vartheta) << ','
            << format_number(r.u_scaled) << '\n';
    }
}

std::vector<engine::RunResult> run_plan(const scenario::Plan& plan)
{
    std::vector<engine::RunResult> results;
    results.reserve(plan.instances.size());
    for (const scenario::InstancePlan& ip : plan.instances) {
        results.push_back(engine::run(ip.config));
    }
    return results;
}

json instance_summary(const scenario::Scenario& scenario, const scenario::Plan& plan,
                      std::size_t instance, const engine::RunResult& result)
{
    const scenario::InstancePlan& ip = plan.instances.at(instance);
    const engine::RunMetrics& m = result.metrics;
    const Topology& topo = ip.config.topology;

    json doc;
    doc["name"] = ip.spec.name;
    doc["converged"] = m.converged;
    doc["settle_time"] = optional_number(m.settle_time);
    doc["convergence_time"] = optional_number(m.convergence_time);

    std::optional<double> t_star;
    double v0 = 0.0;
    for (const design::InstanceBound& b : plan.certificate.instances) {
        if (b.name == ip.spec.name) {
            t_star = b.t_star;
            v0 = b.v0;
        }
    }
    doc["v0"] = v0;
    doc["t_star"] = optional_number(t_star);
    doc["within_bound"] = (t_star && m.convergence_time)
                              ? json(*m.convergence_time <= *t_star)
                              : json(nullptr);
    doc["delta"] = ip.config.delta;
    doc["final_disagreement"] = m.final_disagreement;
    doc["final_v"] = m.final_v;
    doc["final_x"] = m.final_x;
    doc["events"] = m.events;

    json segments = json::array();
    for (const engine::Segment& s : m.segments) {
        segments.push_back({{"start", s.start},
                            {"end", s.end},
                            {"entry", optional_number(s.entry)},
                            {"recovered", s.recovered}});
    }
    doc["segments"] = std::move(segments);

    json edges = json::array();
    const auto& directed = topo.directed_edges();
    for (std::size_t e = 0; e < directed.size() && e < m.edges.size(); ++e) {
        const engine::EdgeStats& s = m.edges[e];
        edges.push_back({{"node", directed[e].node},
                         {"neighbour", directed[e].neighbour},
                         {"triggers", s.triggers},
                         {"healthy", s.healthy},
                         {"attacked", s.attacked},
                         {"min_interval", finite_or_null(s.min_interval)},
                         {"min_dwell", finite_or_null(s.min_dwell)}});
    }
    doc["edges"] = std::move(edges);

    json channels = json::array();
    for (const engine::ChannelStats& c : m.channels) {
        channels.push_back({{"id", c.id}, {"attempts", c.attempts}, {"failures", c.failures}});
    }
    doc["channels"] = std::move(channels);

    if (scenario.microgrids && ip.spec.source != scenario::InstanceSource::Explicit) {
        doc["microgrids"] = microgrid_section(*scenario.microgrids, ip.spec, m.final_x);
    }
    return doc;
}

json run_summary(const scenario::Scenario& scenario, const scenario::Plan& plan,
                 const std::vector<engine::RunResult>& results)
{
    json doc;
    doc["version"] = 1;
    doc["scenario"] = scenario.name;
    doc["seed"] = plan.seed;
    doc["mode"] = design::to_string(plan.certificate.mode);
    doc["design_satisfied"] = plan.certificate.satisfied;
    json instances = json::array();
    bool all = true;
    for (std::size_t k = 0; k < results.size(); ++k) {
        instances.push_back(instance_summary(scenario, plan, k, results[k]));
        all = all && results[k].metrics.converged;
    }
    doc["converged"] = all;
    doc["instances"] = std::move(instances);
    return doc;
}

void write_json(const std::filesystem::path& path, const json& doc)
{
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
}

void write_run(const std::filesystem::path& dir, const scenario::Scenario& scenario,
               const scenario::Plan& plan, const std::vector<engine::RunResult>& results)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
    }
    write_json(dir / "attacks.json", to_json(plan.channels));
    write_json(dir / "certificate.json", design::to_json(plan.certificate));
    write_json(dir / "summary.json", run_summary(scenario, plan, results));
    for (std::size_t k = 0; k < results.size(); ++k) {
        const scenario::InstancePlan& ip = plan.instances[k];
        const std::filesystem::path sub = dir / ip.spec.name;
        std::filesystem::create_directories(sub, ec);
        if (ec) {
            throw Error(Errc::Io, "cannot create " + sub.string() + ": " + ec.message());
        }
        std::ofstream trace = open_out(sub / "trace.csv");
        write_trace_csv(trace, results[k], ip.config.topology.node_count());
        std::ofstream triggers = open_out(sub / "triggers.csv");
        write_triggers_csv(triggers, results[k]);
        std::ofstream adaptation = open_out(sub / "adaptation.csv");
        write_adaptation_csv(adaptation, results[k]);
    }
}

}  // namespace mgcc::output
