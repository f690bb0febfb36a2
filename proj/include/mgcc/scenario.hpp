#pragma once

#include "mgcc/attacks.hpp"
#include "mgcc/channels.hpp"
#include "mgcc/design.hpp"
#include "mgcc/engine.hpp"
#include "mgcc/topology.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mgcc::scenario {

/// Budget of one channel as written in a scenario; `podf` calibrates kappa
/// so the worst-case delay equals it.
struct AttackSpec {
    std::optional<double> eta;
    std::optional<double> kappa;
    std::optional<double> podf;
    std::optional<double> tau_f;
    std::optional<double> tau_d;
    std::optional<double> delta_star;
};

struct ChannelClassSpec {
    double delta_star = 0.01;  // attempt period; derived for communication
    std::optional<AttackSpec> attacks;
    // Key is "<node>" for measurement/actuation, "<i>-<j>" or "<i>><j>" for
    // communication. An empty optional marks the channel attack-free.
    std::map<std::string, std::optional<AttackSpec>> overrides;
};

struct LoadStep {
    double time = 0.0;
    NodeId mg = 0;
    double delta_kw = 0.0;
};

struct MicrogridSpec {
    double load_kw = 0.0;
    std::vector<double> ratings;
};

struct MicrogridsSpec {
    double droop_constant = 0.5;  // c in m_j = c / P_max,j, Hz
    double cutoff = 31.4;
    double reference_hz = 50.0;
    std::vector<MicrogridSpec> groups;
    std::vector<LoadStep> load_steps;

    /// Equivalent droop m_Pi of every microgrid.
    std::vector<double> droops() const;
};

enum class InstanceSource { Explicit, Frequency, Power };

struct InstanceSpec {
    std::string name;
    InstanceSource source = InstanceSource::Explicit;
    std::vector<double> initial;
    std::vector<engine::Disturbance> disturbances;
    std::optional<double> reference;
};

struct Scenario {
    std::filesystem::path path;  // empty when parsed from text
    int version = 1;
    std::string name;
    std::uint64_t seed = 0;
    double horizon = 10.0;
    double activation_time = 0.0;
    double record_period = 0.1;
    Topology topology = Topology::from_edges(1, {});
    design::DesignOptions design;
    bool per_direction = false;
    attacks::GeneratorOptions generator;
    ChannelClassSpec measurement;
    ChannelClassSpec actuation;
    ChannelClassSpec communication;
    std::optional<std::filesystem::path> trace;
    std::optional<MicrogridsSpec> microgrids;
    std::vector<InstanceSpec> instances;
};

/// Throws Error(Config) carrying "file:line:col: message" for schema and
/// validation problems; topology errors keep their own code.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::filesystem::path& origin = {});

enum class ChannelClass { Measurement, Actuation, Communication };

ChannelClass channel_class_from_string(const std::string& text);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<design::Mode> mode;
    std::optional<double> eps;   // fixed uniform design, resilient-global and nominal only
    std::optional<double> rate;
    std::optional<std::filesystem::path> attacks;  // replay this trace
    std::map<ChannelClass, double> soften;         // class -> factor
    bool log = true;                               // keep per-event logs
};

struct InstancePlan {
    InstanceSpec spec;
    engine::EngineConfig config;
};

struct Plan {
    std::uint64_t seed = 0;
    ChannelSet channels;
    design::DesignCertificate certificate;
    std::vector<InstancePlan> instances;
};

/// Budgets, design, attack sequences and one engine configuration per
/// instance, all fixed before any simulation starts.
Plan prepare(const Scenario& scenario, const Overrides& overrides = {});

/// Channel set with budgets and designed communication periods but no
/// sequences yet, plus the certificate.
std::pair<ChannelSet, design::DesignCertificate> design_only(const Scenario& scenario,
                                                             const Overrides& overrides = {});

}  // namespace mgcc::scenario
