#pragma once

#include "mgcc/attacks.hpp"
#include "mgcc/topology.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mgcc {

enum class ChannelKind { Measurement, Actuation, Communication };

const char* to_string(ChannelKind kind) noexcept;

/// "meas:<i>", "act:<i>", "comm:<i>-<j>" (undirected, i < j) or
/// "comm:<i>><j>" (controller at i, data from j).
struct ChannelId {
    ChannelKind kind = ChannelKind::Measurement;
    NodeId a = 0;
    NodeId b = 0;
    bool directed = false;

    std::string str() const;
    static ChannelId parse(const std::string& text);

    friend bool operator==(const ChannelId&, const ChannelId&) = default;
};

/// One data-flow channel: its budget (absent for a channel that is never
/// attacked) and the concrete attack windows.
struct Channel {
    ChannelId id;
    std::optional<attacks::DosParams> params;
    attacks::DosSequence sequence;

    /// Worst-case delay to a successful transmission; 0 for an attack-free
    /// channel.
    double podf() const;
};

/// Every channel referenced by a topology: measurement and actuation per
/// node, communication per undirected edge (or per directed edge when
/// `per_direction` is set).
class ChannelSet {
public:
    ChannelSet() = default;
    ChannelSet(const Topology& topology, bool per_direction, double horizon);

    bool per_direction() const noexcept { return per_direction_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t node_count() const noexcept { return measurement_.size(); }

    Channel& measurement(NodeId i) { return measurement_.at(i); }
    const Channel& measurement(NodeId i) const { return measurement_.at(i); }
    Channel& actuation(NodeId i) { return actuation_.at(i); }
    const Channel& actuation(NodeId i) const { return actuation_.at(i); }

    /// Channel carrying neighbour j's data to the controller at i.
    Channel& communication(NodeId i, NodeId j);
    const Channel& communication(NodeId i, NodeId j) const;

    std::vector<Channel*> all();
    std::vector<const Channel*> all() const;

    Channel& find(const ChannelId& id);

    /// Draw every channel's sequence from its budget with a per-channel seed
    /// derived from (master, channel id).
    void generate(std::uint64_t master_seed, attacks::GeneratorOptions options = {});

    /// Verify every attacked channel over [0, horizon); returns the ids that
    /// fail together with the first violation text.
    std::vector<std::pair<std::string, std::string>> verify() const;

private:
    std::size_t comm_index(NodeId i, NodeId j) const;

    bool per_direction_ = false;
    double horizon_ = 0.0;
    std::vector<Channel> measurement_;
    std::vector<Channel> actuation_;
    std::vector<Channel> communication_;
    std::vector<Edge> comm_keys_;
};

/// Attack trace document: {"version":1,"horizon":..,"per_direction":..,
/// "channels":[{"id":..,"params":{..}|null,"intervals":[[s,e],..]},..]}.
nlohmann::json to_json(const ChannelSet& set);

/// Rebuilds a channel set for `topology` from a trace document. Every
/// channel the topology references must be present exactly once.
ChannelSet channel_set_from_json(const nlohmann::json& doc, const Topology& topology);

nlohmann::json params_to_json(const attacks::DosParams& p);
attacks::DosParams params_from_json(const nlohmann::json& j);

void write_attack_trace(const std::filesystem::path& path, const ChannelSet& set);
ChannelSet read_attack_trace(const std::filesystem::path& path, const Topology& topology);

}  // namespace mgcc
