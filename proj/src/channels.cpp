#include "mgcc/channels.hpp"

#include "mgcc/error.hpp"
#include "mgcc/random.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace mgcc {

using attacks::DosParams;
using attacks::DosSequence;
using attacks::Interval;

const char* to_string(ChannelKind kind) noexcept
{
    switch (kind) {
    case ChannelKind::Measurement: return "measurement";
    case ChannelKind::Actuation: return "actuation";
    case ChannelKind::Communication: return "communication";
    }
    return "?";
}

std::string ChannelId::str() const
{
    switch (kind) {
    case ChannelKind::Measurement: return "meas:" + std::to_string(a);
    case ChannelKind::Actuation: return "act:" + std::to_string(a);
    case ChannelKind::Communication:
        return "comm:" + std::to_string(a) + (directed ? ">" : "-") + std::to_string(b);
    }
    return {};
}

ChannelId ChannelId::parse(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw Error(Errc::Config, "malformed channel id '" + text + "'");
    }
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    auto number = [&](const std::string& digits) -> NodeId {
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
            throw Error(Errc::Config, "malformed channel id '" + text + "'");
        }
        return static_cast<NodeId>(std::stoull(digits));
    };
    ChannelId id;
    if (head == "meas" || head == "act") {
        id.kind = head == "meas" ? ChannelKind::Measurement : ChannelKind::Actuation;
        id.a = number(tail);
        id.b = id.a;
        return id;
    }
    if (head == "comm") {
        const auto sep = tail.find_first_of("->");
        if (sep == std::string::npos) {
            throw Error(Errc::Config, "malformed channel id '" + text + "'");
        }
        id.kind = ChannelKind::Communication;
        id.directed = tail[sep] == '>';
        id.a = number(tail.substr(0, sep));
        id.b = number(tail.substr(sep + 1));
        if (!id.directed && id.a > id.b) {
            std::swap(id.a, id.b);
        }
        return id;
    }
    throw Error(Errc::Config, "unknown channel kind in '" + text + "'");
}

double Channel::podf() const
{
    return params ? attacks::podf_bound(*params) : 0.0;
}

ChannelSet::ChannelSet(const Topology& topology, bool per_direction, double horizon)
    : per_direction_(per_direction), horizon_(horizon)
{
    const DosSequence none({}, horizon);
    for (NodeId i = 0; i < topology.node_count(); ++i) {
        measurement_.push_back({{ChannelKind::Measurement, i, i, false}, std::nullopt, none});
        actuation_.push_back({{ChannelKind::Actuation, i, i, false}, std::nullopt, none});
    }
    if (per_direction) {
        for (const DirectedEdge& d : topology.directed_edges()) {
            comm_keys_.push_back({d.node, d.neighbour});
            communication_.push_back(
                {{ChannelKind::Communication, d.node, d.neighbour, true}, std::nullopt, none});
        }
    } else {
        for (const Edge& e : topology.edges()) {
            comm_keys_.push_back(e);
            communication_.push_back(
                {{ChannelKind::Communication, e.a, e.b, false}, std::nullopt, none});
        }
    }
}

std::size_t ChannelSet::comm_index(NodeId i, NodeId j) const
{
    const Edge key = per_direction_ ? Edge{i, j} : Edge{std::min(i, j), std::max(i, j)};
    const auto it = std::find(comm_keys_.begin(), comm_keys_.end(), key);
    if (it == comm_keys_.end()) {
        throw Error(Errc::InvalidArgument, "no communication channel between " +
                                               std::to_string(i) + " and " + std::to_string(j));
    }
    return static_cast<std::size_t>(it - comm_keys_.begin());
}

Channel& ChannelSet::communication(NodeId i, NodeId j)
{
    return communication_[comm_index(i, j)];
}

const Channel& ChannelSet::communication(NodeId i, NodeId j) const
{
    return communication_[comm_index(i, j)];
}

std::vector<Channel*> ChannelSet::all()
{
    std::vector<Channel*> out;
    for (auto* group : {&measurement_, &actuation_, &communication_}) {
        for (Channel& c : *group) {
            out.push_back(&c);
        }
    }
    return out;
}

std::vector<const Channel*> ChannelSet::all() const
{
    std::vector<const Channel*> out;
    for (const auto* group : {&measurement_, &actuation_, &communication_}) {
        for (const Channel& c : *group) {
            out.push_back(&c);
        }
    }
    return out;
}

Channel& ChannelSet::find(const ChannelId& id)
{
    switch (id.kind) {
    case ChannelKind::Measurement:
        if (id.a < measurement_.size()) {
            return measurement_[id.a];
        }
        break;
    case ChannelKind::Actuation:
        if (id.a < actuation_.size()) {
            return actuation_[id.a];
        }
        break;
    case ChannelKind::Communication:
        if (id.directed != per_direction_) {
            throw Error(Errc::Config, "channel '" + id.str() +
                                          "' does not match the communication channel layout");
        }
        return communication(id.a, id.b);
    }
    throw Error(Errc::Config, "channel '" + id.str() + "' is not part of the topology");
}

void ChannelSet::generate(std::uint64_t master_seed, attacks::GeneratorOptions options)
{
    for (Channel* c : all()) {
        if (c->params) {
            c->sequence = attacks::generate_sequence(*c->params, horizon_,
                                                     derive_seed(master_seed, c->id.str()), options);
        } else {
            c->sequence = DosSequence({}, horizon_);
        }
    }
}

std::vector<std::pair<std::string, std::string>> ChannelSet::verify() const
{
    std::vector<std::pair<std::string, std::string>> failures;
    for (const Channel* c : all()) {
        if (!c->params) {
            if (!c->sequence.empty()) {
                failures.emplace_back(c->id.str(), "attack windows on a channel with no budget");
            }
            continue;
        }
        const auto report = attacks::verify_sequence(c->sequence, *c->params);
        if (!report.passed()) {
            const auto& v = report.frequency ? *report.frequency : *report.duration;
            failures.emplace_back(c->id.str(), v.describe());
        }
    }
    return failures;
}

nlohmann::json params_to_json(const DosParams& p)
{
    return {{"eta", p.eta},
            {"kappa", p.kappa},
            {"tau_f", p.tau_f},
            {"tau_d", p.tau_d},
            {"delta_star", p.delta_star}};
}

DosParams params_from_json(const nlohmann::json& j)
{
    static const std::set<std::string> known{"eta", "kappa", "tau_f", "tau_d", "delta_star"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw Error(Errc::Config, "unknown DoS parameter '" + key + "'");
        }
    }
    DosParams p;
    p.eta = j.at("eta").get<double>();
    p.kappa = j.at("kappa").get<double>();
    p.tau_f = j.at("tau_f").get<double>();
    p.tau_d = j.at("tau_d").get<double>();
    p.delta_star = j.at("delta_star").get<double>();
    return p;
}

nlohmann::json to_json(const ChannelSet& set)
{
    nlohmann::json channels = nlohmann::json::array();
    for (const Channel* c : set.all()) {
        nlohmann::json intervals = nlohmann::json::array();
        for (const Interval& iv : c->sequence.intervals()) {
            intervals.push_back({iv.start, iv.end});
        }
        channels.push_back({{"id", c->id.str()},
                            {"params", c->params ? params_to_json(*c->params) : nlohmann::json()},
                            {"intervals", std::move(intervals)}});
    }
    return {{"version", 1},
            {"horizon", set.horizon()},
            {"per_direction", set.per_direction()},
            {"channels", std::move(channels)}};
}

ChannelSet channel_set_from_json(const nlohmann::json& doc, const Topology& topology)
{
    try {
        if (doc.at("version").get<int>() != 1) {
            throw Error(Errc::Config, "unsupported attack trace version");
        }
        const double horizon = doc.at("horizon").get<double>();
        ChannelSet set(topology, doc.value("per_direction", false), horizon);
        std::set<std::string> seen;
        for (const auto& entry : doc.at("channels")) {
            const std::string id_text = entry.at("id").get<std::string>();
            Channel& c = set.find(ChannelId::parse(id_text));
            if (!seen.insert(c.id.str()).second) {
                throw Error(Errc::Config, "channel '" + id_text + "' listed twice");
            }
            const auto& params = entry.at("params");
            if (!params.is_null()) {
                c.params = params_from_json(params);
            }
            std::vector<Interval> intervals;
            for (const auto& pair : entry.at("intervals")) {
                if (!pair.is_array() || pair.size() != 2) {
                    throw Error(Errc::Config, "channel '" + id_text +
                                                  "': intervals must be [start, end] pairs");
                }
                intervals.push_back({pair[0].get<double>(), pair[1].get<double>()});
            }
            c.sequence = DosSequence(std::move(intervals), horizon);
        }
        if (seen.size() != set.all().size()) {
            throw Error(Errc::Config, "attack trace lists " + std::to_string(seen.size()) +
                                          " channels, topology needs " +
                                          std::to_string(set.all().size()));
        }
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Config, std::string("attack trace: ") + e.what());
    }
}

void write_attack_trace(const std::filesystem::path& path, const ChannelSet& set)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(Errc::Io, "cannot write " + path.string());
    }
    out << to_json(set).dump(2) << '\n';
}

ChannelSet read_attack_trace(const std::filesystem::path& path, const Topology& topology)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Io, "cannot read " + path.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::Config, path.string() + ": " + e.what());
    }
    return channel_set_from_json(doc, topology);
}

}  // namespace mgcc
