#include "mgcc/scenario.hpp"

#include "mgcc/aggregation.hpp"
#include "mgcc/error.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace mgcc::scenario {

namespace {

using attacks::DosParams;

/// Schema reader that reports every problem with its file position.
class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& message,
                           Errc code = Errc::Config) const
    {
        throw Error(code, where(node) + message);
    }

    std::string where(const YAML::Node& node) const
    {
        std::ostringstream os;
        os << (origin_.empty() ? "<scenario>" : origin_);
        const YAML::Mark mark = node.Mark();
        if (mark.line >= 0) {
            os << ':' << mark.line + 1 << ':' << mark.column + 1;
        }
        os << ": ";
        return os.str();
    }

    void expect_map(const YAML::Node& node, const std::string& what) const
    {
        if (!node.IsMap()) {
            fail(node, what + " must be a mapping");
        }
    }

    void allow_keys(const YAML::Node& node, std::initializer_list<const char*> allowed,
                    const std::string& what) const
    {
        expect_map(node, what);
        for (const auto& kv : node) {
            const std::string key = kv.first.as<std::string>();
            if (std::none_of(allowed.begin(), allowed.end(),
                             [&](const char* a) { return key == a; })) {
                std::string list;
                for (const char* a : allowed) {
                    list += list.empty() ? "" : ", ";
                    list += a;
                }
                fail(kv.first, "unknown key '" + key + "' in " + what + " (allowed: " + list + ")");
            }
        }
    }

    YAML::Node require(const YAML::Node& map, const char* key, const std::string& what) const
    {
        const YAML::Node node = map[key];
        if (!node) {
            fail(map, what + " needs '" + key + "'");
        }
        return node;
    }

    double number(const YAML::Node& node, const std::string& what) const
    {
        if (!node.IsScalar()) {
            fail(node, what + " must be a number");
        }
        try {
            return node.as<double>();
        } catch (const YAML::Exception&) {
            fail(node, what + " must be a number, got '" + node.Scalar() + "'");
        }
    }

    std::optional<double> optional_number(const YAML::Node& map, const char* key,
                                          const std::string& what) const
    {
        const YAML::Node node = map[key];
        if (!node) {
            return std::nullopt;
        }
        return number(node, what + "." + key);
    }

    double number_or(const YAML::Node& map, const char* key, double fallback,
                     const std::string& what) const
    {
        return optional_number(map, key, what).value_or(fallback);
    }

    std::uint64_t unsigned_integer(const YAML::Node& node, const std::string& what) const
    {
        if (!node.IsScalar()) {
            fail(node, what + " must be a non-negative integer");
        }
        try {
            return node.as<std::uint64_t>();
        } catch (const YAML::Exception&) {
            fail(node, what + " must be a non-negative integer, got '" + node.Scalar() + "'");
        }
    }

    std::string text(const YAML::Node& node, const std::string& what) const
    {
        if (!node.IsScalar()) {
            fail(node, what + " must be a string");
        }
        return node.Scalar();
    }

    bool boolean(const YAML::Node& node, const std::string& what) const
    {
        try {
            return node.as<bool>();
        } catch (const YAML::Exception&) {
            fail(node, what + " must be true or false");
        }
    }

    std::vector<double> numbers(const YAML::Node& node, const std::string& what) const
    {
        if (!node.IsSequence()) {
            fail(node, what + " must be a list of numbers");
        }
        std::vector<double> out;
        for (std::size_t k = 0; k < node.size(); ++k) {
            out.push_back(number(node[k], what + "[" + std::to_string(k) + "]"));
        }
        return out;
    }

private:
    std::string origin_;
};

AttackSpec read_attack(const Reader& r, const YAML::Node& node, const std::string& what)
{
    r.allow_keys(node, {"eta", "kappa", "podf", "tau_f", "tau_d", "delta_star"}, what);
    AttackSpec a;
    a.eta = r.optional_number(node, "eta", what);
    a.kappa = r.optional_number(node, "kappa", what);
    a.podf = r.optional_number(node, "podf", what);
    a.tau_f = r.optional_number(node, "tau_f", what);
    a.tau_d = r.optional_number(node, "tau_d", what);
    a.delta_star = r.optional_number(node, "delta_star", what);
    if (a.kappa && a.podf) {
        r.fail(node, what + " gives both kappa and podf");
    }
    return a;
}

ChannelClassSpec read_class(const Reader& r, const YAML::Node& node, const std::string& what,
                            bool derived_period)
{
    ChannelClassSpec c;
    if (!node) {
        return c;
    }
    r.allow_keys(node, {"delta_star", "attacks", "overrides"}, what);
    if (const YAML::Node d = node["delta_star"]) {
        if (derived_period) {
            r.fail(d, what + ".delta_star is derived from the design and cannot be set");
        }
        c.delta_star = r.number(d, what + ".delta_star");
        if (!(c.delta_star > 0.0)) {
            r.fail(d, what + ".delta_star must be positive");
        }
    }
    if (const YAML::Node a = node["attacks"]) {
        if (!a.IsNull()) {
            c.attacks = read_attack(r, a, what + ".attacks");
        }
    }
    if (const YAML::Node o = node["overrides"]) {
        r.expect_map(o, what + ".overrides");
        for (const auto& kv : o) {
            const std::string key = kv.first.as<std::string>();
            if (kv.second.IsNull()) {
                c.overrides[key] = std::nullopt;
            } else {
                c.overrides[key] = read_attack(r, kv.second, what + ".overrides." + key);
            }
        }
    }
    return c;
}

std::vector<engine::Disturbance> read_disturbances(const Reader& r, const YAML::Node& node,
                                                   std::size_t n, const std::string& what)
{
    std::vector<engine::Disturbance> out;
    if (!node) {
        return out;
    }
    if (!node.IsSequence()) {
        r.fail(node, what + " must be a list");
    }
    for (std::size_t k = 0; k < node.size(); ++k) {
        const YAML::Node d = node[k];
        const std::string w = what + "[" + std::to_string(k) + "]";
        r.allow_keys(d, {"time", "node", "jump"}, w);
        engine::Disturbance dist;
        dist.time = r.number(r.require(d, "time", w), w + ".time");
        dist.node = r.unsigned_integer(r.require(d, "node", w), w + ".node");
        dist.jump = r.number(r.require(d, "jump", w), w + ".jump");
        if (dist.node >= n) {
            r.fail(d["node"], w + ".node is not a node of the topology");
        }
        if (dist.time < 0.0) {
            r.fail(d["time"], w + ".time must be non-negative");
        }
        out.push_back(dist);
    }
    return out;
}

MicrogridsSpec read_microgrids(const Reader& r, const YAML::Node& node, std::size_t n)
{
    const std::string what = "microgrids";
    r.allow_keys(node, {"droop_constant", "cutoff", "reference_hz", "groups", "load_steps"}, what);
    MicrogridsSpec m;
    m.droop_constant = r.number_or(node, "droop_constant", m.droop_constant, what);
    m.cutoff = r.number_or(node, "cutoff", m.cutoff, what);
    m.reference_hz = r.number_or(node, "reference_hz", m.reference_hz, what);
    if (!(m.droop_constant > 0.0) || !(m.cutoff > 0.0)) {
        r.fail(node, "microgrids.droop_constant and cutoff must be positive");
    }
    const YAML::Node groups = r.require(node, "groups", what);
    if (!groups.IsSequence() || groups.size() != n) {
        r.fail(groups, "microgrids.groups needs one entry per node (" + std::to_string(n) + ")");
    }
    for (std::size_t k = 0; k < groups.size(); ++k) {
        const YAML::Node g = groups[k];
        const std::string w = "microgrids.groups[" + std::to_string(k) + "]";
        r.allow_keys(g, {"load_kw", "ratings_kw"}, w);
        MicrogridSpec mg;
        mg.load_kw = r.number(r.require(g, "load_kw", w), w + ".load_kw");
        mg.ratings = r.numbers(r.require(g, "ratings_kw", w), w + ".ratings_kw");
        if (mg.ratings.empty()) {
            r.fail(g["ratings_kw"], w + " has no generators", Errc::EmptyMg);
        }
        for (const double rating : mg.ratings) {
            if (!(rating > 0.0)) {
                r.fail(g["ratings_kw"], w + ".ratings_kw entries must be positive");
            }
        }
        m.groups.push_back(std::move(mg));
    }
    if (const YAML::Node steps = node["load_steps"]) {
        if (!steps.IsSequence()) {
            r.fail(steps, "microgrids.load_steps must be a list");
        }
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const YAML::Node s = steps[k];
            const std::string w = "microgrids.load_steps[" + std::to_string(k) + "]";
            r.allow_keys(s, {"time", "mg", "delta_kw"}, w);
            LoadStep step;
            step.time = r.number(r.require(s, "time", w), w + ".time");
            step.mg = r.unsigned_integer(r.require(s, "mg", w), w + ".mg");
            step.delta_kw = r.number(r.require(s, "delta_kw", w), w + ".delta_kw");
            if (step.mg >= n) {
                r.fail(s["mg"], w + ".mg is not a microgrid of the topology");
            }
            m.load_steps.push_back(step);
        }
    }
    return m;
}

Scenario read(const YAML::Node& root, const Reader& r)
{
    r.allow_keys(root,
                 {"version", "name", "seed", "horizon", "activation_time", "record_period",
                  "topology", "controller", "channels", "microgrids", "instances"},
                 "scenario");
    Scenario s;
    const YAML::Node version = r.require(root, "version", "scenario");
    s.version = static_cast<int>(r.unsigned_integer(version, "version"));
    if (s.version != 1) {
        r.fail(version, "unsupported scenario version " + std::to_string(s.version));
    }
    if (root["name"]) {
        s.name = r.text(root["name"], "name");
    }
    if (root["seed"]) {
        s.seed = r.unsigned_integer(root["seed"], "seed");
    }
    s.horizon = r.number(r.require(root, "horizon", "scenario"), "horizon");
    s.activation_time = r.number_or(root, "activation_time", 0.0, "scenario");
    s.record_period = r.number_or(root, "record_period", 0.1, "scenario");
    if (!(s.horizon > s.activation_time) || s.activation_time < 0.0) {
        r.fail(root["horizon"], "horizon must exceed a non-negative activation_time");
    }
    if (!(s.record_period > 0.0)) {
        r.fail(root["record_period"], "record_period must be positive");
    }

    const YAML::Node topo = r.require(root, "topology", "scenario");
    r.allow_keys(topo, {"adjacency"}, "topology");
    const YAML::Node adjacency = r.require(topo, "adjacency", "topology");
    if (!adjacency.IsSequence()) {
        r.fail(adjacency, "topology.adjacency must be a list of rows");
    }
    std::vector<std::vector<double>> matrix;
    for (std::size_t k = 0; k < adjacency.size(); ++k) {
        matrix.push_back(r.numbers(adjacency[k], "topology.adjacency[" + std::to_string(k) + "]"));
    }
    try {
        s.topology = Topology::from_adjacency(matrix);
    } catch (const Error& e) {
        r.fail(adjacency, e.detail(), e.code());
    }
    const std::size_t n = s.topology.node_count();

    if (const YAML::Node c = root["controller"]) {
        r.allow_keys(c,
                     {"mode", "eps_floor", "eps", "rate", "eps_margin", "rate_margin", "alpha",
                      "beta"},
                     "controller");
        if (c["mode"]) {
            try {
                s.design.mode = design::mode_from_string(r.text(c["mode"], "controller.mode"));
            } catch (const Error& e) {
                r.fail(c["mode"], e.detail());
            }
        }
        s.design.eps_floor = r.number_or(c, "eps_floor", s.design.eps_floor, "controller");
        s.design.eps = r.optional_number(c, "eps", "controller");
        s.design.rate = r.optional_number(c, "rate", "controller");
        s.design.eps_margin = r.number_or(c, "eps_margin", s.design.eps_margin, "controller");
        s.design.rate_margin = r.number_or(c, "rate_margin", s.design.rate_margin, "controller");
        s.design.alpha = r.number_or(c, "alpha", s.design.alpha, "controller");
        s.design.beta = r.number_or(c, "beta", s.design.beta, "controller");
        if (!(s.design.eps_floor > 0.0)) {
            r.fail(c, "controller.eps_floor must be positive");
        }
        if (!(s.design.eps_margin > 1.0) || !(s.design.rate_margin > 1.0) ||
            !(s.design.alpha > 1.0) || !(s.design.beta > 1.0)) {
            r.fail(c, "controller margins (eps_margin, rate_margin, alpha, beta) must exceed 1");
        }
        if (s.design.mode == design::Mode::Nominal && (!s.design.eps || !s.design.rate)) {
            r.fail(c, "nominal mode needs controller.eps and controller.rate");
        }
    }

    if (const YAML::Node ch = root["channels"]) {
        r.allow_keys(ch,
                     {"per_direction_communication", "generator", "measurement", "actuation",
                      "communication", "trace"},
                     "channels");
        if (ch["per_direction_communication"]) {
            s.per_direction =
                r.boolean(ch["per_direction_communication"], "channels.per_direction_communication");
        }
        if (const YAML::Node g = ch["generator"]) {
            r.allow_keys(g, {"gap_scale", "length_scale"}, "channels.generator");
            s.generator.gap_scale =
                r.number_or(g, "gap_scale", s.generator.gap_scale, "channels.generator");
            s.generator.length_scale =
                r.number_or(g, "length_scale", s.generator.length_scale, "channels.generator");
        }
        s.measurement = read_class(r, ch["measurement"], "channels.measurement", false);
        s.actuation = read_class(r, ch["actuation"], "channels.actuation", false);
        s.communication = read_class(r, ch["communication"], "channels.communication", true);
        if (ch["trace"]) {
            s.trace = r.text(ch["trace"], "channels.trace");
        }
    }

    if (const YAML::Node m = root["microgrids"]) {
        s.microgrids = read_microgrids(r, m, n);
    }

    const YAML::Node instances = r.require(root, "instances", "scenario");
    if (!instances.IsSequence() || instances.size() == 0) {
        r.fail(instances, "instances must be a non-empty list");
    }
    std::set<std::string> names;
    for (std::size_t k = 0; k < instances.size(); ++k) {
        const YAML::Node in = instances[k];
        const std::string w = "instances[" + std::to_string(k) + "]";
        r.allow_keys(in, {"name", "from", "initial", "disturbances", "reference"}, w);
        InstanceSpec spec;
        spec.name = r.text(r.require(in, "name", w), w + ".name");
        if (spec.name.empty() || spec.name.find_first_of("/\\") != std::string::npos ||
            !names.insert(spec.name).second) {
            r.fail(in["name"], w + ".name must be unique and usable as a directory name");
        }
        if (in["from"] && in["initial"]) {
            r.fail(in, w + " gives both 'from' and 'initial'");
        }
        if (in["from"]) {
            const std::string from = r.text(in["from"], w + ".from");
            if (from == "frequency") {
                spec.source = InstanceSource::Frequency;
            } else if (from == "power") {
                spec.source = InstanceSource::Power;
            } else {
                r.fail(in["from"], w + ".from must be 'frequency' or 'power'");
            }
            if (!s.microgrids) {
                r.fail(in["from"], w + ".from needs a microgrids section");
            }
        } else {
            spec.initial = r.numbers(r.require(in, "initial", w), w + ".initial");
            if (spec.initial.size() != n) {
                r.fail(in["initial"], w + ".initial needs one value per node (" +
                                          std::to_string(n) + ")");
            }
        }
        spec.disturbances = read_disturbances(r, in["disturbances"], n, w + ".disturbances");
        spec.reference = r.optional_number(in, "reference", w);
        s.instances.push_back(std::move(spec));
    }
    return s;
}

// GCC 11 flags the optional payload copies below as maybe-uninitialized.
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
DosParams resolve(const AttackSpec& base, const std::optional<AttackSpec>& over,
                  double delta_star, const std::string& id)
{
    AttackSpec a = base;
    if (over) {
        auto take = [](std::optional<double>& dst, const std::optional<double>& src) {
            if (src) {
                dst = src;
            }
        };
        take(a.eta, over->eta);
        take(a.tau_f, over->tau_f);
        take(a.tau_d, over->tau_d);
        take(a.delta_star, over->delta_star);
        if (over->kappa) {
            a.kappa = over->kappa;
            a.podf.reset();
        }
        if (over->podf) {
            a.podf = over->podf;
            a.kappa.reset();
        }
    }
    if (!a.eta || !a.tau_f || !a.tau_d || (!a.kappa && !a.podf)) {
        throw Error(Errc::Config,
                    "channel " + id + ": attacks need eta, tau_f, tau_d and kappa or podf");
    }
    DosParams p;
    p.eta = *a.eta;
    p.tau_f = *a.tau_f;
    p.tau_d = *a.tau_d;
    p.delta_star = a.delta_star.value_or(delta_star);
    p.kappa = a.podf ? attacks::calibrate_kappa(p, a.podf.value_or(0.0)) : a.kappa.value_or(0.0);
    attacks::podf_bound(p);  // rejects infeasible budgets early
    return p;
}
#pragma GCC diagnostic pop

/// Budget of one channel after overrides, or nullopt when attack-free.
std::optional<DosParams> channel_params(const ChannelClassSpec& cls, const std::string& key,
                                        double delta_star, const std::string& id)
{
    const auto it = cls.overrides.find(key);
    if (it != cls.overrides.end()) {
        if (!it->second) {
            return std::nullopt;
        }
        if (!cls.attacks) {
            return resolve(AttackSpec{}, it->second, delta_star, id);
        }
        return resolve(*cls.attacks, it->second, delta_star, id);
    }
    if (!cls.attacks) {
        return std::nullopt;
    }
    return resolve(*cls.attacks, std::nullopt, delta_star, id);
}

double attempt_period(const ChannelClassSpec& cls, const std::string& key)
{
    const auto it = cls.overrides.find(key);
    if (it != cls.overrides.end() && it->second && it->second->delta_star) {
        return *it->second->delta_star;
    }
    if (cls.attacks && cls.attacks->delta_star) {
        return *cls.attacks->delta_star;
    }
    return cls.delta_star;
}

void check_override_keys(const Scenario& s)
{
    const std::size_t n = s.topology.node_count();
    for (const auto* cls : {&s.measurement, &s.actuation}) {
        for (const auto& [key, value] : cls->overrides) {
            bool ok = !key.empty() && std::all_of(key.begin(), key.end(), ::isdigit);
            if (ok && std::stoull(key) >= n) {
                ok = false;
            }
            if (!ok) {
                throw Error(Errc::Config, "override '" + key + "' does not name a node");
            }
        }
    }
    for (const auto& [key, value] : s.communication.overrides) {
        ChannelSet probe(s.topology, s.per_direction, s.horizon);
        try {
            probe.find(ChannelId::parse("comm:" + key));
        } catch (const Error&) {
            throw Error(Errc::Config, "override '" + key + "' does not name a communication channel");
        }
    }
}

ChannelSet budgets(const Scenario& s, const Overrides& o)
{
    check_override_keys(s);
    ChannelSet set(s.topology, s.per_direction, s.horizon);
    auto soften_class = [&](ChannelClass c, std::optional<DosParams>& p) {
        const auto it = o.soften.find(c);
        if (p && it != o.soften.end()) {
            p = attacks::soften(*p, it->second);
        }
    };
    for (NodeId i = 0; i < s.topology.node_count(); ++i) {
        const std::string key = std::to_string(i);
        Channel& m = set.measurement(i);
        m.params = channel_params(s.measurement, key, attempt_period(s.measurement, key),
                                  m.id.str());
        soften_class(ChannelClass::Measurement, m.params);
        Channel& a = set.actuation(i);
        a.params = channel_params(s.actuation, key, attempt_period(s.actuation, key), a.id.str());
        soften_class(ChannelClass::Actuation, a.params);
    }
    for (Channel* c : set.all()) {
        if (c->id.kind != ChannelKind::Communication) {
            continue;
        }
        const std::string key = c->id.str().substr(5);
        // Placeholder period; the design writes the real one back.
        if (s.communication.overrides.count(key) || s.communication.attacks) {
            AttackSpec base = s.communication.attacks.value_or(AttackSpec{});
            const auto it = s.communication.overrides.find(key);
            if (it != s.communication.overrides.end() && !it->second) {
                continue;
            }
            if ((it != s.communication.overrides.end() && it->second->podf) ||
                (it == s.communication.overrides.end() && base.podf)) {
                throw Error(Errc::Config, "channel " + c->id.str() +
                                              ": communication budgets take kappa, not podf");
            }
            c->params = resolve(base, it == s.communication.overrides.end()
                                          ? std::nullopt
                                          : it->second,
                                1e-9, c->id.str());
            soften_class(ChannelClass::Communication, c->params);
        }
    }
    return set;
}

design::DesignOptions design_options(const Scenario& s, const Overrides& o)
{
    design::DesignOptions d = s.design;
    if (o.eps) {
        d.eps = o.eps;
    }
    if (o.rate) {
        d.rate = o.rate;
    }
    if (o.mode || o.eps || o.rate) {
        d.mode = o.mode.value_or(d.mode);
        if (d.mode == design::Mode::Nominal && (!d.eps || !d.rate)) {
            throw Error(Errc::Config, "nominal mode needs controller.eps and controller.rate");
        }
    }
    return d;
}

std::vector<double> microgrid_states(const MicrogridsSpec& m, InstanceSource source)
{
    const std::vector<double> droops = m.droops();
    std::vector<double> x;
    for (std::size_t i = 0; i < m.groups.size(); ++i) {
        const double offset = droops[i] * m.groups[i].load_kw;
        x.push_back(source == InstanceSource::Power ? offset : m.reference_hz - offset);
    }
    return x;
}

}  // namespace

std::vector<double> MicrogridsSpec::droops() const
{
    std::vector<double> out;
    for (const MicrogridSpec& g : groups) {
        const auto dgs = aggregation::dgs_from_ratings(g.ratings, droop_constant, 0.0, cutoff);
        out.push_back(aggregation::aggregate(dgs).droop);
    }
    return out;
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& origin)
{
    const Reader r(origin.string());
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        std::ostringstream os;
        os << (origin.empty() ? "<scenario>" : origin.string()) << ':' << e.mark.line + 1 << ':'
           << e.mark.column + 1 << ": " << e.msg;
        throw Error(Errc::Config, os.str());
    }
    Scenario s = read(root, r);
    s.path = origin;
    if (s.trace && s.trace->is_relative() && !origin.empty()) {
        s.trace = origin.parent_path() / *s.trace;
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Io, "cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path);
}

ChannelClass channel_class_from_string(const std::string& text)
{
    if (text == "measurement") {
        return ChannelClass::Measurement;
    }
    if (text == "actuation") {
        return ChannelClass::Actuation;
    }
    if (text == "communication") {
        return ChannelClass::Communication;
    }
    throw Error(Errc::Config,
                "unknown channel class '" + text + "' (measurement, actuation, communication)");
}

std::pair<ChannelSet, design::DesignCertificate> design_only(const Scenario& s,
                                                             const Overrides& o)
{
    ChannelSet channels = budgets(s, o);
    design::DesignCertificate cert = design::certify(s.topology, channels, design_options(s, o));
    return {std::move(channels), std::move(cert)};
}

Plan prepare(const Scenario& s, const Overrides& o)
{
    Plan plan;
    plan.seed = o.seed.value_or(s.seed);
    const design::DesignOptions options = design_options(s, o);

    const std::optional<std::filesystem::path> trace = o.attacks ? o.attacks : s.trace;
    if (trace) {
        plan.channels = read_attack_trace(*trace, s.topology);
        if (plan.channels.horizon() < s.horizon) {
            throw Error(Errc::Config, "attack trace " + trace->string() +
                                          " ends before the scenario horizon");
        }
        plan.certificate = design::certify(s.topology, plan.channels, options);
    } else {
        auto [channels, cert] = design_only(s, o);
        plan.channels = std::move(channels);
        plan.certificate = std::move(cert);
        plan.channels.generate(plan.seed, s.generator);
    }

    const std::size_t n = s.topology.node_count();
    std::vector<double> meas_period(n);
    std::vector<double> act_period(n);
    for (NodeId i = 0; i < n; ++i) {
        const std::string key = std::to_string(i);
        const Channel& m = plan.channels.measurement(i);
        const Channel& a = plan.channels.actuation(i);
        meas_period[i] = m.params ? m.params->delta_star : attempt_period(s.measurement, key);
        act_period[i] = a.params ? a.params->delta_star : attempt_period(s.actuation, key);
    }

    for (const InstanceSpec& spec : s.instances) {
        InstancePlan ip;
        ip.spec = spec;
        if (spec.source != InstanceSource::Explicit) {
            const MicrogridsSpec& m = *s.microgrids;
            ip.spec.initial = microgrid_states(m, spec.source);
            if (!ip.spec.reference && spec.source == InstanceSource::Frequency) {
                ip.spec.reference = m.reference_hz;
            }
            const std::vector<double> droops = m.droops();
            for (const LoadStep& step : m.load_steps) {
                const double shift = droops[step.mg] * step.delta_kw;
                ip.spec.disturbances.push_back(
                    {step.time, step.mg, spec.source == InstanceSource::Power ? shift : -shift});
            }
        }

        engine::EngineConfig& c = ip.config;
        c.topology = s.topology;
        c.channels = plan.channels;
        c.mode = options.mode;
        for (const design::EdgeParams& p : plan.certificate.edges) {
            c.eps.push_back(p.eps);
            c.rate.push_back(p.rate);
        }
        c.eps_floor = options.eps_floor;
        c.alpha = options.alpha;
        c.beta = options.beta;
        c.phi_i0 = plan.certificate.phi.actuation;
        c.measurement_period = meas_period;
        c.actuation_period = act_period;
        c.initial = ip.spec.initial;
        c.disturbances = ip.spec.disturbances;
        c.activation_time = s.activation_time;
        c.horizon = s.horizon;
        c.record_period = s.record_period;
        c.delta = plan.certificate.delta;
        c.log_triggers = o.log;
        c.log_samples = o.log;

        plan.certificate.instances.push_back(
            design::instance_bound(plan.certificate, s.topology, spec.name, ip.spec.initial));
        plan.instances.push_back(std::move(ip));
    }
    return plan;
}

}  // namespace mgcc::scenario
