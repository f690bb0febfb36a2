#include "mgcc/design.hpp"

#include "mgcc/controller.hpp"
#include "mgcc/error.hpp"
#include "mgcc/state_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mgcc::design {

namespace {

void require_margins(double eps_margin, double rate_margin)
{
    if (!(eps_margin > 1.0) || !(rate_margin > 1.0)) {
        throw Error(Errc::InvalidArgument, "design margins must exceed 1");
    }
}

UniformDesign design_from_threshold(double threshold, double eps_margin, double rate_margin,
                                    double eps_floor)
{
    require_margins(eps_margin, rate_margin);
    UniformDesign d;
    d.threshold = threshold;
    d.eps = std::max(eps_floor, eps_margin * threshold);
    if (!(d.eps > 0.0)) {
        throw Error(Errc::InvalidArgument,
                    "attack-free design needs a positive eps floor to pick eps");
    }
    d.rate = rate_margin * d.eps / (2.0 * (d.eps - threshold));
    return d;
}

double phi_of(const Channel& c)
{
    return c.podf();
}

}  // namespace

UniformDesign global_design(double phi_i_max, double phi_i0_max, std::size_t d_max,
                            double eps_margin, double rate_margin, double eps_floor)
{
    if (phi_i_max < 0.0 || phi_i0_max < 0.0) {
        throw Error(Errc::InvalidArgument, "worst-case delays must be non-negative");
    }
    const double threshold = 2.0 * static_cast<double>(d_max) * (phi_i_max + 2.0 * phi_i0_max);
    return design_from_threshold(threshold, eps_margin, rate_margin, eps_floor);
}

UniformDesign local_design(double phi_i, double phi_j, double phi_i0, std::size_t d_i,
                           std::size_t d_j, double eps_margin, double rate_margin,
                           double eps_floor)
{
    if (phi_i < 0.0 || phi_j < 0.0 || phi_i0 < 0.0) {
        throw Error(Errc::InvalidArgument, "worst-case delays must be non-negative");
    }
    const double threshold = static_cast<double>(d_i) * (phi_i + 2.0 * phi_i0) +
                             static_cast<double>(d_j) * (phi_j + 2.0 * phi_i0);
    return design_from_threshold(threshold, eps_margin, rate_margin, eps_floor);
}

bool criterion_holds(double eps, double rate, double threshold) noexcept
{
    return eps > threshold && rate > eps / (2.0 * (eps - threshold));
}

double convergence_bound(double eps, double rate, std::size_t d_max, std::size_t d_min,
                         double phi_ij_max, double phi_i_max, double phi_i0_max, double v0)
{
    const double dmax = static_cast<double>(d_max);
    const double dmin = static_cast<double>(d_min);
    const double slack =
        eps * (1.0 - 1.0 / (2.0 * rate)) - 2.0 * dmax * (phi_i_max + 2.0 * phi_i0_max);
    const double denominator = eps * dmin * slack;
    if (!(denominator > 0.0)) {
        std::ostringstream os;
        os << "eps (1 - 1/(2R)) - 2 d_max (Phi_I + 2 Phi_I0) = " << slack << " is not positive";
        throw Error(Errc::CriterionViolated, os.str());
    }
    const double numerator =
        2.0 * eps * (dmax + dmin) + 8.0 * rate * dmax * dmin * (phi_ij_max + 2.0 * phi_i0_max);
    return numerator / denominator * v0;
}

ConsensusCheck consensus_set_check(std::span<const double> states, double eps)
{
    ConsensusCheck c;
    c.max_disagreement = max_disagreement(states);
    if (states.size() < 2) {
        c.inside = true;
        return c;
    }
    c.delta = eps * static_cast<double>(states.size() - 1);
    c.inside = c.max_disagreement < c.delta;
    return c;
}

const char* to_string(Mode mode) noexcept
{
    switch (mode) {
    case Mode::Nominal: return "nominal";
    case Mode::Global: return "resilient-global";
    case Mode::Local: return "resilient-local";
    case Mode::SelfAdaptive: return "self-adaptive";
    }
    return "?";
}

Mode mode_from_string(const std::string& text)
{
    for (const Mode m : {Mode::Nominal, Mode::Global, Mode::Local, Mode::SelfAdaptive}) {
        if (text == to_string(m)) {
            return m;
        }
    }
    throw Error(Errc::Config, "unknown controller mode '" + text +
                                  "' (nominal, resilient-global, resilient-local, self-adaptive)");
}

DesignCertificate certify(const Topology& topology, ChannelSet& channels,
                          const DesignOptions& options)
{
    if (!(options.eps_floor > 0.0)) {
        throw Error(Errc::InvalidArgument, "eps floor must be positive");
    }
    const std::size_t n = topology.node_count();
    const DegreeSummary deg = degrees(topology);

    DesignCertificate cert;
    cert.mode = options.mode;
    cert.eps_floor = options.eps_floor;

    cert.phi.measurement.resize(n);
    cert.phi.actuation.resize(n);
    for (NodeId i = 0; i < n; ++i) {
        cert.phi.measurement[i] = phi_of(channels.measurement(i));
        cert.phi.actuation[i] = phi_of(channels.actuation(i));
        cert.phi.i_max = std::max(cert.phi.i_max, cert.phi.measurement[i]);
        cert.phi.i0_max = std::max(cert.phi.i0_max, cert.phi.actuation[i]);
    }

    auto d_of = [&](NodeId i) { return topology.degree(i); };

    switch (options.mode) {
    case Mode::Nominal:
    case Mode::Global: {
        const double threshold =
            2.0 * static_cast<double>(deg.d_max) * cert.phi.i_plus_2i0();
        double eps = 0.0;
        double rate = 0.0;
        if (options.mode == Mode::Nominal) {
            if (!options.eps || !options.rate) {
                throw Error(Errc::Config, "nominal mode needs explicit eps and rate");
            }
            eps = *options.eps;
            rate = *options.rate;
        } else {
            const UniformDesign d =
                global_design(cert.phi.i_max, cert.phi.i0_max, deg.d_max, options.eps_margin,
                              options.rate_margin, options.eps_floor);
            eps = options.eps.value_or(d.eps);
            if (options.rate) {
                rate = *options.rate;
            } else if (eps > threshold) {
                rate = options.rate_margin * eps / (2.0 * (eps - threshold));
            } else {
                std::ostringstream os;
                os << "fixed eps " << eps << " is not above the threshold " << threshold
                   << " and no rate was given";
                throw Error(Errc::CriterionViolated, os.str());
            }
        }
        if (!(eps >= options.eps_floor) || !(rate > 0.0)) {
            throw Error(Errc::Config, "eps must be at least the floor and rate positive");
        }
        cert.eps = eps;
        cert.rate = rate;
        cert.threshold = threshold;
        cert.delta = eps * static_cast<double>(n - 1);
        for (const DirectedEdge& e : topology.directed_edges()) {
            EdgeParams p;
            p.i = e.node;
            p.j = e.neighbour;
            p.threshold = threshold;
            p.eps = eps;
            p.rate = rate;
            p.satisfied = criterion_holds(eps, rate, threshold);
            cert.edges.push_back(p);
        }
        break;
    }
    case Mode::Local: {
        double eps_max = 0.0;
        for (const DirectedEdge& e : topology.directed_edges()) {
            const UniformDesign d = local_design(
                cert.phi.measurement[e.node], cert.phi.measurement[e.neighbour],
                cert.phi.actuation[e.node], d_of(e.node), d_of(e.neighbour), options.eps_margin,
                options.rate_margin, options.eps_floor);
            EdgeParams p;
            p.i = e.node;
            p.j = e.neighbour;
            p.threshold = d.threshold;
            p.eps = d.eps;
            p.rate = d.rate;
            p.satisfied = criterion_holds(d.eps, d.rate, d.threshold);
            eps_max = std::max(eps_max, d.eps);
            cert.edges.push_back(p);
        }
        cert.delta = eps_max * static_cast<double>(n - 1);
        break;
    }
    case Mode::SelfAdaptive: {
        if (!(options.alpha > 1.0) || !(options.beta > 1.0)) {
            throw Error(Errc::Config, "self-adaptive margins alpha and beta must exceed 1");
        }
        cert.alpha = options.alpha;
        cert.beta = options.beta;
        cert.delta = options.eps_floor * static_cast<double>(n - 1);
        for (const DirectedEdge& e : topology.directed_edges()) {
            EdgeParams p;
            p.i = e.node;
            p.j = e.neighbour;
            p.eps = options.eps_floor;
            p.rate = options.beta / 2.0;
            p.satisfied = true;
            cert.edges.push_back(p);
        }
        break;
    }
    }

    // Shortest interval between two triggers of each edge; in self-adaptive
    // mode the adapted rate never exceeds beta alpha / (2 (alpha - 1)).
    const double rate_cap = options.mode == Mode::SelfAdaptive
                                ? options.beta * options.alpha / (2.0 * (options.alpha - 1.0))
                                : 0.0;
    for (EdgeParams& p : cert.edges) {
        const double rate = options.mode == Mode::SelfAdaptive ? rate_cap : p.rate;
        p.dwell = controller::dwell_time(p.eps, rate, d_of(p.i), d_of(p.j));
    }

    for (const EdgeParams& p : cert.edges) {
        Channel& c = channels.communication(p.i, p.j);
        if (c.params) {
            double dwell = p.dwell;
            if (!channels.per_direction()) {
                for (const EdgeParams& q : cert.edges) {
                    if (q.i == p.j && q.j == p.i) {
                        dwell = std::min(dwell, q.dwell);
                    }
                }
            }
            c.params->delta_star = dwell;
        }
    }
    for (const EdgeParams& p : cert.edges) {
        const double phi = phi_of(channels.communication(p.i, p.j));
        cert.phi.communication.push_back(phi);
        cert.phi.ij_max = std::max(cert.phi.ij_max, phi);
        if (cert.phi.measurement[p.i] > phi || cert.phi.actuation[p.i] > phi) {
            cert.channel_delays_ordered = false;
        }
    }

    cert.satisfied = std::all_of(cert.edges.begin(), cert.edges.end(),
                                 [](const EdgeParams& p) { return p.satisfied; });
    return cert;
}

InstanceBound instance_bound(const DesignCertificate& cert, const Topology& topology,
                             std::string name, std::span<const double> initial)
{
    InstanceBound b;
    b.name = std::move(name);
    b.v0 = lyapunov(initial);
    if (!cert.eps || !cert.rate || topology.node_count() < 2) {
        return b;
    }
    const DegreeSummary deg = degrees(topology);
    try {
        b.t_star = convergence_bound(*cert.eps, *cert.rate, deg.d_max, deg.d_min,
                                     cert.phi.ij_max, cert.phi.i_max, cert.phi.i0_max, b.v0);
    } catch (const Error& e) {
        if (e.code() != Errc::CriterionViolated) {
            throw;
        }
    }
    return b;
}

nlohmann::json to_json(const DesignCertificate& cert)
{
    using nlohmann::json;
    json edges = json::array();
    for (std::size_t k = 0; k < cert.edges.size(); ++k) {
        const EdgeParams& p = cert.edges[k];
        edges.push_back({{"edge", std::to_string(p.i) + ">" + std::to_string(p.j)},
                         {"threshold", p.threshold},
                         {"eps", p.eps},
                         {"rate", p.rate},
                         {"dwell", p.dwell},
                         {"phi_ij", k < cert.phi.communication.size()
                                        ? json(cert.phi.communication[k])
                                        : json()},
                         {"satisfied", p.satisfied}});
    }
    json instances = json::array();
    for (const InstanceBound& b : cert.instances) {
        instances.push_back(
            {{"name", b.name}, {"v0", b.v0}, {"t_star_bound", b.t_star ? json(*b.t_star) : json()}});
    }
    json doc = {
        {"mode", to_string(cert.mode)},
        {"eps_floor", cert.eps_floor},
        {"eps", cert.eps ? json(*cert.eps) : json()},
        {"rate", cert.rate ? json(*cert.rate) : json()},
        {"threshold", cert.threshold},
        {"delta", cert.delta},
        {"phi",
         {{"measurement", cert.phi.measurement},
          {"actuation", cert.phi.actuation},
          {"communication", cert.phi.communication},
          {"i_max", cert.phi.i_max},
          {"i0_max", cert.phi.i0_max},
          {"ij_max", cert.phi.ij_max},
          {"i_plus_2i0", cert.phi.i_plus_2i0()},
          {"ij_plus_2i0", cert.phi.ij_plus_2i0()}}},
        {"edges", std::move(edges)},
        {"channel_delays_ordered", cert.channel_delays_ordered},
        {"satisfied", cert.satisfied},
        {"instances", std::move(instances)},
    };
    if (cert.mode == Mode::SelfAdaptive) {
        doc["alpha"] = cert.alpha;
        doc["beta"] = cert.beta;
    }
    return doc;
}

}  // namespace mgcc::design
