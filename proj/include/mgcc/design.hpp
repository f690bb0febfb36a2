#pragma once

#include "mgcc/channels.hpp"
#include "mgcc/topology.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace mgcc::design {

struct UniformDesign {
    double threshold = 0.0;  // 2 d_max (Phi_I + 2 Phi_I0)
    double eps = 0.0;
    double rate = 0.0;
};

/// eps = max(eps_floor, eps_margin * threshold),
/// rate = rate_margin * eps / (2 (eps - threshold)).
/// Both margins must exceed 1.
UniformDesign global_design(double phi_i_max, double phi_i0_max, std::size_t d_max,
                            double eps_margin = 2.0, double rate_margin = 1.01,
                            double eps_floor = 0.0);

/// Per directed edge (i, j); threshold d_i (Phi_i + 2 Phi_i0) + d_j (Phi_j + 2 Phi_i0).
UniformDesign local_design(double phi_i, double phi_j, double phi_i0, std::size_t d_i,
                           std::size_t d_j, double eps_margin = 2.0, double rate_margin = 1.01,
                           double eps_floor = 0.0);

/// True iff eps > threshold and rate > eps / (2 (eps - threshold)).
bool criterion_holds(double eps, double rate, double threshold) noexcept;

/// Upper bound on the time to reach the consensus set. Throws
/// CriterionViolated when eps (1 - 1/(2R)) <= 2 d_max (Phi_I + 2 Phi_I0).
double convergence_bound(double eps, double rate, std::size_t d_max, std::size_t d_min,
                         double phi_ij_max, double phi_i_max, double phi_i0_max, double v0);

struct ConsensusCheck {
    bool inside = false;
    double max_disagreement = 0.0;
    double delta = 0.0;  // eps (n - 1)
};

/// Whether every pairwise gap is below eps (n - 1). A single state is
/// trivially inside.
ConsensusCheck consensus_set_check(std::span<const double> states, double eps);

/// Worst-case delays of every channel and the maxima used by the criteria.
struct PhiSummary {
    std::vector<double> measurement;    // Phi_i
    std::vector<double> actuation;      // Phi_i0
    std::vector<double> communication;  // Phi_ij per directed edge
    double i_max = 0.0;
    double i0_max = 0.0;
    double ij_max = 0.0;

    double i_plus_2i0() const noexcept { return i_max + 2.0 * i0_max; }
    double ij_plus_2i0() const noexcept { return ij_max + 2.0 * i0_max; }
};

enum class Mode { Nominal, Global, Local, SelfAdaptive };

const char* to_string(Mode mode) noexcept;
Mode mode_from_string(const std::string& text);

struct DesignOptions {
    Mode mode = Mode::Global;
    double eps_floor = 0.01;
    std::optional<double> eps;   // fixed uniform eps instead of the designed one
    std::optional<double> rate;  // fixed uniform rate instead of the designed one
    double eps_margin = 2.0;
    double rate_margin = 1.01;
    double alpha = 1.5;
    double beta = 1.1;
};

struct EdgeParams {
    NodeId i = 0;
    NodeId j = 0;
    double threshold = 0.0;
    double eps = 0.0;
    double rate = 0.0;
    double dwell = 0.0;  // eps / (2 rate (d_i + d_j))
    bool satisfied = false;
};

struct InstanceBound {
    std::string name;
    double v0 = 0.0;
    std::optional<double> t_star;
};

struct DesignCertificate {
    Mode mode = Mode::Global;
    double eps_floor = 0.0;
    std::optional<double> eps;   // uniform modes
    std::optional<double> rate;  // uniform modes
    double threshold = 0.0;      // uniform criterion threshold
    std::vector<EdgeParams> edges;  // one per directed edge, topology order
    PhiSummary phi;
    double delta = 0.0;
    bool channel_delays_ordered = true;  // Phi_i <= Phi_ij and Phi_i0 <= Phi_ij on every edge
    bool satisfied = false;
    double alpha = 0.0;  // self-adaptive margins
    double beta = 0.0;
    std::vector<InstanceBound> instances;
};

/// Designs per-edge parameters for `options.mode` and certifies them.
/// Communication channels have their attempt period written back from the
/// designed dwell times before their worst-case delays are evaluated.
DesignCertificate certify(const Topology& topology, ChannelSet& channels,
                          const DesignOptions& options);

/// Fills the convergence-time bound for one instance (uniform modes only;
/// left empty when the criterion fails).
InstanceBound instance_bound(const DesignCertificate& cert, const Topology& topology,
                             std::string name, std::span<const double> initial);

nlohmann::json to_json(const DesignCertificate& cert);

}  // namespace mgcc::design
