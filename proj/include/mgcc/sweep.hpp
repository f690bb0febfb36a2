#pragma once

#include "mgcc/scenario.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace mgcc::sweep {

/// One attack-intensity setting; an empty `soften` map is the baseline.
struct Variant {
    std::string label;
    std::map<scenario::ChannelClass, double> soften;
};

/// Parses "baseline" or "<class>=<factor>[,<class>=<factor>...]".
Variant parse_variant(const std::string& text);

struct SweepOptions {
    std::vector<std::uint64_t> seeds;
    std::vector<Variant> variants;  // the first entry is the reference
    std::optional<design::Mode> mode;
    // Keep the uniform design of the reference variant for every variant, so
    // only the attacks differ. Self-adaptive runs need no freezing; local
    // designs cannot be frozen.
    bool freeze_design = true;
    unsigned threads = 0;  // 0 picks the hardware concurrency
};

struct Cell {
    std::size_t variant = 0;
    std::uint64_t seed = 0;
    std::string instance;
    bool converged = false;
    // Time from activation into the consensus set; unconverged runs are
    // censored at horizon - activation.
    double convergence_time = 0.0;
    double final_disagreement = 0.0;
};

struct VariantSummary {
    std::string label;
    std::string instance;
    std::size_t runs = 0;
    std::size_t converged = 0;
    double median_convergence_time = 0.0;
    double improvement = 0.0;  // reference median minus this median
};

struct SweepResult {
    std::string scenario;
    std::optional<double> eps;
    std::optional<double> rate;
    std::vector<std::string> variants;  // labels, in option order
    std::vector<Cell> cells;  // variant-major, then seed, then instance
    std::vector<VariantSummary> summaries;
};

/// Runs every (variant, seed) pair on worker threads; each job owns its
/// engines and writes into its own slot, so the result does not depend on
/// the thread count.
SweepResult run_sweep(const scenario::Scenario& scenario, const SweepOptions& options);

double median(std::vector<double> values);

nlohmann::json to_json(const SweepResult& result);

/// Columns: variant, seed, instance, converged, convergence_time,
/// final_disagreement.
void write_cells_csv(std::ostream& out, const SweepResult& result);

}  // namespace mgcc::sweep
