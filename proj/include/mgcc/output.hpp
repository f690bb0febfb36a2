#pragma once

#include "mgcc/engine.hpp"
#include "mgcc/scenario.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace mgcc::output {

/// printf "%.17g": round-trips every double and is byte-stable.
std::string format_number(double value);

/// Columns: t, x_0..x_{n-1}, ustar_0..ustar_{n-1}, V, max_disagreement.
void write_trace_csv(std::ostream& out, const engine::RunResult& result, std::size_t n);

/// Columns: t, node, neighbour, status, D, u, theta, eps, rate, V.
void write_triggers_csv(std::ostream& out, const engine::RunResult& result);

/// Columns: k, node, neighbour, t_trigger, t_actuated, t_ii, t_ij, t_i0,
/// gamma, eps, rate, vartheta, u_scaled.
void write_adaptation_csv(std::ostream& out, const engine::RunResult& result);

/// Runs every instance of a plan in declaration order.
std::vector<engine::RunResult> run_plan(const scenario::Plan& plan);

/// Per-instance metrics, consensus segments, edge and channel counters, and
/// for microgrid instances the objectives and per-generator power shares.
nlohmann::json instance_summary(const scenario::Scenario& scenario, const scenario::Plan& plan,
                                std::size_t instance, const engine::RunResult& result);

nlohmann::json run_summary(const scenario::Scenario& scenario, const scenario::Plan& plan,
                           const std::vector<engine::RunResult>& results);

/// Writes attacks.json, certificate.json, summary.json and one directory
/// per instance holding trace.csv, triggers.csv and adaptation.csv.
void write_run(const std::filesystem::path& dir, const scenario::Scenario& scenario,
               const scenario::Plan& plan, const std::vector<engine::RunResult>& results);

/// Pretty-printed JSON followed by a newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace mgcc::output
