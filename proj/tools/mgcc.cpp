// Command-line front end: run, design, attacks generate|verify, sweep.
// Exit status: 0 success, 1 verification failure, 2 configuration or input error.

#include "mgcc/channels.hpp"
#include "mgcc/design.hpp"
#include "mgcc/error.hpp"
#include "mgcc/output.hpp"
#include "mgcc/scenario.hpp"
#include "mgcc/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace mgcc;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;

scenario::Overrides overrides_from(const std::optional<std::uint64_t>& seed,
                                   const std::string& mode, const std::string& attacks)
{
    scenario::Overrides o;
    o.seed = seed;
    if (!mode.empty()) {
        o.mode = design::mode_from_string(mode);
    }
    if (!attacks.empty()) {
        o.attacks = fs::path(attacks);
    }
    return o;
}

int cmd_run(const std::string& path, const std::string& out, std::optional<std::uint64_t> seed,
            const std::string& mode, const std::string& attacks)
{
    const scenario::Scenario s = scenario::load_scenario(path);
    const scenario::Plan plan = scenario::prepare(s, overrides_from(seed, mode, attacks));
    const std::vector<engine::RunResult> results = output::run_plan(plan);
    output::write_run(out, s, plan, results);
    for (std::size_t k = 0; k < results.size(); ++k) {
        const engine::RunMetrics& m = results[k].metrics;
        std::cout << plan.instances[k].spec.name << ": converged=" << (m.converged ? "true" : "false")
                  << " convergence_time="
                  << (m.convergence_time ? output::format_number(*m.convergence_time) : "none")
                  << " final_disagreement=" << output::format_number(m.final_disagreement)
                  << '\n';
    }
    std::cout << "wrote " << out << '\n';
    return kOk;
}

int cmd_design(const std::string& path, std::string out, const std::string& mode)
{
    const scenario::Scenario s = scenario::load_scenario(path);
    // The plan also fills the per-instance bounds; drawing sequences does not
    // change the design.
    const scenario::Plan plan = scenario::prepare(s, overrides_from(std::nullopt, mode, ""));
    const design::DesignCertificate& cert = plan.certificate;
    if (out.empty()) {
        const fs::path p(path);
        out = (p.parent_path() / (p.stem().string() + ".certificate.json")).string();
    }
    output::write_json(out, design::to_json(cert));
    std::cout << "mode=" << design::to_string(cert.mode)
              << " satisfied=" << (cert.satisfied ? "true" : "false");
    if (cert.eps) {
        std::cout << " eps=" << output::format_number(*cert.eps);
    }
    if (cert.rate) {
        std::cout << " rate=" << output::format_number(*cert.rate);
    }
    std::cout << " threshold=" << output::format_number(cert.threshold)
              << " delta=" << output::format_number(cert.delta) << "\nwrote " << out << '\n';
    return kOk;
}

int cmd_generate(const std::string& path, const std::string& out,
                 std::optional<std::uint64_t> seed)
{
    const scenario::Scenario s = scenario::load_scenario(path);
    scenario::Overrides o;
    o.seed = seed;
    const scenario::Plan plan = scenario::prepare(s, o);
    write_attack_trace(out, plan.channels);
    std::cout << "wrote " << out << " (seed " << plan.seed << ")\n";
    return kOk;
}

/// Checks every attacked channel of a trace file against its own budget.
int cmd_verify(const std::string& path, const std::string& scenario_path)
{
    bool ok = true;
    if (!scenario_path.empty()) {
        const scenario::Scenario s = scenario::load_scenario(scenario_path);
        const ChannelSet set = read_attack_trace(path, s.topology);
        for (const auto& [id, why] : set.verify()) {
            std::cout << "FAIL " << id << ": " << why << '\n';
            ok = false;
        }
        std::cout << (ok ? "PASS" : "FAIL") << ' ' << path << '\n';
        return ok ? kOk : kVerifyFailed;
    }

    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Io, "cannot read " + path);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
        if (doc.at("version").get<int>() != 1) {
            throw Error(Errc::Config, path + ": unsupported attack trace version");
        }
        const double horizon = doc.at("horizon").get<double>();
        for (const auto& ch : doc.at("channels")) {
            const std::string id = ch.at("id").get<std::string>();
            std::vector<attacks::Interval> windows;
            for (const auto& iv : ch.at("intervals")) {
                windows.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
            }
            const attacks::DosSequence seq(std::move(windows), horizon);
            if (ch.at("params").is_null()) {
                if (!seq.empty()) {
                    std::cout << "FAIL " << id << ": attack windows without a budget\n";
                    ok = false;
                }
                continue;
            }
            const attacks::DosParams p = params_from_json(ch.at("params"));
            const attacks::VerifyReport r = attacks::verify_sequence(seq, p);
            if (!r.passed()) {
                ok = false;
                const auto& v = r.frequency ? r.frequency : r.duration;
                std::cout << "FAIL " << id << ": " << (v ? v->describe() : "budget exceeded")
                          << '\n';
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Config, path + ": " + e.what());
    }
    std::cout << (ok ? "PASS" : "FAIL") << ' ' << path << '\n';
    return ok ? kOk : kVerifyFailed;
}

int cmd_sweep(const std::string& path, const std::string& out, std::size_t seeds,
              std::uint64_t first_seed, const std::vector<std::string>& variants,
              const std::string& mode, unsigned threads, bool adapt_design)
{
    const scenario::Scenario s = scenario::load_scenario(path);
    sweep::SweepOptions options;
    for (std::size_t k = 0; k < seeds; ++k) {
        options.seeds.push_back(first_seed + k);
    }
    options.variants.push_back(sweep::parse_variant("baseline"));
    for (const std::string& v : variants) {
        if (v != "baseline") {
            options.variants.push_back(sweep::parse_variant(v));
        }
    }
    if (!mode.empty()) {
        options.mode = design::mode_from_string(mode);
    }
    options.threads = threads;
    options.freeze_design = !adapt_design;
    const sweep::SweepResult result = sweep::run_sweep(s, options);

    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw Error(Errc::Io, "cannot create " + out + ": " + ec.message());
    }
    output::write_json(fs::path(out) / "sweep.json", sweep::to_json(result));
    std::ofstream csv(fs::path(out) / "sweep.csv", std::ios::binary | std::ios::trunc);
    if (!csv) {
        throw Error(Errc::Io, "cannot write " + (fs::path(out) / "sweep.csv").string());
    }
    sweep::write_cells_csv(csv, result);
    for (const sweep::VariantSummary& v : result.summaries) {
        std::cout << v.instance << " [" << v.label << "] median="
                  << output::format_number(v.median_convergence_time)
                  << " improvement=" << output::format_number(v.improvement)
                  << " converged=" << v.converged << '/' << v.runs << '\n';
    }
    std::cout << "wrote " << out << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Resilient secondary control of networked microgrids under DoS"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out;
    std::string mode;
    std::string attacks_path;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "simulate every instance of a scenario");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("-o,--out", out, "output directory")->required();
    run->add_option("--seed", seed, "override the master seed");
    run->add_option("--mode", mode, "nominal|resilient-global|resilient-local|self-adaptive");
    run->add_option("--attacks", attacks_path, "replay attack windows from this trace");

    auto* des = app.add_subcommand("design", "certify controller parameters");
    des->add_option("scenario", scenario_path, "scenario file")->required();
    des->add_option("-o,--out", out, "certificate path (default <scenario>.certificate.json)");
    des->add_option("--mode", mode, "override the controller mode");

    auto* atk = app.add_subcommand("attacks", "generate or verify attack traces");
    atk->require_subcommand(1);
    auto* gen = atk->add_subcommand("generate", "draw attack windows for a scenario");
    gen->add_option("scenario", scenario_path, "scenario file")->required();
    gen->add_option("-o,--out", out, "trace path")->required();
    gen->add_option("--seed", seed, "override the master seed");
    std::string trace_path;
    auto* ver = atk->add_subcommand("verify", "check a trace against its budgets");
    ver->add_option("trace", trace_path, "trace file")->required();
    ver->add_option("--scenario", scenario_path, "also check it covers this scenario");

    std::size_t seeds = 50;
    std::uint64_t first_seed = 1;
    std::vector<std::string> variants;
    unsigned threads = 0;
    bool adapt_design = false;
    auto* swp = app.add_subcommand("sweep", "median convergence time over seeds and attack levels");
    swp->add_option("scenario", scenario_path, "scenario file")->required();
    swp->add_option("-o,--out", out, "output directory")->required();
    swp->add_option("--seeds", seeds, "number of seeds")->check(CLI::PositiveNumber);
    swp->add_option("--first-seed", first_seed, "first seed");
    swp->add_option("--variant", variants,
                    "<class>=<factor>[,...] softening, repeatable "
                    "(default measurement=2, actuation=2, communication=2)");
    swp->add_option("--mode", mode, "override the controller mode");
    swp->add_option("--threads", threads, "worker threads (0 = all cores)");
    swp->add_flag("--redesign", adapt_design, "redesign for every variant instead of freezing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (run->parsed()) {
            return cmd_run(scenario_path, out, seed, mode, attacks_path);
        }
        if (des->parsed()) {
            return cmd_design(scenario_path, out, mode);
        }
        if (gen->parsed()) {
            return cmd_generate(scenario_path, out, seed);
        }
        if (ver->parsed()) {
            return cmd_verify(trace_path, scenario_path);
        }
        if (swp->parsed()) {
            if (variants.empty()) {
                variants = {"measurement=2", "actuation=2", "communication=2"};
            }
            return cmd_sweep(scenario_path, out, seeds, first_seed, variants, mode, threads,
                             adapt_design);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kConfigError;
}
