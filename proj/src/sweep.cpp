#include "mgcc/sweep.hpp"

#include "mgcc/error.hpp"
#include "mgcc/output.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace mgcc::sweep {

Variant parse_variant(const std::string& text)
{
    Variant v;
    v.label = text;
    if (text == "baseline") {
        return v;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw Error(Errc::Config, "variant '" + text + "' needs <class>=<factor>");
        }
        const scenario::ChannelClass c = scenario::channel_class_from_string(item.substr(0, eq));
        double factor = 0.0;
        try {
            std::size_t used = 0;
            factor = std::stod(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) {
                throw std::invalid_argument("trailing");
            }
        } catch (const std::exception&) {
            throw Error(Errc::Config, "variant '" + text + "' has a bad factor");
        }
        if (!(factor > 0.0)) {
            throw Error(Errc::Config, "variant '" + text + "' needs a positive factor");
        }
        v.soften[c] = factor;
    }
    if (v.soften.empty()) {
        throw Error(Errc::Config, "variant '" + text + "' is empty");
    }
    return v;
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

SweepResult run_sweep(const scenario::Scenario& s, const SweepOptions& options)
{
    if (options.seeds.empty() || options.variants.empty()) {
        throw Error(Errc::Config, "sweep needs at least one seed and one variant");
    }
    SweepResult result;
    result.scenario = s.name;
    for (const Variant& v : options.variants) {
        result.variants.push_back(v.label);
    }

    scenario::Overrides base;
    base.mode = options.mode;
    base.log = false;
    const design::Mode mode = options.mode.value_or(s.design.mode);
    // Self-adaptive designs do not depend on the budgets, so there is
    // nothing to freeze.
    if (options.freeze_design && mode != design::Mode::SelfAdaptive) {
        if (mode == design::Mode::Local) {
            throw Error(Errc::Config,
                        "freezing the design needs a uniform mode; pass --redesign for "
                        "resilient-local");
        }
        scenario::Overrides ref = base;
        ref.soften = options.variants.front().soften;
        const auto [channels, cert] = scenario::design_only(s, ref);
        result.eps = cert.eps;
        result.rate = cert.rate;
        base.eps = cert.eps;
        base.rate = cert.rate;
    }

    const std::size_t instances = s.instances.size();
    const std::size_t jobs = options.variants.size() * options.seeds.size();
    result.cells.resize(jobs * instances);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            const std::size_t vi = job / options.seeds.size();
            const std::uint64_t seed = options.seeds[job % options.seeds.size()];
            try {
                scenario::Overrides o = base;
                o.seed = seed;
                o.soften = options.variants[vi].soften;
                const scenario::Plan plan = scenario::prepare(s, o);
                for (std::size_t k = 0; k < instances; ++k) {
                    const engine::RunResult r = engine::run(plan.instances[k].config);
                    Cell& c = result.cells[job * instances + k];
                    c.variant = vi;
                    c.seed = seed;
                    c.instance = plan.instances[k].spec.name;
                    c.converged = r.metrics.converged;
                    c.convergence_time =
                        r.metrics.convergence_time.value_or(s.horizon - s.activation_time);
                    c.final_disagreement = r.metrics.final_disagreement;
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };

    unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(jobs));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (std::size_t k = 0; k < instances; ++k) {
        double reference = 0.0;
        for (std::size_t vi = 0; vi < options.variants.size(); ++vi) {
            VariantSummary vs;
            vs.label = options.variants[vi].label;
            vs.instance = s.instances[k].name;
            std::vector<double> times;
            for (const Cell& c : result.cells) {
                if (c.variant == vi && c.instance == vs.instance) {
                    times.push_back(c.convergence_time);
                    ++vs.runs;
                    vs.converged += c.converged ? 1 : 0;
                }
            }
            vs.median_convergence_time = median(times);
            if (vi == 0) {
                reference = vs.median_convergence_time;
            }
            vs.improvement = reference - vs.median_convergence_time;
            result.summaries.push_back(std::move(vs));
        }
    }
    return result;
}

nlohmann::json to_json(const SweepResult& result)
{
    using nlohmann::json;
    json doc;
    doc["version"] = 1;
    doc["scenario"] = result.scenario;
    doc["frozen_eps"] = result.eps ? json(*result.eps) : json(nullptr);
    doc["frozen_rate"] = result.rate ? json(*result.rate) : json(nullptr);
    json summaries = json::array();
    for (const VariantSummary& v : result.summaries) {
        summaries.push_back({{"variant", v.label},
                             {"instance", v.instance},
                             {"runs", v.runs},
                             {"converged", v.converged},
                             {"median_convergence_time", v.median_convergence_time},
                             {"improvement", v.improvement}});
    }
    doc["summaries"] = std::move(summaries);
    return doc;
}

void write_cells_csv(std::ostream& out, const SweepResult& result)
{
    out << "variant,seed,instance,converged,convergence_time,final_disagreement\n";
    for (const Cell& c : result.cells) {
        out << '"' << result.variants.at(c.variant) << "\"," << c.seed << ',' << c.instance << ','
            << (c.converged ? 1 : 0) << ',' << output::format_number(c.convergence_time) << ','
            << output::format_number(c.final_disagreement) << '\n';
    }
}

}  // namespace mgcc::sweep
