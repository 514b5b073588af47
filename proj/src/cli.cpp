#include "billiard/cli.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "billiard/errors.hpp"

namespace billiard {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kBootstrapPurpose = 1;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Shortest form for human-facing listings.
std::string brief(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    f << contents;
    f.close();
    if (!f) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

struct LoadedScenario {
    std::string label;
    ScenarioConfig config;
};

LoadedScenario load_scenario(const std::string& name_or_path) {
    if (parse_builtin_name(name_or_path)) {
        return {name_or_path, builtin_scenario(name_or_path)};
    }
    const fs::path path(name_or_path);
    if (path.extension() == ".json" || fs::exists(path)) {
        return {path.stem().string(), load_config_file(path)};
    }
    throw ConfigError("unknown scenario '" + name_or_path + "'");
}

void check_options(const RunOptions& o) {
    if (o.n < 1) {
        throw ContractError("--n must be at least 1");
    }
    if (o.checkpoints < 1) {
        throw ContractError("--checkpoints must be at least 1");
    }
    if (o.bootstrap < 100) {
        throw ContractError("--bootstrap must be at least 100");
    }
    if (!(o.ci_level > 0.0 && o.ci_level < 1.0)) {
        throw ContractError("--ci-level must lie in (0, 1)");
    }
}

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ContractError("output directory '" + dir.string() + "' is not writable");
    }
}

struct ScenarioRun {
    ConvergenceTrace trace;
    CorrelationReport report;
};

ScenarioRun run_one(const ScenarioConfig& config, const RunOptions& o) {
    const auto checkpoints = make_checkpoints(o.n, o.checkpoints, o.spacing);
    const auto result = run_ensemble(config, o.n, o.seed, checkpoints, o.workers);
    ScenarioRun run;
    run.trace = convergence_trace(result.outcomes, checkpoints);
    run.report = correlation_report(result.outcomes, o.bootstrap, o.ci_level,
                                    derive_seed(o.seed, kBootstrapPurpose));
    return run;
}

void print_report(std::ostream& out, const std::string& label, const CorrelationReport& r) {
    out << label << ": N=" << r.n << " P(E1)=" << num(r.p1) << " P(E2)=" << num(r.p2)
        << " P(E1,E2)=" << num(r.p12) << " P(E1)P(E2)=" << num(r.product) << "\n"
        << "  delta=" << num(r.delta) << " +/- " << num(r.ci_halfwidth) << " (" << num(r.ci_level)
        << " bootstrap CI) " << (r.significant ? "significant" : "not significant") << "\n";
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const TrialError& e) {
        err << "simulation error: " << e.what() << "\n"
            << "replay with trial_index=" << e.trial_index() << " seed=" << e.master_seed() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace

std::string format_trace_csv(const ConvergenceTrace& trace) {
    std::string s = "n,p1,p2,p12,p1p2\n";
    for (const auto& r : trace.rows) {
        s += std::to_string(r.n) + "," + num(r.p1) + "," + num(r.p2) + "," + num(r.p12) + "," +
             num(r.product) + "\n";
    }
    return s;
}

void write_trace_csv(const ConvergenceTrace& trace, const fs::path& path) {
    write_file(path, format_trace_csv(trace));
}

std::string format_report_csv(const std::vector<LabelledReport>& rows) {
    std::string s = "scenario,n,p1,p2,p12,p1p2,delta,ci_halfwidth,ci_level,significant\n";
    for (const auto& [label, r] : rows) {
        s += label + "," + std::to_string(r.n) + "," + num(r.p1) + "," + num(r.p2) + "," +
             num(r.p12) + "," + num(r.product) + "," + num(r.delta) + "," + num(r.ci_halfwidth) +
             "," + num(r.ci_level) + "," + (r.significant ? "true" : "false") + "\n";
    }
    return s;
}

void write_report_csv(const std::vector<LabelledReport>& rows, const fs::path& path) {
    write_file(path, format_report_csv(rows));
}

int cmd_run(const RunRequest& request, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_options(request.options);
        if (request.config && !request.scenario.empty()) {
            throw ContractError("use either --scenario or --config, not both");
        }
        LoadedScenario sc;
        if (request.config) {
            sc = {request.config->stem().string(), load_config_file(*request.config)};
        } else {
            const std::string name = request.scenario.empty() ? "basic" : request.scenario;
            sc = {name, builtin_scenario(name)};
        }
        prepare_out_dir(request.options.out_dir);

        const auto run = run_one(sc.config, request.options);
        write_trace_csv(run.trace, request.options.out_dir / "trace.csv");
        write_report_csv({{sc.label, run.report}}, request.options.out_dir / "report.csv");
        print_report(out, sc.label, run.report);
        return static_cast<int>(kExitOk);
    });
}

int cmd_compare(const CompareRequest& request, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (request.scenarios.size() < 2) {
            throw ContractError("compare needs at least two scenarios");
        }
        check_options(request.options);
        std::vector<LoadedScenario> scenarios;
        for (const auto& s : request.scenarios) {
            scenarios.push_back(load_scenario(s));
        }
        prepare_out_dir(request.options.out_dir);

        std::vector<LabelledReport> rows;
        for (const auto& sc : scenarios) {
            const auto run = run_one(sc.config, request.options);
            write_trace_csv(run.trace, request.options.out_dir / ("trace_" + sc.label + ".csv"));
            print_report(out, sc.label, run.report);
            rows.emplace_back(sc.label, run.report);
        }
        write_report_csv(rows, request.options.out_dir / "compare.csv");

        auto ordered = rows;
        std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
            return a.second.delta > b.second.delta;
        });
        out << "delta ordering:";
        for (std::size_t k = 0; k < ordered.size(); ++k) {
            out << (k == 0 ? " " : " > ") << ordered[k].first << " (" << num(ordered[k].second.delta)
                << ")";
        }
        out << "\n";
        return static_cast<int>(kExitOk);
    });
}

int cmd_scenarios(std::ostream& out) {
    for (const auto& name : builtin_scenario_names()) {
        const auto cfg = builtin_scenario(name);
        const auto& cue = cfg.disks.front();
        out << name << "\n"
            << "  table " << num(cfg.geometry.width) << " x " << num(cfg.geometry.height) << ", "
            << cfg.disks.size() << " disks of radius " << num(cue.radius) << "\n"
            << "  horizon " << num(cfg.horizon) << " (" << std::llround(cfg.horizon / cfg.sample_tick)
            << " ticks of " << brief(cfg.sample_tick) << ")\n";
        if (cfg.brownian) {
            out << "  all positions uniform in [" << num(cue.x0.lo) << ", " << num(cue.x0.hi)
                << "] x [" << num(cue.y0.lo) << ", " << num(cue.y0.hi) << "], velocities uniform in ["
                << num(cue.vx0.lo) << ", " << num(cue.vx0.hi) << "]^2, no overlaps\n";
        } else {
            out << "  cue at (" << num(cue.x0.lo) << ", " << num(0.5 * (cue.y0.lo + cue.y0.hi))
                << " +/- " << num(0.5 * (cue.y0.hi - cue.y0.lo)) << ") with velocity ("
                << num(cue.vx0.lo * cfg.speed_multiplier) << ", "
                << num(cue.vy0.lo * cfg.speed_multiplier) << ")\n";
        }
        for (const auto& e : cfg.events) {
            out << "  event " << e.name << ": disk " << e.disk_id << " in (" << num(e.region.x1)
                << ", " << num(e.region.y1) << ")-(" << num(e.region.x2) << ", " << num(e.region.y2)
                << ") during [" << num(e.window.start) << ", " << num(e.window.end) << "]\n";
        }
    }
    return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hard-disk billiard ensembles and region-passage correlations"};
    app.require_subcommand(1);

    RunRequest run_req;
    CompareRequest cmp_req;
    std::string config_path;
    const std::map<std::string, CheckpointSpacing> spacings{{"linear", CheckpointSpacing::linear},
                                                            {"log", CheckpointSpacing::log}};

    auto add_common = [&](CLI::App* cmd, RunOptions& o) {
        cmd->add_option("--n", o.n, "Number of tables")->capture_default_str();
        cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
        cmd->add_option("--checkpoints", o.checkpoints, "Number of trace checkpoints")
            ->capture_default_str();
        cmd->add_option("--checkpoint-spacing", o.spacing, "linear or log")
            ->transform(CLI::CheckedTransformer(spacings, CLI::ignore_case))
            ->default_str("log");
        cmd->add_option("--bootstrap", o.bootstrap, "Bootstrap resamples")->capture_default_str();
        cmd->add_option("--ci-level", o.ci_level, "Bootstrap interval level")->capture_default_str();
        cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)")
            ->capture_default_str();
        cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    };

    auto* run = app.add_subcommand("run", "Run one scenario and write trace.csv and report.csv");
    auto* scenario_opt = run->add_option("--scenario", run_req.scenario, "Builtin scenario name");
    auto* config_opt = run->add_option("--config", config_path, "Scenario config file (JSON)");
    scenario_opt->excludes(config_opt);
    add_common(run, run_req.options);

    auto* compare = app.add_subcommand("compare", "Run several scenarios and write compare.csv");
    compare->add_option("scenarios", cmp_req.scenarios, "Builtin names or config paths");
    add_common(compare, cmp_req.options);

    auto* scenarios = app.add_subcommand("scenarios", "List builtin scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (run->parsed()) {
        if (!config_path.empty()) {
            run_req.config = config_path;
        }
        return cmd_run(run_req, out, err);
    }
    if (compare->parsed()) {
        return cmd_compare(cmp_req, out, err);
    }
    if (scenarios->parsed()) {
        return cmd_scenarios(out);
    }
    return kExitUsage;
}

}  // namespace billiard
