#include "cli.hpp"

#include "ncs/csv_io.hpp"
#include "ncs/errors.hpp"
#include "ncs/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ncs::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* out_dir_env = "NCS_OUT_DIR";

/// Options shared by `run` and `compare` that rewrite the resolved config.
struct ScenarioOptions {
    std::string scenario = "tank-paper";
    std::vector<std::string> sets;
    std::string loss;
    std::optional<std::uint64_t> seed;
    bool step4_literal = false;
    bool cost_raw_state = false;
    std::string out_dir;

    void attach(CLI::App& cmd) {
        cmd.add_option("scenario", scenario, "Built-in scenario name or JSON config path")
            ->capture_default_str();
        cmd.add_option("--set", sets, "Override a config value, e.g. predictor.gamma=0.1");
        cmd.add_option("--loss", loss,
                       "none | bernoulli:P | gilbert-elliott:G2B,B2G[,LOSS] | trace:PATH");
        cmd.add_option("--seed", seed, "Loss-channel seed");
        cmd.add_flag("--step4-literal", step4_literal,
                     "Index stale trajectories at offset 2i+1 instead of k - origin");
        cmd.add_flag("--cost-raw-state", cost_raw_state, "Weight the raw state in the cost");
        cmd.add_option("--out", out_dir, std::string("Output directory (default $") + out_dir_env + " or .)");
    }

    Scenario resolve() const {
        json tree = to_json(load_scenario(scenario));
        if (!loss.empty()) apply_loss_shorthand(tree, loss);
        if (seed) tree["loss"]["seed"] = *seed;
        for (const auto& s : sets) apply_override(tree, s);
        if (step4_literal) tree["sim"]["step4_literal"] = true;
        if (cost_raw_state) tree["cost"]["raw_state"] = true;
        return scenario_from_json(tree);
    }

    fs::path output_dir() const {
        fs::path dir = out_dir;
        if (dir.empty()) {
            const char* env = std::getenv(out_dir_env);
            dir = env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
        }
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
        return dir;
    }
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    f << text;
}

std::string trace_text(const std::vector<SimulationRecord>& records) {
    std::ostringstream os;
    write_trace(os, records);
    return os.str();
}

json number_or_null(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

int cmd_run(const ScenarioOptions& opts, const std::string& strategy_name, std::ostream& out) {
    const Scenario scenario = opts.resolve();
    const Strategy strategy = strategy_from_string(strategy_name);
    const fs::path dir = opts.output_dir();
    const auto setup = scenario.setup();

    write_file(dir / "resolved_config.json", to_json(scenario).dump(2) + "\n");

    const auto result = run_closed_loop(setup, strategy);
    write_file(dir / "trace.csv", trace_text(result.records));

    const double setpoint = scenario.lyapunov.setpoint;
    long losses = 0;
    for (const auto& r : result.records) losses += r.s == 0 ? 1 : 0;

    json summary{{"scenario", scenario.name},
                 {"strategy", to_string(strategy)},
                 {"seed", scenario.loss.seed},
                 {"status", result.diverged() ? "diverged" : "ok"},
                 {"records", result.records.size()},
                 {"losses", losses},
                 {"setpoint", setpoint},
                 {"x0", scenario.x0}};
    if (result.diverged()) summary["divergence"] = *result.divergence;
    if (!result.records.empty()) {
        const auto& last = result.records.back();
        const double initial_dev = std::abs(scenario.x0 - setpoint);
        const double final_dev = std::abs(last.x_true - setpoint);
        summary["final_state"] = last.x_true;
        summary["final_deviation"] = final_dev;
        summary["deviation_ratio"] = initial_dev > 0.0 ? json(final_dev / initial_dev) : json(nullptr);
        summary["final_running_cost"] = last.running_cost;
    }
    if (!result.diverged()) {
        summary["cost"] = evaluate_cost(result.records, scenario.cost, setpoint);
    }
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    out << summary.dump(2) << "\n";
    return result.diverged() ? exit_divergence : exit_ok;
}

int cmd_compare(const ScenarioOptions& opts, const std::vector<std::string>& strategy_names,
                int n_seeds, int jobs, bool keep_traces, std::ostream& out) {
    const Scenario scenario = opts.resolve();
    std::vector<Strategy> strategies;
    if (strategy_names.empty()) {
        strategies = scenario.strategies;
    } else {
        for (const auto& n : strategy_names) strategies.push_back(strategy_from_string(n));
    }
    const fs::path dir = opts.output_dir();
    const auto setup = scenario.setup();
    write_file(dir / "resolved_config.json", to_json(scenario).dump(2) + "\n");

    CellObserver observer;
    if (keep_traces) {
        fs::create_directories(dir / "traces");
        observer = [&dir](std::uint64_t seed, Strategy st, const SimulationResult& res) {
            write_file(dir / "traces" / ("seed_" + std::to_string(seed) + "_" + to_string(st) + ".csv"),
                       trace_text(res.records));
        };
    }

    const auto table =
        compare_strategies(setup, strategies, n_seeds, scenario.loss.seed, jobs, observer);

    std::ostringstream csv;
    write_comparison(csv, table);
    write_file(dir / "comparison.csv", csv.str());

    json medians = json::object();
    json diverged = json::object();
    json wins = json::object();
    for (std::size_t a = 0; a < strategies.size(); ++a) {
        const auto name = to_string(strategies[a]);
        medians[name] = number_or_null(table.median(a));
        int n_div = 0;
        for (const auto& row : table.cost) n_div += row[a] ? 0 : 1;
        diverged[name] = n_div;
        for (std::size_t b = 0; b < strategies.size(); ++b) {
            if (a != b) wins[name + " vs " + to_string(strategies[b])] = table.wins(a, b);
        }
    }
    json summary{{"scenario", scenario.name},
                 {"seeds", n_seeds},
                 {"base_seed", scenario.loss.seed},
                 {"median_cost", medians},
                 {"wins", wins},
                 {"diverged", diverged}};
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    out << csv.str() << summary.dump(2) << "\n";
    return exit_ok;
}

int cmd_calibrate(const std::string& samples_path, const std::string& method, bool clamp,
                  const std::string& scenario_name, const std::string& write_config,
                  std::ostream& out) {
    auto pairs = read_calibration_samples(samples_path);

    CalibrationReport report;
    std::size_t n_samples = 0;
    for (const auto& p : pairs) n_samples += p.predicted.size();
    if (method == "one") {
        SamplePair all;
        for (const auto& p : pairs) {
            all.predicted.insert(all.predicted.end(), p.predicted.begin(), p.predicted.end());
            all.measured.insert(all.measured.end(), p.measured.begin(), p.measured.end());
        }
        report = calibration_report_one(all.predicted, all.measured);
    } else {
        report = calibration_report_two(pairs);
    }

    out << "method: " << method << "\n";
    out << "samples: " << n_samples << "\n";
    out << "pairs: " << pairs.size() << "\n";
    if (method == "two") {
        for (std::size_t i = 0; i < report.pair_errors.size(); ++i) {
            out << "E_" << (i + 1) << ": " << format_double(report.pair_errors[i]) << "\n";
        }
    }
    out << "E: " << format_double(report.mean_squared_error) << "\n";
    out << "zeta: " << (report.zeta > 0 ? "+1" : "-1") << "\n";
    out << "gamma: " << format_double(report.gamma) << "\n";
    out << "in_range: " << (report.in_range() ? "true" : "false") << "\n";

    double gamma = report.gamma;
    if (!report.in_range()) {
        if (!clamp) {
            out << "error: |gamma| >= 1; rerun with --clamp-gamma to clip it\n";
            return exit_calibration_range;
        }
        gamma = clamp_gamma(gamma);
        out << "gamma_clamped: " << format_double(gamma) << "\n";
    }

    if (!write_config.empty()) {
        json tree = to_json(load_scenario(scenario_name));
        tree["predictor"]["gamma"] = gamma;
        const Scenario checked = scenario_from_json(tree);
        write_file(write_config, to_json(checked).dump(2) + "\n");
        out << "wrote: " << write_config << "\n";
    }
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Networked control loop simulator with prediction-based loss compensation",
                 "ncs-sim"};
    app.require_subcommand(1);

    ScenarioOptions run_opts;
    std::string strategy = "predictive";
    auto* run_cmd = app.add_subcommand("run", "Simulate one closed loop and write its trace");
    run_opts.attach(*run_cmd);
    run_cmd->add_option("--strategy", strategy, "predictive | hold-last | zero-input")
        ->capture_default_str();

    ScenarioOptions cmp_opts;
    std::vector<std::string> strategies;
    int n_seeds = 10;
    int jobs = 1;
    bool keep_traces = false;
    auto* cmp_cmd = app.add_subcommand("compare", "Paired Monte-Carlo comparison of strategies");
    cmp_opts.attach(*cmp_cmd);
    cmp_cmd->add_option("--strategies", strategies, "Strategies to compare (default: from config)")
        ->delimiter(',');
    cmp_cmd->add_option("--seeds", n_seeds, "Number of loss realizations")->capture_default_str();
    cmp_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
    cmp_cmd->add_flag("--traces", keep_traces, "Also write one trace CSV per cell");

    std::string samples_path;
    std::string method = "one";
    bool clamp = false;
    std::string cal_scenario = "tank-paper";
    std::string write_config;
    auto* cal_cmd = app.add_subcommand("calibrate", "Estimate the predictor correction gamma");
    cal_cmd->add_option("samples", samples_path, "CSV with pair_id,predicted,measured")->required();
    cal_cmd->add_option("--method", method, "one | two")
        ->check(CLI::IsMember({"one", "two"}))
        ->capture_default_str();
    cal_cmd->add_flag("--clamp-gamma", clamp, "Clip an out-of-range gamma into (-1, 1)");
    cal_cmd->add_option("--scenario", cal_scenario, "Scenario to write gamma into")
        ->capture_default_str();
    cal_cmd->add_option("--write-config", write_config, "Write the scenario with the calibrated gamma");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run_cmd) return cmd_run(run_opts, strategy, out);
        if (*cmp_cmd) {
            if (n_seeds < 1) throw ConfigError("--seeds must be >= 1");
            return cmd_compare(cmp_opts, strategies, n_seeds, jobs, keep_traces, out);
        }
        return cmd_calibrate(samples_path, method, clamp, cal_scenario, write_config, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const CalibrationError& e) {
        err << "calibration error: " << e.what() << "\n";
        return exit_config;
    } catch (const TraceExhausted& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_internal;
    }
}

}  // namespace ncs::cli
