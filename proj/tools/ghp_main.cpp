#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ghp/experiment.hpp"
#include "ghp/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int workers_from(int cli_value) {
    if (cli_value > 0) return cli_value;
    if (const char* env = std::getenv("GHP_WORKERS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return ghp::default_workers();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + dir);
}

int cmd_validate(const std::string& config_path) {
    const ghp::RunConfig cfg = ghp::load_config(config_path);
    const ghp::ValidationReport report = ghp::validate_config(cfg);
    if (report.ok()) {
        std::cout << "valid (config hash " << ghp::config_hash(cfg) << ")\n";
        return 0;
    }
    for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
    return 1;
}

int cmd_solve(const std::string& config_path, const std::string& table_path, const std::string& summary_path,
              int workers) {
    const ghp::RunConfig cfg = ghp::load_config(config_path);
    const ghp::Instance inst = ghp::build_instance(cfg);

    const auto start = std::chrono::steady_clock::now();
    const ghp::ValueTable table = ghp::backward_induction(inst, workers);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    table.save(table_path);
    const double v0 = table.interp(0, inst.init_pe, inst.init_ph, inst.init_v, inst.init_inventory,
                                   inst.grid.resolution);
    json summary;
    summary["tool_version"] = ghp::kToolVersion;
    summary["config_hash"] = inst.hash;
    summary["policy"] = inst.policy_label;
    summary["value_at_start"] = v0;
    summary["dimensions"] = json{{"periods", table.horizon() + 1},
                                 {"elec_levels", table.elec_levels()},
                                 {"hyd_levels", table.hyd_levels()},
                                 {"v_levels", table.v_levels()},
                                 {"inventory_points", table.inv_points()},
                                 {"cells", table.cells()}};
    summary["wall_seconds"] = wall;
    if (!summary_path.empty()) {
        std::ofstream out(summary_path);
        if (!out) throw std::runtime_error("cannot write summary: " + summary_path);
        out << summary.dump(2) << "\n";
    }
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& table_path, int reps, int years,
                 std::uint64_t seed, int trace_reps, const std::string& out_dir, int workers) {
    const ghp::RunConfig cfg = ghp::load_config(config_path);
    const ghp::Instance inst = ghp::build_instance(cfg);
    const ghp::ValueTable table = ghp::ValueTable::load(table_path);

    ghp::SimOptions opts;
    opts.replications = reps;
    opts.years = years;
    opts.seed = seed;
    opts.workers = workers;
    opts.trace_reps = trace_reps;
    std::vector<ghp::Trace> traces;
    const ghp::KpiReport kpi = ghp::simulate(inst, table, opts, &traces);

    ensure_dir(out_dir);
    ghp::write_kpi_json(kpi, (fs::path(out_dir) / "kpi.json").string());
    ghp::write_heatmap_csv(kpi.heatmap, (fs::path(out_dir) / "heatmap.csv").string());
    if (!traces.empty()) ghp::write_traces_csv(traces, (fs::path(out_dir) / "traces.csv").string());
    std::cout << ghp::kpi_to_json(kpi) << "\n";
    return 0;
}

int cmd_sweep(const std::string& experiment_path, const std::string& out_dir_flag, int workers) {
    ghp::ExperimentSpec spec = ghp::load_experiment(experiment_path);
    const std::string out_dir = out_dir_flag.empty() ? spec.out_dir : out_dir_flag;
    ensure_dir(out_dir);

    const ghp::SweepResult result = ghp::run_sweep(spec, workers);
    ghp::write_sweep_csv(result, spec.axis, (fs::path(out_dir) / "sweep.csv").string());
    for (const auto& row : result.rows) {
        const std::string name = "kpi_" + ghp::sanitize_label(row.setting) + "_" +
                                 ghp::fmt_fixed(row.axis_value, 3) + ".json";
        ghp::write_kpi_json(row.kpi, (fs::path(out_dir) / name).string());
    }
    if (!result.failures.empty()) {
        json fails = json::array();
        for (const auto& f : result.failures) fails.push_back(f);
        std::ofstream out(fs::path(out_dir) / "failures.json");
        out << fails.dump(2) << "\n";
        std::cerr << result.failures.size() << " sweep point(s) failed; see failures.json\n";
    }
    std::cout << "wrote " << result.rows.size() << " sweep rows to " << out_dir << "\n";
    return 0;
}

int cmd_fit_wind(const std::string& csv_path, bool monthly, const std::string& out_path) {
    std::ifstream in(csv_path);
    if (!in) throw ghp::ConfigError("cannot open wind CSV: " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw ghp::ConfigError("wind CSV is empty");
    std::map<int, std::vector<double>> by_month;
    std::vector<double> all;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ghp::ConfigError("wind CSV line " + std::to_string(lineno) + ": expected date,speed");
        const std::string date = line.substr(0, comma);
        double speed = 0.0;
        try {
            speed = std::stod(line.substr(comma + 1));
        } catch (...) {
            throw ghp::ConfigError("wind CSV line " + std::to_string(lineno) + ": bad speed value");
        }
        int month = 0;
        if (date.size() >= 7) month = std::atoi(date.substr(5, 2).c_str());
        if (month < 1 || month > 12)
            throw ghp::ConfigError("wind CSV line " + std::to_string(lineno) + ": bad date '" + date + "'");
        by_month[month].push_back(speed);
        all.push_back(speed);
    }

    json out_json;
    if (monthly) {
        json months = json::array();
        for (const auto& [month, speeds] : by_month) {
            const ghp::WeibullFit fit = ghp::fit_weibull(speeds);
            months.push_back(json{{"month", month}, {"shape", fit.shape}, {"scale", fit.scale},
                                  {"observations", speeds.size()}});
        }
        out_json["months"] = months;
    } else {
        const ghp::WeibullFit fit = ghp::fit_weibull(all);
        out_json = json{{"shape", fit.shape}, {"scale", fit.scale}, {"observations", all.size()}};
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write: " + out_path);
        out << out_json.dump(2) << "\n";
    }
    std::cout << out_json.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal daily dispatch for a wind plant with hydrogen storage: exact finite-horizon "
                 "dynamic programming, Monte Carlo policy evaluation, and experiment sweeps"};
    app.require_subcommand(1);

    std::string config_path, table_path, summary_path, out_dir, experiment_path, csv_path, fit_out;
    int reps = 1000, years = 1, trace_reps = 1, workers = 0;
    std::uint64_t seed = 1;
    bool monthly = true;

    auto* validate = app.add_subcommand("validate", "Check a configuration file");
    validate->add_option("--config", config_path, "Configuration JSON")->required();

    auto* solve = app.add_subcommand("solve", "Compute the optimal value table");
    solve->add_option("--config", config_path, "Configuration JSON")->required();
    solve->add_option("--out", table_path, "Output table file")->required();
    solve->add_option("--summary", summary_path, "Summary JSON path");
    solve->add_option("--workers", workers, "Worker threads (default: all cores)");

    auto* simulate = app.add_subcommand("simulate", "Evaluate the greedy policy by Monte Carlo");
    simulate->add_option("--config", config_path, "Configuration JSON")->required();
    simulate->add_option("--table", table_path, "Value table from solve")->required();
    simulate->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
    simulate->add_option("--years", years, "Chained years per replication")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "Master seed");
    simulate->add_option("--trace-reps", trace_reps, "Replications to trace to CSV");
    simulate->add_option("--out-dir", out_dir, "Output directory")->required();
    simulate->add_option("--workers", workers, "Worker threads");

    auto* sweep = app.add_subcommand("sweep", "Run an experiment over settings and a sweep axis");
    sweep->add_option("--experiment", experiment_path, "Experiment JSON")->required();
    sweep->add_option("--out-dir", out_dir, "Output directory (overrides the experiment file)");
    sweep->add_option("--workers", workers, "Worker threads");

    auto* fit = app.add_subcommand("fit-wind", "Fit Weibull parameters to a daily wind-speed CSV");
    fit->add_option("--csv", csv_path, "CSV with date,speed columns")->required();
    fit->add_flag("--monthly,!--single", monthly, "Fit per month (default) or one distribution");
    fit->add_option("--out", fit_out, "Write the fit to this JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // usage errors
    }

    try {
        const int w = workers_from(workers);
        if (validate->parsed()) return cmd_validate(config_path);
        if (solve->parsed()) return cmd_solve(config_path, table_path, summary_path, w);
        if (simulate->parsed())
            return cmd_simulate(config_path, table_path, reps, years, seed, trace_reps, out_dir, w);
        if (sweep->parsed()) return cmd_sweep(experiment_path, out_dir, w);
        if (fit->parsed()) return cmd_fit_wind(csv_path, monthly, fit_out);
    } catch (const ghp::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
