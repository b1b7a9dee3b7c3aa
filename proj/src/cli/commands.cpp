#include "freshness/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "freshness/csv.hpp"
#include "freshness/errors.hpp"
#include "freshness/parallel.hpp"

namespace freshness::cli {
namespace {

std::string csv_waiting(const WaitingFunction& waiting) {
    std::string out;
    for (const auto& e : waiting.entries()) {
        out += out.empty() ? "" : " ";
        out += fmt::format("{}:{}", e.y, e.wait);
    }
    return out;
}

MarkovSourceModel swept_model(const ExperimentConfig& config, double x) {
    if (config.sweep_variable == "a") {
        return MarkovSourceModel::gaussian_ar1(x, config.source.sigma2);
    }
    return MarkovSourceModel::binary_symmetric(x);
}

bool is_mi_objective(const ExperimentConfig& config) { return config.penalty.kind == PenaltyKind::negated_mi; }

Metric config_metric(const ExperimentConfig& config) {
    if (is_mi_objective(config)) {
        return config.source_model();
    }
    return config.penalty_function();
}

PolicySpec make_policy(const ExperimentConfig& config, PolicyKind kind) {
    switch (kind) {
    case PolicyKind::uniform: return UniformPolicy{config.effective_uniform_period()};
    case PolicyKind::zero_wait: return ZeroWaitPolicy{};
    case PolicyKind::optimal: {
        const AgePenalty penalty = config.penalty_function();
        const SolverResult solved = solve_beta(penalty, config.service_dist(), config.solver_options());
        return ThresholdPolicy{solved.beta, penalty, config.z_max};
    }
    }
    throw ValidationError("unknown policy");
}

// Where CSV goes: a file named by --out / output.path, or the given stream.
class CsvSink {
public:
    CsvSink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw ConfigError(0, "--out", fmt::format("cannot open '{}' for writing", path));
            }
        }
    }
    std::ostream& stream() { return path_.empty() ? fallback_ : file_; }

private:
    std::string path_;
    std::ostream& fallback_;
    std::ofstream file_;
};

void write_plot_script(const std::string& csv_path, const std::string& kind) {
    const std::string script_path = csv_path + ".plot.py";
    std::ofstream script(script_path);
    if (!script) {
        throw ConfigError(0, "--plot-script", fmt::format("cannot open '{}' for writing", script_path));
    }
    script << "# Companion plot for " << csv_path << " (requires pandas and matplotlib).\n"
           << "import pandas as pd\nimport matplotlib.pyplot as plt\n\n"
           << "df = pd.read_csv(" << '"' << csv_path << '"' << ", keep_default_na=False, na_values=['nan'])\n"
           << "fig, ax = plt.subplots()\n";
    if (kind == "mi-curve") {
        script << "df = df[df.mi_bits != 'inf'].astype(float)\n"
               << "ax.plot(df.delta, df.mi_bits, marker='o')\n"
               << "ax.set_xlabel('age')\nax.set_ylabel('mutual information (bits)')\n";
    } else if (kind == "sweep") {
        script << "x = df.columns[0]\n"
               << "ax.plot(df[x], df.i_opt, label='optimal')\n"
               << "ax.plot(df[x], df.i_zero_wait, label='zero-wait')\n"
               << "ax.errorbar(df[x], df.i_uniform_mean, yerr=3 * df.i_uniform_stderr, label='uniform')\n"
               << "ax.set_xlabel(x)\nax.set_ylabel('time-average mutual information (bits)')\nax.legend()\n";
    } else if (kind == "trace") {
        script << "ax.step(df.n, df.delta, where='post', label='age')\n"
               << "ax2 = ax.twinx()\nax2.step(df.n, df.metric.astype(float), where='post', color='C1', label='metric')\n"
               << "ax.set_xlabel('n')\nax.set_ylabel('age')\nax2.set_ylabel('metric')\n";
    } else {
        script << "df.plot(ax=ax)\n";
    }
    script << "fig.tight_layout()\nfig.savefig(" << '"' << csv_path << ".png" << '"' << ")\n";
}

int cmd_mi_curve(const ExperimentConfig& config, std::ostream& csv, std::ostream& /*err*/) {
    const MarkovSourceModel model = config.source_model();
    csv << "delta,mi_bits\n";
    for (Steps delta = 0; delta <= config.delta_max; ++delta) {
        csv << delta << ',' << format_real(model.mutual_information(delta)) << '\n';
    }
    return kExitOk;
}

int cmd_solve(const ExperimentConfig& config, std::ostream& csv, std::ostream& err) {
    const ServiceTimeDist dist = config.service_dist();
    const bool mi = is_mi_objective(config);
    const SolverResult result =
        mi ? solve_mi(config.source_model(), dist, config.solver_options())
           : solve_beta(config.penalty_function(), dist, config.solver_options());

    csv << "y,prob,wait,beta,h_residual,iterations\n";
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const auto& atom = dist.support()[i];
        csv << atom.y << ',' << format_real(atom.prob) << ',' << result.waiting.entries()[i].wait << ','
            << format_real(result.beta) << ',' << format_real(result.h_residual) << ',' << result.iterations << '\n';
    }

    const std::string objective = mi ? "time-average mutual information (maximized)"
                                     : "time-average age penalty (minimized)";
    err << fmt::format("objective:   {}\n", objective);
    err << fmt::format("model:       {}\n", mi ? config.source_model().describe() : config.penalty_function().describe());
    err << fmt::format("service:     {} (mean {})\n", dist.to_string(), format_real(dist.mean()));
    err << fmt::format("beta:        {}\n", format_real(result.beta));
    err << fmt::format("waiting:     {}\n", result.waiting.to_string());
    err << fmt::format("h(beta):     {}   iterations: {}\n", format_real(result.h_residual), result.iterations);

    const Metric metric = config_metric(config);
    const AgePenalty penalty = config.penalty_function();
    const double sign = mi ? -1.0 : 1.0;
    for (PolicyKind kind : config.policies) {
        switch (kind) {
        case PolicyKind::optimal:
            err << fmt::format("  {:<10} {} (exact)\n", to_string(kind), format_real(result.beta));
            break;
        case PolicyKind::zero_wait: {
            const double v = zero_wait_average(penalty, dist);
            err << fmt::format("  {:<10} {} (exact)\n", to_string(kind), format_real(v == 0.0 ? 0.0 : sign * v));
            break;
        }
        case PolicyKind::uniform: {
            const auto seeds = config.seeds();
            const Estimate e = estimate_time_average(make_policy(config, kind), metric, dist, config.horizon, seeds,
                                                     config.delta0);
            err << fmt::format("  {:<10} {} +/- {} (simulated, period {}, {} seeds x {} steps)\n", to_string(kind),
                               format_real(e.mean), format_real(e.std_error), config.effective_uniform_period(),
                               seeds.size(), config.horizon);
            break;
        }
        }
    }
    return kExitOk;
}

int cmd_sweep(const ExperimentConfig& config, std::ostream& csv, std::ostream& err) {
    if (config.sweep_grid.empty()) {
        throw ConfigError(0, "sweep.grid", "the sweep grid is empty");
    }
    const auto rows = compute_sweep(config);
    write_sweep_csv(csv, config.sweep_variable, rows);
    err << fmt::format("swept {} over {} points; uniform period {}, {} seeds x {} steps\n", config.sweep_variable,
                       rows.size(), config.effective_uniform_period(), config.seed_count, config.horizon);
    return kExitOk;
}

int cmd_trace(const ExperimentConfig& config, std::ostream& csv, std::ostream& err) {
    const ServiceTimeDist dist = config.service_dist();
    const PolicySpec policy = make_policy(config, config.policies.front());
    const Metric metric = config_metric(config);
    const SimulationRun run =
        config.forced_services.empty()
            ? simulate(policy, metric, dist, {config.horizon, config.seed, config.delta0, true})
            : replay(policy, metric, dist, config.forced_services, config.horizon, config.delta0);
    write_trace_csv(csv, run.trace);
    err << fmt::format("policy {}: time average {} over {} steps, {} generated, {} delivered\n", policy_name(policy),
                       format_real(run.summary.time_average), config.horizon, run.summary.samples_generated,
                       run.summary.samples_delivered);
    return kExitOk;
}

int cmd_oracle_check(const ExperimentConfig& config, std::ostream& csv, std::ostream& err) {
    const OracleCheckReport report = run_oracle_check(config);
    csv << "instance,label,beta_solver,beta_oracle,deviation,solver_waiting,oracle_waiting\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        csv << i << ',' << row.label << ',' << format_real(row.beta_solver) << ',' << format_real(row.beta_oracle) << ','
            << format_real(row.deviation) << ',' << csv_waiting(row.solver_waiting) << ','
            << csv_waiting(row.oracle_waiting) << '\n';
    }
    err << fmt::format("{} instances, max |beta_solver - beta_oracle| = {} (tolerance {})\n", report.rows.size(),
                       format_real(report.max_deviation), format_real(kOracleTolerance));
    if (report.pass) {
        err << "PASS\n";
        return kExitOk;
    }
    const auto& worst = report.rows[report.worst];
    err << fmt::format("FAIL: worst instance {} ({}): solver beta {} waiting {}, oracle beta {} waiting {} (z_cap {})\n",
                       report.worst, worst.label, format_real(worst.beta_solver), worst.solver_waiting.to_string(),
                       format_real(worst.beta_oracle), worst.oracle_waiting.to_string(), config.oracle_z_cap);
    return kExitRuntime;
}

} // namespace

std::vector<SweepRow> compute_sweep(const ExperimentConfig& config, std::size_t workers) {
    const ServiceTimeDist dist = config.service_dist();
    const Steps period = config.effective_uniform_period();
    const auto seeds = config.seeds();
    std::vector<SweepRow> rows(config.sweep_grid.size());
    std::vector<MarkovSourceModel> models;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double x = config.sweep_grid[i];
        models.push_back(swept_model(config, x));
        rows[i].x = x;
        rows[i].i_opt = solve_mi(models.back(), dist, config.solver_options()).beta;
        const double zw = zero_wait_average(AgePenalty::negated_mi(models.back()), dist);
        rows[i].i_zero_wait = zw == 0.0 ? 0.0 : -zw;
    }

    const std::size_t per_point = seeds.size();
    std::vector<double> averages(rows.size() * per_point);
    parallel_for(
        averages.size(),
        [&](std::size_t task) {
            const std::size_t point = task / per_point;
            SimulationOptions options;
            options.horizon = config.horizon;
            options.seed = seeds[task % per_point];
            options.delta0 = config.delta0;
            options.record_trace = false;
            averages[task] =
                simulate(UniformPolicy{period}, models[point], dist, options).summary.time_average;
        },
        workers);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Estimate e = estimate_from_samples(std::span(averages).subspan(i * per_point, per_point));
        rows[i].i_uniform_mean = e.mean;
        rows[i].i_uniform_stderr = e.std_error;
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::string& variable, const std::vector<SweepRow>& rows) {
    out << variable << ",i_opt,i_zero_wait,i_uniform_mean,i_uniform_stderr\n";
    for (const SweepRow& row : rows) {
        out << format_real(row.x) << ',' << format_real(row.i_opt) << ',' << format_real(row.i_zero_wait) << ','
            << format_real(row.i_uniform_mean) << ',' << format_real(row.i_uniform_stderr) << '\n';
    }
}

OracleCheckReport run_oracle_check(const ExperimentConfig& config) {
    std::vector<OracleInstance> instances;
    if (config.oracle_mode == "config") {
        instances.push_back({config.penalty_function(), config.service_dist(), config.penalty_function().describe()});
    } else {
        for (int i = 0; i < config.oracle_instances; ++i) {
            instances.push_back(random_oracle_instance(config.oracle_seed, i));
        }
    }

    OracleCheckReport report;
    report.rows.resize(instances.size());
    parallel_for(instances.size(), [&](std::size_t i) {
        const OracleInstance& inst = instances[i];
        const SolverResult solved = solve_beta(inst.penalty, inst.dist, config.solver_options());
        const OracleResult oracle = brute_force_optimum(inst.penalty, inst.dist, config.oracle_z_cap);
        OracleCheckRow& row = report.rows[i];
        row.label = inst.label + " dist {" + inst.dist.to_string() + "}";
        for (char& ch : row.label) {
            if (ch == ',') ch = ';';
        }
        row.beta_solver = solved.beta;
        row.beta_oracle = oracle.best_ratio;
        row.deviation = std::abs(solved.beta - oracle.best_ratio);
        row.solver_ratio = renewal_average(inst.penalty, inst.dist, solved.waiting);
        row.solver_waiting = solved.waiting;
        row.oracle_waiting = oracle.best_waiting;
    });
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        if (report.rows[i].deviation > report.max_deviation || i == 0) {
            report.max_deviation = report.rows[i].deviation;
            report.worst = i;
        }
    }
    report.pass = report.max_deviation <= kOracleTolerance;
    return report;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Information-freshness toolkit: mutual-information age curves, optimal threshold sampling, "
                 "and FIFO-queue policy simulation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::optional<std::int64_t> seeds;
    std::optional<Steps> horizon;
    std::optional<double> tol;
    std::optional<Steps> zmax;
    bool plot_script = false;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"mi-curve", "Tabulate the mutual information r(delta) of the configured source"},
        {"solve", "Compute the optimal threshold and waiting function"},
        {"sweep", "Compare optimal, zero-wait and uniform sampling over a source-parameter grid"},
        {"trace", "Emit a per-step simulation trace (optionally with forced service times)"},
        {"oracle-check", "Check the solver against exhaustive enumeration"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, description] : commands) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "Experiment config file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "Write CSV here instead of stdout");
        sub->add_option("--seeds", seeds, "Number of simulation seeds");
        sub->add_option("--horizon", horizon, "Simulation horizon in steps");
        sub->add_option("--tol", tol, "Solver bisection tolerance");
        sub->add_option("--zmax", zmax, "Largest waiting time the solver scans");
        sub->add_flag("--plot-script", plot_script, "Also write <out>.plot.py for matplotlib");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        if (seeds) config.seed_count = *seeds;
        if (horizon) config.horizon = *horizon;
        if (tol) config.tol = *tol;
        if (zmax) config.z_max = *zmax;
        if (!out_path.empty()) config.output_path = out_path;
        validate_config(config);
        if (plot_script && config.output_path.empty()) {
            throw ConfigError(0, "--plot-script", "a plot script needs --out (or output.path)");
        }

        std::string name;
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (subs[i]->parsed()) name = commands[i].first;
        }
        CsvSink sink(config.output_path, out);
        int code = kExitOk;
        if (name == "mi-curve") code = cmd_mi_curve(config, sink.stream(), err);
        else if (name == "solve") code = cmd_solve(config, sink.stream(), err);
        else if (name == "sweep") code = cmd_sweep(config, sink.stream(), err);
        else if (name == "trace") code = cmd_trace(config, sink.stream(), err);
        else code = cmd_oracle_check(config, sink.stream(), err);
        if (plot_script) {
            write_plot_script(config.output_path, name);
        }
        return code;
    } catch (const ThresholdUnreachable& e) {
        err << "error: " << e.what() << '\n'
            << "hint: raise --zmax, or check that the penalty can exceed the optimal value\n";
        return kExitRuntime;
    } catch (const SequenceExhausted& e) {
        err << "error: " << e.what() << '\n'
            << "hint: supply more forced service times or shorten the horizon\n";
        return kExitRuntime;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace freshness::cli
