#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "netpoint/errors.hpp"
#include "netpoint/io.hpp"
#include "netpoint/scenario.hpp"
#include "netpoint/sim.hpp"

namespace netpoint::cli {

// Disjoint process exit codes; every failure class gets its own.
inline constexpr int exit_ok = 0;
inline constexpr int exit_internal = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_io = 3;
inline constexpr int exit_parse = 4;
inline constexpr int exit_schema = 5;
inline constexpr int exit_invariant = 6;
inline constexpr int exit_degenerate = 7;
inline constexpr int exit_divergence = 8;
inline constexpr int exit_certification_failed = 9;
inline constexpr int exit_no_convergence = 10;

inline int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::invalid_input: return exit_usage;
        case ErrorCode::degenerate_bearing: return exit_degenerate;
        case ErrorCode::parse_error: return exit_parse;
        case ErrorCode::schema_error: return exit_schema;
        case ErrorCode::invariant_violation: return exit_invariant;
        case ErrorCode::divergence: return exit_divergence;
        case ErrorCode::io_error: return exit_io;
        case ErrorCode::eigensolver_failure: return exit_internal;
    }
    return exit_internal;
}

struct RunCommandOptions {
    std::filesystem::path scenario_path;
    std::filesystem::path output_dir = ".";
    std::optional<double> dt;
    std::optional<double> t_final;
    std::optional<double> eps;
    std::optional<std::uint64_t> seed;
    IntegratorKind integrator = IntegratorKind::euler;
};

/// Integrates one scenario and writes trace.csv, summary.json, and
/// certificate.json into the output directory. Returns exit_ok when the run
/// converged, exit_no_convergence when it completed without converging.
inline int cmd_run(const RunCommandOptions& opts) {
    const std::string bytes = read_file(opts.scenario_path);
    const std::string digest = fnv1a64_hex(bytes);
    Scenario scenario = parse_scenario(bytes);
    if (opts.dt) scenario.dt = *opts.dt;
    if (opts.t_final) scenario.t_final = *opts.t_final;
    if (opts.eps) scenario.convergence_eps = *opts.eps;
    if (opts.seed) scenario.seed = *opts.seed;
    scenario.validate();

    RunOptions run_options;
    run_options.integrator = opts.integrator;
    const auto start = std::chrono::steady_clock::now();
    const SimTrace trace = run(scenario, run_options);
    const double wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::error_code ec;
    std::filesystem::create_directories(opts.output_dir, ec);
    if (ec) {
        throw Error(ErrorCode::io_error,
                    "cannot create output directory: " + opts.output_dir.string() + " (" +
                        ec.message() + ")");
    }
    write_trace_csv(opts.output_dir / "trace.csv", trace);
    const RunSummary summary = make_summary(digest, trace, scenario, opts.integrator, wall_seconds);
    write_file(opts.output_dir / "summary.json", summary_to_json(summary).dump(2) + "\n");
    write_file(opts.output_dir / "certificate.json",
               certificate_to_json(trace.certificate).dump(2) + "\n");

    if (!trace.certificate.overall) {
        std::cerr << "warning: stability certificate failed; run proceeded anyway\n";
    }
    if (trace.converged_at) {
        std::cout << "converged at t=" << format_full(*trace.converged_at) << "\n";
        return exit_ok;
    }
    std::cout << "no convergence by t_final=" << format_full(scenario.t_final) << "\n";
    return exit_no_convergence;
}

/// Prints the stability certificate as JSON on stdout. On failure, explains
/// which condition broke on stderr and returns exit_certification_failed.
inline int cmd_certify(const std::filesystem::path& scenario_path) {
    const std::string bytes = read_file(scenario_path);
    const Scenario scenario = parse_scenario(bytes);
    const StabilityCertificate cert = certify(scenario);
    std::cout << certificate_to_json(cert).dump(2) << "\n";
    if (cert.overall) return exit_ok;
    if (!cert.localizable) {
        std::cerr << "Assumption 1 violated: sensing agents are collinear with the target\n";
    }
    if (!cert.hurwitz_stable) {
        std::cerr << "sensing-agent error system is not Hurwitz stable\n";
    }
    if (!cert.assumption2.satisfied) {
        std::cerr << "Assumption 2 violated: fusion node cannot reach every non-sensing agent\n";
    } else if (!cert.nsa_ok) {
        std::cerr << "consensus system matrix has an eigenvalue with non-positive real part\n";
    }
    return exit_certification_failed;
}

enum class SweepParam { dt, k12, k21, seed, target_angle };

inline SweepParam sweep_param_from_name(const std::string& name) {
    if (name == "dt") return SweepParam::dt;
    if (name == "k12") return SweepParam::k12;
    if (name == "k21") return SweepParam::k21;
    if (name == "seed") return SweepParam::seed;
    if (name == "target-angle") return SweepParam::target_angle;
    throw Error(ErrorCode::invalid_input, "sweep: unknown parameter \"" + name + "\"");
}

/// Returns a copy of the scenario with one swept parameter replaced.
/// target-angle moves the target around the circle centered on the midpoint
/// of the two sensing agents that passes through the original target.
inline Scenario apply_sweep_value(Scenario scenario, SweepParam param, double value) {
    switch (param) {
        case SweepParam::dt:
            scenario.dt = value;
            break;
        case SweepParam::k12:
            scenario.topology.k12 = value;
            break;
        case SweepParam::k21:
            scenario.topology.k21 = value;
            break;
        case SweepParam::seed:
            if (!(value >= 0.0) || !std::isfinite(value)) {
                throw Error(ErrorCode::invalid_input, "sweep: seed values must be nonnegative");
            }
            scenario.seed = static_cast<std::uint64_t>(value);
            break;
        case SweepParam::target_angle: {
            const Vec2 mid = 0.5 * (scenario.agents[0].position + scenario.agents[1].position);
            const double radius = (scenario.target - mid).norm();
            scenario.target = mid + radius * Vec2{std::cos(value), std::sin(value)};
            break;
        }
    }
    return scenario;
}

struct SweepRow {
    double value = 0.0;
    std::string status; // "converged", "no-convergence", or "error:<code>"
    std::optional<double> converged_at;
    std::optional<double> final_max_est_err;
    std::optional<double> final_max_point_err;
    std::optional<bool> localizable;
    double wall_seconds = 0.0;
};

namespace detail {

inline SweepRow run_sweep_cell(const Scenario& base, SweepParam param, double value,
                               IntegratorKind integrator) {
    SweepRow row;
    row.value = value;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Scenario scenario = apply_sweep_value(base, param, value);
        scenario.validate();
        RunOptions options;
        options.integrator = integrator;
        const SimTrace trace = run(scenario, options);
        row.localizable = trace.certificate.localizable;
        row.converged_at = trace.converged_at;
        double est = 0.0;
        double point = 0.0;
        for (std::size_t i = 0; i < trace.est_err.size(); ++i) {
            est = std::max(est, trace.est_err[i].back());
            point = std::max(point, trace.point_err[i].back());
        }
        row.final_max_est_err = est;
        row.final_max_point_err = point;
        row.status = trace.converged_at ? "converged" : "no-convergence";
    } catch (const Error& e) {
        row.status = std::string("error:") + to_string(e.code());
    }
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

} // namespace detail

/// Runs the scenario once per value. Cells fail independently; a failed cell
/// becomes an error row and the sweep carries on. With jobs > 1, cells are
/// distributed over that many threads; the row order is always the value
/// order regardless of scheduling.
inline std::vector<SweepRow> sweep(const Scenario& base, SweepParam param,
                                   const std::vector<double>& values,
                                   IntegratorKind integrator = IntegratorKind::euler,
                                   int jobs = 1) {
    if (jobs < 1) {
        throw Error(ErrorCode::invalid_input, "sweep: jobs must be at least 1");
    }
    std::vector<SweepRow> rows(values.size());
    std::atomic<std::size_t> cursor{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= values.size()) return;
            rows[i] = detail::run_sweep_cell(base, param, values[i], integrator);
        }
    };
    const std::size_t thread_count =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), values.size());
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (std::size_t i = 0; i < thread_count; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return rows;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "value,status,converged_at,final_max_est_err,final_max_point_err,localizable,"
           "wall_seconds\n";
    for (const SweepRow& row : rows) {
        out << format_full(row.value) << "," << row.status << ",";
        if (row.converged_at) out << format_full(*row.converged_at);
        out << ",";
        if (row.final_max_est_err) out << format_full(*row.final_max_est_err);
        out << ",";
        if (row.final_max_point_err) out << format_full(*row.final_max_point_err);
        out << ",";
        if (row.localizable) out << (*row.localizable ? "true" : "false");
        out << "," << format_full(row.wall_seconds) << "\n";
    }
    return out.str();
}

struct SweepCommandOptions {
    std::filesystem::path scenario_path;
    std::filesystem::path output_dir = ".";
    SweepParam param = SweepParam::dt;
    std::vector<double> values;
    IntegratorKind integrator = IntegratorKind::euler;
    int jobs = 1;
};

inline int cmd_sweep(const SweepCommandOptions& opts) {
    const std::string bytes = read_file(opts.scenario_path);
    const Scenario base = parse_scenario(bytes);
    const std::vector<SweepRow> rows = sweep(base, opts.param, opts.values, opts.integrator,
                                             opts.jobs);
    std::error_code ec;
    std::filesystem::create_directories(opts.output_dir, ec);
    if (ec) {
        throw Error(ErrorCode::io_error,
                    "cannot create output directory: " + opts.output_dir.string() + " (" +
                        ec.message() + ")");
    }
    write_file(opts.output_dir / "sweep.csv", sweep_to_csv(rows));
    std::size_t converged = 0;
    for (const SweepRow& row : rows) {
        if (row.status == "converged") ++converged;
    }
    std::cout << "sweep: " << rows.size() << " values, " << converged << " converged\n";
    return exit_ok;
}

namespace detail {

inline std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> values;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        if (begin == text.size()) {
            if (!values.empty()) {
                throw Error(ErrorCode::invalid_input, "sweep: trailing comma in --values");
            }
            break;
        }
        std::size_t end = text.find(',', begin);
        if (end == std::string::npos) end = text.size();
        std::string item = text.substr(begin, end - begin);
        const std::size_t first = item.find_first_not_of(" \t");
        if (first == std::string::npos) {
            throw Error(ErrorCode::invalid_input, "sweep: empty entry in --values");
        }
        const std::size_t last = item.find_last_not_of(" \t");
        item = item.substr(first, last - first + 1);
        std::size_t consumed = 0;
        double value = 0.0;
        try {
            value = std::stod(item, &consumed);
        } catch (const std::exception&) {
            throw Error(ErrorCode::invalid_input, "sweep: cannot parse value \"" + item + "\"");
        }
        if (consumed != item.size()) {
            throw Error(ErrorCode::invalid_input, "sweep: cannot parse value \"" + item + "\"");
        }
        values.push_back(value);
        if (end == text.size()) break;
        begin = end + 1;
        if (begin == text.size()) {
            throw Error(ErrorCode::invalid_input, "sweep: trailing comma in --values");
        }
    }
    return values;
}

inline std::vector<double> linspace(double from, double to, int count) {
    if (count < 0) {
        throw Error(ErrorCode::invalid_input, "sweep: --count must be nonnegative");
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        values.push_back(from);
        return values;
    }
    for (int i = 0; i < count; ++i) {
        values.push_back(from + (to - from) * static_cast<double>(i) /
                                    static_cast<double>(count - 1));
    }
    return values;
}

inline std::filesystem::path resolve_output_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("NETPOINT_OUTPUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ".";
}

} // namespace detail

/// Parses argv and executes one subcommand. Returns the process exit code;
/// never throws.
inline int dispatch(int argc, char** argv) {
    CLI::App app{"cooperative bearing-only target localization and pointing simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string output_dir;
    std::optional<double> dt_override;
    std::optional<double> t_final_override;
    std::optional<double> eps_override;
    std::optional<std::uint64_t> seed_override;
    std::string integrator_name = "euler";
    std::string param_name;
    std::string values_text;
    std::optional<double> range_from;
    std::optional<double> range_to;
    int range_count = 0;
    int jobs = 1;

    CLI::App* run_cmd =
        app.add_subcommand("run", "integrate a scenario and write trace, summary, certificate");
    run_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run_cmd->add_option("--output-dir", output_dir,
                        "output directory (default: $NETPOINT_OUTPUT_DIR, else current dir)");
    run_cmd->add_option("--dt", dt_override, "override integration step in seconds");
    run_cmd->add_option("--t-final", t_final_override, "override end time in seconds");
    run_cmd->add_option("--eps", eps_override, "override convergence threshold");
    run_cmd->add_option("--seed", seed_override, "override heading seed");
    run_cmd->add_option("--integrator", integrator_name, "euler or rk4")
        ->check(CLI::IsMember({"euler", "rk4"}));

    CLI::App* certify_cmd =
        app.add_subcommand("certify", "print the stability certificate for a scenario");
    certify_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "run a scenario across a range of one parameter");
    sweep_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    sweep_cmd->add_option("--param", param_name, "parameter to sweep")
        ->required()
        ->check(CLI::IsMember({"dt", "k12", "k21", "seed", "target-angle"}));
    sweep_cmd->add_option("--values", values_text, "comma-separated values");
    sweep_cmd->add_option("--from", range_from, "range start (with --to and --count)");
    sweep_cmd->add_option("--to", range_to, "range end (with --from and --count)");
    sweep_cmd->add_option("--count", range_count, "number of evenly spaced values");
    sweep_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--integrator", integrator_name, "euler or rk4")
        ->check(CLI::IsMember({"euler", "rk4"}));
    sweep_cmd->add_option("--output-dir", output_dir,
                          "output directory (default: $NETPOINT_OUTPUT_DIR, else current dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    const IntegratorKind integrator =
        integrator_name == "rk4" ? IntegratorKind::rk4 : IntegratorKind::euler;

    try {
        if (run_cmd->parsed()) {
            RunCommandOptions opts;
            opts.scenario_path = scenario_path;
            opts.output_dir = detail::resolve_output_dir(output_dir);
            opts.dt = dt_override;
            opts.t_final = t_final_override;
            opts.eps = eps_override;
            opts.seed = seed_override;
            opts.integrator = integrator;
            return cmd_run(opts);
        }
        if (certify_cmd->parsed()) {
            return cmd_certify(scenario_path);
        }
        if (sweep_cmd->parsed()) {
            const bool has_values = sweep_cmd->count("--values") > 0;
            const bool has_range = range_from.has_value() || range_to.has_value() ||
                                   sweep_cmd->count("--count") > 0;
            if (has_values == has_range) {
                throw Error(ErrorCode::invalid_input,
                            "sweep: provide exactly one of --values or --from/--to/--count");
            }
            SweepCommandOptions opts;
            opts.scenario_path = scenario_path;
            opts.output_dir = detail::resolve_output_dir(output_dir);
            opts.param = sweep_param_from_name(param_name);
            opts.integrator = integrator;
            opts.jobs = jobs;
            if (has_values) {
                opts.values = detail::parse_value_list(values_text);
            } else {
                if (!range_from || !range_to || sweep_cmd->count("--count") == 0) {
                    throw Error(ErrorCode::invalid_input,
                                "sweep: --from, --to, and --count must be given together");
                }
                opts.values = detail::linspace(*range_from, *range_to, range_count);
            }
            return cmd_sweep(opts);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
    return exit_usage;
}

} // namespace netpoint::cli
