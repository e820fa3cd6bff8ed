#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "netpoint/analysis.hpp"
#include "netpoint/errors.hpp"
#include "netpoint/scenario.hpp"
#include "netpoint/sim.hpp"

namespace netpoint {

inline std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot open file: " + file.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::io_error, "failed reading file: " + file.string());
    }
    return buffer.str();
}

inline void write_file(const std::filesystem::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::io_error, "cannot open file for writing: " + file.string());
    }
    out << content;
    out.flush();
    if (!out) {
        throw Error(ErrorCode::io_error, "failed writing file: " + file.string());
    }
}

/// FNV-1a 64-bit digest of raw bytes, rendered "fnv1a64:<16 hex digits>".
/// Platform-independent: depends only on the byte sequence.
inline std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return std::string("fnv1a64:") + buffer;
}

/// Shortest decimal form that parses back to the identical double.
inline std::string format_full(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

inline std::string trace_to_csv(const SimTrace& trace) {
    const std::size_t n = trace.est_err.size();
    std::ostringstream out;
    out << "t";
    for (std::size_t i = 1; i <= n; ++i) out << ",est_err_" << i;
    for (std::size_t i = 1; i <= n; ++i) out << ",point_err_" << i;
    out << "\n";
    for (std::size_t s = 0; s < trace.times.size(); ++s) {
        out << format_full(trace.times[s]);
        for (std::size_t i = 0; i < n; ++i) out << "," << format_full(trace.est_err[i][s]);
        for (std::size_t i = 0; i < n; ++i) out << "," << format_full(trace.point_err[i][s]);
        out << "\n";
    }
    return out.str();
}

inline void write_trace_csv(const std::filesystem::path& file, const SimTrace& trace) {
    write_file(file, trace_to_csv(trace));
}

inline nlohmann::json certificate_to_json(const StabilityCertificate& cert) {
    nlohmann::json j;
    j["localizable"] = cert.localizable;
    j["char_poly_coeffs"] = cert.char_poly_coeffs;
    j["hurwitz_stable"] = cert.hurwitz_stable;
    j["eigen_real_parts"] = cert.eigen_real_parts;
    j["assumption2"] = {{"exists_positive_input", cert.assumption2.exists_positive_bf},
                        {"spanning_tree", cert.assumption2.spanning_tree},
                        {"satisfied", cert.assumption2.satisfied}};
    j["nsa_ok"] = cert.nsa_ok;
    j["overall"] = cert.overall;
    return j;
}

/// Everything one run leaves behind besides the trace itself.
struct RunSummary {
    std::string scenario_digest;
    StabilityCertificate certificate;
    std::optional<double> converged_at;
    double final_max_est_err = 0.0;
    double final_max_point_err = 0.0;
    double wall_time_seconds = 0.0;
    double dt = 0.0;
    double t_final = 0.0;
    double convergence_eps = 0.0;
    int convergence_hold = 0;
    std::uint64_t seed = 0;
    IntegratorKind integrator = IntegratorKind::euler;
};

inline RunSummary make_summary(const std::string& scenario_digest, const SimTrace& trace,
                               const Scenario& scenario, IntegratorKind integrator,
                               double wall_time_seconds) {
    RunSummary summary;
    summary.scenario_digest = scenario_digest;
    summary.certificate = trace.certificate;
    summary.converged_at = trace.converged_at;
    for (std::size_t i = 0; i < trace.est_err.size(); ++i) {
        summary.final_max_est_err = std::max(summary.final_max_est_err, trace.est_err[i].back());
        summary.final_max_point_err =
            std::max(summary.final_max_point_err, trace.point_err[i].back());
    }
    summary.wall_time_seconds = wall_time_seconds;
    summary.dt = scenario.dt;
    summary.t_final = scenario.t_final;
    summary.convergence_eps = scenario.convergence_eps;
    summary.convergence_hold = scenario.convergence_hold;
    summary.seed = scenario.seed;
    summary.integrator = integrator;
    return summary;
}

inline nlohmann::json summary_to_json(const RunSummary& summary) {
    nlohmann::json j;
    j["scenario_digest"] = summary.scenario_digest;
    j["certificate"] = certificate_to_json(summary.certificate);
    if (summary.converged_at) {
        j["converged_at"] = *summary.converged_at;
    } else {
        j["converged_at"] = nullptr;
    }
    j["final_max_est_err"] = summary.final_max_est_err;
    j["final_max_point_err"] = summary.final_max_point_err;
    j["wall_time_seconds"] = summary.wall_time_seconds;
    j["dt_seconds"] = summary.dt;
    j["t_final_seconds"] = summary.t_final;
    j["convergence_eps"] = summary.convergence_eps;
    j["convergence_hold_steps"] = summary.convergence_hold;
    j["seed"] = summary.seed;
    j["integrator"] = to_string(summary.integrator);
    j["pointing_error_units"] = "radians";
    return j;
}

} // namespace netpoint
