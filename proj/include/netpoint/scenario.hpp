#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netpoint/errors.hpp"
#include "netpoint/geometry.hpp"
#include "netpoint/matrix.hpp"
#include "netpoint/topology.hpp"

namespace netpoint {

enum class AgentRole { sa, nsa };

inline std::string to_string(AgentRole role) {
    return role == AgentRole::sa ? "SA" : "NSA";
}

struct AgentSpec {
    int id = 0;
    AgentRole role = AgentRole::nsa;
    Vec2 position{0.0, 0.0};
    std::optional<double> initial_heading_rad; // nullopt: drawn from the run seed
    std::optional<Vec2> initial_estimate;      // nullopt: agent's own position
};

/// Complete description of one simulation run: agents, target, communication
/// topology, integration window, and convergence thresholds.
struct Scenario {
    std::vector<AgentSpec> agents;
    Vec2 target{0.0, 0.0};
    Topology topology;
    double dt = 0.1;
    double t_final = 60.0;
    std::uint64_t seed = 42;
    double convergence_eps = 1e-3;
    int convergence_hold = 10;

    int agent_count() const { return static_cast<int>(agents.size()); }

    void validate() const {
        const int n = agent_count();
        if (n < 3) {
            throw Error(ErrorCode::invariant_violation,
                        "scenario: need at least 3 agents, got " + std::to_string(n));
        }
        if (!target.finite()) {
            throw Error(ErrorCode::invariant_violation, "scenario: target must be finite");
        }
        for (int i = 0; i < n; ++i) {
            const AgentSpec& agent = agents[static_cast<std::size_t>(i)];
            if (agent.id != i + 1) {
                throw Error(ErrorCode::invariant_violation,
                            "scenario: agent ids must be exactly 1.." + std::to_string(n));
            }
            const AgentRole expected = agent.id <= 2 ? AgentRole::sa : AgentRole::nsa;
            if (agent.role != expected) {
                throw Error(ErrorCode::invariant_violation,
                            "scenario: agent " + std::to_string(agent.id) + " must have role " +
                                to_string(expected));
            }
            if (!agent.position.finite()) {
                throw Error(ErrorCode::invariant_violation,
                            "scenario: agent " + std::to_string(agent.id) +
                                " position must be finite");
            }
            if (agent.initial_heading_rad && !std::isfinite(*agent.initial_heading_rad)) {
                throw Error(ErrorCode::invariant_violation,
                            "scenario: agent " + std::to_string(agent.id) +
                                " initial heading must be finite");
            }
            if (agent.initial_estimate && !agent.initial_estimate->finite()) {
                throw Error(ErrorCode::invariant_violation,
                            "scenario: agent " + std::to_string(agent.id) +
                                " initial estimate must be finite");
            }
            if ((target - agent.position).norm() < kMinSeparation) {
                throw Error(ErrorCode::degenerate_bearing,
                            "scenario: agent " + std::to_string(agent.id) +
                                " coincides with the target");
            }
        }
        if (topology.n != n) {
            throw Error(ErrorCode::invariant_violation,
                        "scenario: topology describes " + std::to_string(topology.n) +
                            " agents but " + std::to_string(n) + " are listed");
        }
        topology.validate();
        if (!(dt > 0.0) || !std::isfinite(dt)) {
            throw Error(ErrorCode::invariant_violation, "scenario: dt must be positive finite");
        }
        if (!(t_final >= dt) || !std::isfinite(t_final)) {
            throw Error(ErrorCode::invariant_violation,
                        "scenario: t_final must be finite and at least dt");
        }
        if (!(convergence_eps > 0.0) || !std::isfinite(convergence_eps)) {
            throw Error(ErrorCode::invariant_violation,
                        "scenario: convergence_eps must be positive finite");
        }
        if (convergence_hold < 1) {
            throw Error(ErrorCode::invariant_violation,
                        "scenario: convergence_hold_steps must be at least 1");
        }
    }
};

namespace detail {

inline std::string key_path(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

[[noreturn]] inline void schema_fail(const std::string& path, const std::string& why) {
    throw Error(ErrorCode::schema_error, "scenario: \"" + path + "\" " + why);
}

inline void require_known_keys(const nlohmann::json& object, const std::string& parent,
                               std::initializer_list<const char*> allowed) {
    for (auto it = object.begin(); it != object.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw Error(ErrorCode::schema_error,
                        "scenario: unknown key \"" + key_path(parent, it.key()) + "\"");
        }
    }
}

inline const nlohmann::json& require_key(const nlohmann::json& object,
                                         const std::string& parent, const char* key) {
    const auto it = object.find(key);
    if (it == object.end()) {
        throw Error(ErrorCode::schema_error,
                    "scenario: missing key \"" + key_path(parent, key) + "\"");
    }
    return *it;
}

inline double as_number(const nlohmann::json& value, const std::string& path) {
    if (!value.is_number()) schema_fail(path, "must be a number");
    return value.get<double>();
}

inline Vec2 as_vec2(const nlohmann::json& value, const std::string& path) {
    if (!value.is_array() || value.size() != 2) schema_fail(path, "must be an [x, y] pair");
    return Vec2{as_number(value[0], path + "[0]"), as_number(value[1], path + "[1]")};
}

inline Matrix as_matrix(const nlohmann::json& value, const std::string& path,
                        std::size_t rows, std::size_t cols) {
    if (!value.is_array() || value.size() != rows) {
        schema_fail(path, "must be an array of " + std::to_string(rows) + " rows");
    }
    Matrix result(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const nlohmann::json& row = value[i];
        const std::string row_path = path + "[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != cols) {
            schema_fail(row_path, "must be an array of " + std::to_string(cols) + " numbers");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            result(i, j) = as_number(row[j], row_path + "[" + std::to_string(j) + "]");
        }
    }
    return result;
}

inline AgentSpec parse_agent(const nlohmann::json& value, std::size_t index) {
    const std::string path = "agents[" + std::to_string(index) + "]";
    if (!value.is_object()) schema_fail(path, "must be an object");
    require_known_keys(value, path,
                       {"id", "role", "position", "initial_heading_rad", "initial_estimate"});
    AgentSpec agent;
    const nlohmann::json& id = require_key(value, path, "id");
    if (!id.is_number_integer()) schema_fail(path + ".id", "must be an integer");
    agent.id = id.get<int>();
    const nlohmann::json& role = require_key(value, path, "role");
    if (!role.is_string()) schema_fail(path + ".role", "must be \"SA\" or \"NSA\"");
    if (const std::string role_text = role.get<std::string>(); role_text == "SA") {
        agent.role = AgentRole::sa;
    } else if (role_text == "NSA") {
        agent.role = AgentRole::nsa;
    } else {
        schema_fail(path + ".role", "must be \"SA\" or \"NSA\"");
    }
    agent.position = as_vec2(require_key(value, path, "position"), path + ".position");
    if (const auto it = value.find("initial_heading_rad"); it != value.end()) {
        if (it->is_string()) {
            if (it->get<std::string>() != "random") {
                schema_fail(path + ".initial_heading_rad", "must be a number or \"random\"");
            }
        } else {
            agent.initial_heading_rad = as_number(*it, path + ".initial_heading_rad");
        }
    }
    if (const auto it = value.find("initial_estimate"); it != value.end()) {
        if (it->is_string()) {
            if (it->get<std::string>() != "own-position") {
                schema_fail(path + ".initial_estimate", "must be [x, y] or \"own-position\"");
            }
        } else {
            agent.initial_estimate = as_vec2(*it, path + ".initial_estimate");
        }
    }
    return agent;
}

} // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& root) {
    if (!root.is_object()) {
        throw Error(ErrorCode::schema_error, "scenario: top level must be an object");
    }
    detail::require_known_keys(root, "",
                               {"agents", "target", "topology", "dt_seconds", "t_final_seconds",
                                "seed", "convergence_eps", "convergence_hold_steps"});
    Scenario scenario;
    const nlohmann::json& agents = detail::require_key(root, "", "agents");
    if (!agents.is_array()) detail::schema_fail("agents", "must be an array");
    for (std::size_t i = 0; i < agents.size(); ++i) {
        scenario.agents.push_back(detail::parse_agent(agents[i], i));
    }
    if (scenario.agents.size() < 3) {
        throw Error(ErrorCode::invariant_violation,
                    "scenario: need at least 3 agents, got " +
                        std::to_string(scenario.agents.size()));
    }
    std::stable_sort(scenario.agents.begin(), scenario.agents.end(),
                     [](const AgentSpec& a, const AgentSpec& b) { return a.id < b.id; });
    scenario.target = detail::as_vec2(detail::require_key(root, "", "target"), "target");

    const nlohmann::json& topology = detail::require_key(root, "", "topology");
    if (!topology.is_object()) detail::schema_fail("topology", "must be an object");
    detail::require_known_keys(topology, "topology", {"k12", "k21", "nsa_adjacency", "sa_input"});
    const std::size_t m = scenario.agents.size() - 2;
    scenario.topology.n = static_cast<int>(scenario.agents.size());
    scenario.topology.k12 = detail::as_number(detail::require_key(topology, "topology", "k12"),
                                              "topology.k12");
    scenario.topology.k21 = detail::as_number(detail::require_key(topology, "topology", "k21"),
                                              "topology.k21");
    scenario.topology.nsa_adjacency = detail::as_matrix(
        detail::require_key(topology, "topology", "nsa_adjacency"), "topology.nsa_adjacency", m, m);
    scenario.topology.sa_input = detail::as_matrix(
        detail::require_key(topology, "topology", "sa_input"), "topology.sa_input", m, 2);

    if (const auto it = root.find("dt_seconds"); it != root.end()) {
        scenario.dt = detail::as_number(*it, "dt_seconds");
    }
    if (const auto it = root.find("t_final_seconds"); it != root.end()) {
        scenario.t_final = detail::as_number(*it, "t_final_seconds");
    }
    if (const auto it = root.find("seed"); it != root.end()) {
        if (!it->is_number_integer()) detail::schema_fail("seed", "must be a nonnegative integer");
        if (!it->is_number_unsigned() && it->get<std::int64_t>() < 0) {
            detail::schema_fail("seed", "must be a nonnegative integer");
        }
        scenario.seed = it->get<std::uint64_t>();
    }
    if (const auto it = root.find("convergence_eps"); it != root.end()) {
        scenario.convergence_eps = detail::as_number(*it, "convergence_eps");
    }
    if (const auto it = root.find("convergence_hold_steps"); it != root.end()) {
        if (!it->is_number_integer()) {
            detail::schema_fail("convergence_hold_steps", "must be an integer");
        }
        scenario.convergence_hold = it->get<int>();
    }
    scenario.validate();
    return scenario;
}

inline Scenario parse_scenario(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t limit = std::min(static_cast<std::size_t>(e.byte), text.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') ++line;
        }
        throw Error(ErrorCode::parse_error,
                    "scenario: JSON parse failure at line " + std::to_string(line) + ": " +
                        e.what());
    }
    return scenario_from_json(root);
}

inline Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot open scenario file: " + file.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::io_error, "failed reading scenario file: " + file.string());
    }
    return parse_scenario(buffer.str());
}

} // namespace netpoint
