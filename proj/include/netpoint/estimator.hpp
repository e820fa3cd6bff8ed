#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "netpoint/errors.hpp"
#include "netpoint/geometry.hpp"
#include "netpoint/matrix.hpp"
#include "netpoint/topology.hpp"

namespace netpoint {

/// Current target estimates of all agents, indexed 0..n-1 for agents 1..n.
/// Agents 1 and 2 are the sensing agents; 3..n are non-sensing.
struct EstimatorState {
    std::vector<Vec2> estimates;
};

/// Estimate derivative for a sensing agent: a consensus pull toward the peer
/// SA's estimate plus a correction that projects the estimate-to-position
/// offset onto the plane orthogonal to the measured bearing. The correction
/// drives the estimate onto the agent's own line of sight while the consensus
/// term resolves the remaining along-ray ambiguity.
inline Vec2 sa_derivative(Vec2 own_estimate, Vec2 peer_estimate, double gain,
                          const UnitVec2& bearing_to_target, Vec2 position) {
    if (!(gain > 0.0) || !std::isfinite(gain)) {
        throw Error(ErrorCode::invalid_input, "sa_derivative: gain must be positive finite");
    }
    const Mat2 proj = projection_matrix(bearing_to_target);
    return gain * (peer_estimate - own_estimate) - proj * (own_estimate - position);
}

/// Estimate derivative for a non-sensing agent: weighted consensus over its
/// NSA neighbours plus direct input terms from each sensing agent. No bearing
/// information enters here; NSAs only fuse what the network carries.
inline Vec2 nsa_derivative(int agent_id, const EstimatorState& state,
                           const Topology& topology) {
    if (agent_id < 3 || agent_id > topology.n) {
        throw Error(ErrorCode::invalid_input,
                    "nsa_derivative: agent id " + std::to_string(agent_id) +
                        " is not a non-sensing agent (expected 3.." +
                        std::to_string(topology.n) + ")");
    }
    if (state.estimates.size() != static_cast<std::size_t>(topology.n)) {
        throw Error(ErrorCode::invalid_input,
                    "nsa_derivative: state holds " + std::to_string(state.estimates.size()) +
                        " estimates, topology expects " + std::to_string(topology.n));
    }
    const std::size_t row = static_cast<std::size_t>(agent_id - 3);
    const Vec2 own = state.estimates[static_cast<std::size_t>(agent_id - 1)];
    Vec2 rate{0.0, 0.0};
    const std::size_t m = static_cast<std::size_t>(topology.nsa_count());
    for (std::size_t j = 0; j < m; ++j) {
        const double a = topology.nsa_adjacency(row, j);
        if (a != 0.0) {
            rate += a * (state.estimates[j + 2] - own);
        }
    }
    rate += topology.sa_input(row, 0) * (state.estimates[0] - own);
    rate += topology.sa_input(row, 1) * (state.estimates[1] - own);
    return rate;
}

/// System matrix of the stacked SA estimation-error dynamics for frozen
/// bearing angles theta1/theta2. State order is [e1x, e1y, e2x, e2y] where
/// e_i is agent i's estimation error. Block form:
///
///   [ -k12*I - P1      k12*I     ]
///   [     k21*I    -k21*I - P2   ]
///
/// with P_i the orthogonal projection onto the complement of bearing i.
/// Gains of zero are accepted so the decoupled limit can be analyzed.
inline Matrix sa_error_system_matrix(double k12, double k21, double theta1,
                                     double theta2) {
    if (!(k12 >= 0.0) || !(k21 >= 0.0) || !std::isfinite(k12) || !std::isfinite(k21)) {
        throw Error(ErrorCode::invalid_input,
                    "sa_error_system_matrix: gains must be nonnegative finite");
    }
    if (!std::isfinite(theta1) || !std::isfinite(theta2)) {
        throw Error(ErrorCode::invalid_input,
                    "sa_error_system_matrix: angles must be finite");
    }
    const Mat2 p1 = projection_matrix(heading_from_angle(theta1));
    const Mat2 p2 = projection_matrix(heading_from_angle(theta2));
    Matrix h(4, 4);
    h(0, 0) = -k12 - p1.m00;
    h(0, 1) = -p1.m01;
    h(1, 0) = -p1.m10;
    h(1, 1) = -k12 - p1.m11;
    h(0, 2) = k12;
    h(1, 3) = k12;
    h(2, 0) = k21;
    h(3, 1) = k21;
    h(2, 2) = -k21 - p2.m00;
    h(2, 3) = -p2.m01;
    h(3, 2) = -p2.m10;
    h(3, 3) = -k21 - p2.m11;
    return h;
}

} // namespace netpoint
