#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "netpoint/analysis.hpp"
#include "netpoint/controller.hpp"
#include "netpoint/errors.hpp"
#include "netpoint/estimator.hpp"
#include "netpoint/geometry.hpp"
#include "netpoint/scenario.hpp"

namespace netpoint {

enum class IntegratorKind { euler, rk4 };

inline std::string to_string(IntegratorKind kind) {
    return kind == IntegratorKind::euler ? "euler" : "rk4";
}

/// Any estimate component beyond this magnitude aborts the run as divergent.
inline constexpr double kDivergenceLimit = 1e12;

struct SimState {
    double t = 0.0;
    std::vector<Vec2> estimates;
    std::vector<UnitVec2> headings;
};

/// Deterministic heading angles in [0, 2*pi): one 64-bit Mersenne Twister
/// draw per agent, mapped through the top 53 bits so every platform produces
/// identical doubles. Slot i always belongs to agent i+1, whether or not that
/// agent overrides its heading.
inline std::vector<double> random_headings(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    std::vector<double> angles(count);
    for (double& angle : angles) {
        const std::uint64_t bits = rng();
        angle = static_cast<double>(bits >> 11) * 0x1.0p-53 * kTwoPi;
    }
    return angles;
}

/// Builds the t = 0 state: estimates default to each agent's own position,
/// headings come from the scenario or the seeded draw. A heading that starts
/// exactly opposite its reference direction (the estimate offset when the
/// estimate differs from the agent position, otherwise the true bearing to
/// the target) sits on a stalled equilibrium of the pointing law, so it is
/// nudged by 1e-6 rad to break the tie deterministically.
inline SimState initial_state(const Scenario& scenario) {
    scenario.validate();
    const std::size_t n = scenario.agents.size();
    const std::vector<double> angles = random_headings(scenario.seed, n);
    SimState state;
    state.t = 0.0;
    state.estimates.reserve(n);
    state.headings.reserve(n);
    for (const AgentSpec& agent : scenario.agents) {
        state.estimates.push_back(agent.initial_estimate ? *agent.initial_estimate
                                                         : agent.position);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const AgentSpec& agent = scenario.agents[i];
        const double angle = agent.initial_heading_rad ? *agent.initial_heading_rad : angles[i];
        UnitVec2 heading = heading_from_angle(angle);
        const Vec2 offset = state.estimates[i] - agent.position;
        const Vec2 reference =
            offset.norm() >= kMinSeparation ? offset : scenario.target - agent.position;
        const UnitVec2 reference_dir{reference};
        const double separation =
            std::atan2(std::fabs(heading.cross(reference_dir)), heading.dot(reference_dir));
        if (separation > kPi - 1e-9) {
            heading = heading_from_angle(angle + 1e-6);
        }
        state.headings.push_back(heading);
    }
    return state;
}

namespace detail {

struct Derivatives {
    std::vector<Vec2> est;
    std::vector<Vec2> head;
};

/// Simultaneous derivatives of all estimates and headings at one state. The
/// sensing geometry is static, so the measured bearings depend only on the
/// scenario, not on the evolving state.
inline Derivatives derivatives(const std::vector<Vec2>& estimates,
                               const std::vector<UnitVec2>& headings,
                               const Scenario& scenario) {
    const std::size_t n = estimates.size();
    const Vec2 p1 = scenario.agents[0].position;
    const Vec2 p2 = scenario.agents[1].position;
    const UnitVec2 z1 = bearing(p1, scenario.target);
    const UnitVec2 z2 = bearing(p2, scenario.target);
    Derivatives d;
    d.est.resize(n);
    d.head.reserve(n);
    d.est[0] = sa_derivative(estimates[0], estimates[1], scenario.topology.k12, z1, p1);
    d.est[1] = sa_derivative(estimates[1], estimates[0], scenario.topology.k21, z2, p2);
    const EstimatorState est_state{estimates};
    for (int id = 3; id <= static_cast<int>(n); ++id) {
        d.est[static_cast<std::size_t>(id - 1)] = nsa_derivative(id, est_state, scenario.topology);
    }
    for (std::size_t i = 0; i < n; ++i) {
        d.head.push_back(
            heading_derivative(headings[i], estimates[i], scenario.agents[i].position));
    }
    return d;
}

/// One Euler-style displacement from a base state. Heading rates are tangent
/// to the unit circle, so the displaced heading can only grow in norm; the
/// unit-vector constructor renormalizes it back onto the circle.
inline void displace(const SimState& base, const Derivatives& d, double h,
                     std::vector<Vec2>& est_out, std::vector<UnitVec2>& head_out) {
    const std::size_t n = base.estimates.size();
    est_out.clear();
    head_out.clear();
    est_out.reserve(n);
    head_out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        est_out.push_back(base.estimates[i] + h * d.est[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 raw = base.headings[i].vec() + h * d.head[i];
        if (!raw.finite()) {
            throw Error(ErrorCode::divergence,
                        "heading update for agent " + std::to_string(i + 1) +
                            " produced a non-finite value at t=" + std::to_string(base.t));
        }
        head_out.push_back(UnitVec2{raw});
    }
}

} // namespace detail

/// Advances the whole network by one step of dt. All derivatives are taken
/// from the incoming state snapshot, then applied at once. Headings are
/// renormalized after the update; estimates are checked against the
/// divergence limit.
inline SimState step(const SimState& state, const Scenario& scenario, double dt,
                     IntegratorKind kind) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw Error(ErrorCode::invalid_input, "step: dt must be positive finite");
    }
    SimState next;
    next.t = state.t + dt;
    if (kind == IntegratorKind::euler) {
        const detail::Derivatives d = detail::derivatives(state.estimates, state.headings, scenario);
        detail::displace(state, d, dt, next.estimates, next.headings);
    } else {
        const detail::Derivatives k1 = detail::derivatives(state.estimates, state.headings, scenario);
        std::vector<Vec2> est;
        std::vector<UnitVec2> head;
        detail::displace(state, k1, dt / 2.0, est, head);
        const detail::Derivatives k2 = detail::derivatives(est, head, scenario);
        detail::displace(state, k2, dt / 2.0, est, head);
        const detail::Derivatives k3 = detail::derivatives(est, head, scenario);
        detail::displace(state, k3, dt, est, head);
        const detail::Derivatives k4 = detail::derivatives(est, head, scenario);
        detail::Derivatives combined;
        const std::size_t n = state.estimates.size();
        combined.est.resize(n);
        combined.head.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            combined.est[i] =
                (1.0 / 6.0) * (k1.est[i] + 2.0 * k2.est[i] + 2.0 * k3.est[i] + k4.est[i]);
            combined.head[i] =
                (1.0 / 6.0) * (k1.head[i] + 2.0 * k2.head[i] + 2.0 * k3.head[i] + k4.head[i]);
        }
        detail::displace(state, combined, dt, next.estimates, next.headings);
    }
    for (std::size_t i = 0; i < next.estimates.size(); ++i) {
        const Vec2& q = next.estimates[i];
        if (!q.finite() || std::fabs(q.x) > kDivergenceLimit || std::fabs(q.y) > kDivergenceLimit) {
            throw Error(ErrorCode::divergence,
                        "estimate of agent " + std::to_string(i + 1) +
                            " diverged at t=" + std::to_string(next.t));
        }
    }
    return next;
}

/// Full trace of one run: per-agent estimation and pointing errors at every
/// sample, the pre-run stability certificate, and the first time the whole
/// network stayed inside the convergence band.
struct SimTrace {
    std::vector<double> times;
    std::vector<std::vector<double>> est_err;   // [agent][sample], distance to target
    std::vector<std::vector<double>> point_err; // [agent][sample], radians
    std::optional<double> converged_at;
    StabilityCertificate certificate;
    std::vector<Vec2> final_estimates;
    std::vector<Vec2> final_headings;
};

struct RunOptions {
    IntegratorKind integrator = IntegratorKind::euler;
    std::function<void(const SimState&)> observer; // called at every recorded sample
};

inline SimTrace run(const Scenario& scenario, const RunOptions& options = {}) {
    SimTrace trace;
    trace.certificate = certify(scenario);
    SimState state = initial_state(scenario);
    const long n_steps = static_cast<long>(std::floor(scenario.t_final / scenario.dt + 1e-9));
    const std::size_t n = scenario.agents.size();
    trace.est_err.assign(n, {});
    trace.point_err.assign(n, {});

    const auto record = [&](const SimState& s) {
        trace.times.push_back(s.t);
        for (std::size_t i = 0; i < n; ++i) {
            trace.est_err[i].push_back((scenario.target - s.estimates[i]).norm());
            trace.point_err[i].push_back(
                pointing_error(s.headings[i], scenario.agents[i].position, scenario.target));
        }
        if (options.observer) options.observer(s);
    };

    record(state);
    for (long k = 1; k <= n_steps; ++k) {
        state = step(state, scenario, scenario.dt, options.integrator);
        state.t = static_cast<double>(k) * scenario.dt; // exact grid, no additive drift
        record(state);
    }

    const std::size_t samples = trace.times.size();
    int run_length = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, trace.est_err[i][s]);
            worst = std::max(worst, trace.point_err[i][s]);
        }
        run_length = worst < scenario.convergence_eps ? run_length + 1 : 0;
        if (run_length >= scenario.convergence_hold) {
            trace.converged_at = trace.times[s + 1 - static_cast<std::size_t>(scenario.convergence_hold)];
            break;
        }
    }

    trace.final_estimates = state.estimates;
    trace.final_headings.reserve(n);
    for (const UnitVec2& h : state.headings) trace.final_headings.push_back(h.vec());
    return trace;
}

} // namespace netpoint
