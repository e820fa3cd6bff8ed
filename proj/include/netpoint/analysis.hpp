#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "netpoint/errors.hpp"
#include "netpoint/estimator.hpp"
#include "netpoint/geometry.hpp"
#include "netpoint/matrix.hpp"
#include "netpoint/scenario.hpp"
#include "netpoint/topology.hpp"

namespace netpoint {

/// True when the two sensing agents see the target along sufficiently
/// non-parallel rays, i.e. |sin(theta1 - theta2)| exceeds the tolerance.
/// Parallel (or anti-parallel) rays leave the along-ray component of the
/// target position unobservable.
inline bool localizability_check(Vec2 sa1_position, Vec2 sa2_position, Vec2 target,
                                 double tol = 1e-6) {
    if (!(tol >= 0.0) || !std::isfinite(tol)) {
        throw Error(ErrorCode::invalid_input, "localizability_check: tol must be nonnegative");
    }
    const double theta1 = bearing_angle(bearing(sa1_position, target));
    const double theta2 = bearing_angle(bearing(sa2_position, target));
    return std::fabs(std::sin(theta1 - theta2)) > tol;
}

/// Monic characteristic polynomial of the 4x4 sensing-agent error system for
/// frozen bearing angles, returned as coefficients [c0..c4] of
/// c0*s^4 + c1*s^3 + c2*s^2 + c3*s + c4 with c0 = 1.
inline std::array<double, 5> characteristic_polynomial(double k12, double k21,
                                                       double theta1, double theta2) {
    if (!(k12 > 0.0) || !(k21 > 0.0) || !std::isfinite(k12) || !std::isfinite(k21)) {
        throw Error(ErrorCode::invalid_input,
                    "characteristic_polynomial: gains must be positive finite");
    }
    if (!std::isfinite(theta1) || !std::isfinite(theta2)) {
        throw Error(ErrorCode::invalid_input,
                    "characteristic_polynomial: angles must be finite");
    }
    const double s = std::sin(theta1 - theta2);
    const double sum = k12 + k21;
    const double sq = k12 * k12 + k21 * k21 + 2.0 * k12 * k21;
    return {1.0,
            2.0 * sum + 2.0,
            sq + 3.0 * sum + 1.0,
            sq + sum,
            k12 * k21 * s * s};
}

namespace detail {

/// Determinant by Gaussian elimination with partial pivoting. Intended for
/// the small dense matrices produced by the stability checks.
inline double determinant(Matrix a) {
    const std::size_t n = a.rows();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::fabs(a(row, col)) > std::fabs(a(pivot, col))) pivot = row;
        }
        if (a(pivot, col) == 0.0) return 0.0;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
            det = -det;
        }
        det *= a(col, col);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double factor = a(row, col) / a(col, col);
            for (std::size_t c = col; c < n; ++c) a(row, c) -= factor * a(col, c);
        }
    }
    return det;
}

} // namespace detail

/// Routh-Hurwitz stability test for a monic quartic: all roots lie strictly
/// in the open left half-plane iff every leading principal minor of the 4x4
/// Hurwitz matrix is positive. Requires coefficients [c0..c4] with c0 == 1.
inline bool hurwitz_test(std::span<const double> coeffs) {
    if (coeffs.size() != 5) {
        throw Error(ErrorCode::invalid_input,
                    "hurwitz_test: expected 5 coefficients, got " +
                        std::to_string(coeffs.size()));
    }
    for (double c : coeffs) {
        if (!std::isfinite(c)) {
            throw Error(ErrorCode::invalid_input, "hurwitz_test: non-finite coefficient");
        }
    }
    if (coeffs[0] != 1.0) {
        throw Error(ErrorCode::invalid_input, "hurwitz_test: polynomial must be monic");
    }
    // Hurwitz matrix H(i, j) = c[2j - i] (1-indexed), entries outside 0..4 are zero.
    Matrix h(4, 4);
    for (int i = 1; i <= 4; ++i) {
        for (int j = 1; j <= 4; ++j) {
            const int k = 2 * j - i;
            if (k >= 0 && k <= 4) h(i - 1, j - 1) = coeffs[static_cast<std::size_t>(k)];
        }
    }
    for (std::size_t order = 1; order <= 4; ++order) {
        Matrix minor(order, order);
        for (std::size_t i = 0; i < order; ++i) {
            for (std::size_t j = 0; j < order; ++j) minor(i, j) = h(i, j);
        }
        if (!(detail::determinant(std::move(minor)) > 0.0)) return false;
    }
    return true;
}

/// Real parts of all eigenvalues of a small square matrix, sorted ascending.
/// Capped at dimension 16; the stability pipeline only ever needs the 4x4
/// sensing-agent system and the reduced consensus matrix.
inline std::vector<double> eigen_real_parts(const Matrix& m) {
    if (!m.square() || m.rows() == 0) {
        throw Error(ErrorCode::invalid_input, "eigen_real_parts: need a nonempty square matrix");
    }
    if (m.rows() > 16) {
        throw Error(ErrorCode::invalid_input,
                    "eigen_real_parts: dimension " + std::to_string(m.rows()) +
                        " exceeds supported maximum of 16");
    }
    if (!m.all_finite()) {
        throw Error(ErrorCode::invalid_input, "eigen_real_parts: non-finite entry");
    }
    const std::size_t n = m.rows();
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::eigensolver_failure, "eigen_real_parts: iteration did not converge");
    }
    std::vector<double> real_parts(n);
    for (std::size_t i = 0; i < n; ++i) {
        real_parts[i] = solver.eigenvalues()[static_cast<Eigen::Index>(i)].real();
    }
    std::sort(real_parts.begin(), real_parts.end());
    return real_parts;
}

/// True when the fused-input consensus layer converges: the connectivity
/// assumption holds and every eigenvalue of L + diag(b_f) has strictly
/// positive real part.
inline bool nsa_convergence_check(const ReducedGraph& reduced) {
    if (!assumption2_certificate(reduced).satisfied) return false;
    const std::vector<double> re = eigen_real_parts(reduced.laplacian + reduced.b_f_diag);
    return re.front() > 0.0;
}

/// Everything the stability pipeline can say about a scenario before
/// integrating it.
struct StabilityCertificate {
    bool localizable = false;
    std::array<double, 5> char_poly_coeffs{};
    bool hurwitz_stable = false;
    std::array<double, 4> eigen_real_parts{};
    Assumption2Report assumption2;
    bool nsa_ok = false;
    bool overall = false;
};

inline StabilityCertificate certify(const Scenario& scenario) {
    scenario.validate();
    StabilityCertificate cert;
    const Vec2 p1 = scenario.agents[0].position;
    const Vec2 p2 = scenario.agents[1].position;
    const double k12 = scenario.topology.k12;
    const double k21 = scenario.topology.k21;

    cert.localizable = localizability_check(p1, p2, scenario.target);
    const double theta1 = bearing_angle(bearing(p1, scenario.target));
    const double theta2 = bearing_angle(bearing(p2, scenario.target));
    cert.char_poly_coeffs = characteristic_polynomial(k12, k21, theta1, theta2);
    cert.hurwitz_stable = hurwitz_test(cert.char_poly_coeffs);
    const std::vector<double> re =
        eigen_real_parts(sa_error_system_matrix(k12, k21, theta1, theta2));
    std::copy(re.begin(), re.end(), cert.eigen_real_parts.begin());

    const ReducedGraph reduced = fusion_reduce(scenario.topology);
    cert.assumption2 = assumption2_certificate(reduced);
    cert.nsa_ok = nsa_convergence_check(reduced);

    cert.overall = cert.localizable && cert.hurwitz_stable && cert.nsa_ok;
    return cert;
}

} // namespace netpoint
