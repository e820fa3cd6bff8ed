#pragma once

#include <cmath>
#include <string>

#include "netpoint/errors.hpp"

namespace netpoint {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Below this separation a bearing between two points is considered undefined.
inline constexpr double kMinSeparation = 1e-9;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }

    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    /// Scalar 2-D cross product x*o.y - y*o.x.
    constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

/// Unit-length direction vector. Construction always renormalizes; inputs with
/// norm below 1e-12 are rejected rather than producing garbage directions.
class UnitVec2 {
public:
    explicit UnitVec2(Vec2 v) {
        if (!v.finite()) {
            throw Error(ErrorCode::invalid_input, "UnitVec2: non-finite components");
        }
        const double n = v.norm();
        if (n < 1e-12) {
            throw Error(ErrorCode::invalid_input,
                        "UnitVec2: near-zero vector (norm " + std::to_string(n) + ")");
        }
        v_ = {v.x / n, v.y / n};
    }

    UnitVec2(double x, double y) : UnitVec2(Vec2{x, y}) {}

    double x() const { return v_.x; }
    double y() const { return v_.y; }
    Vec2 vec() const { return v_; }

    constexpr double dot(const UnitVec2& o) const { return v_.dot(o.v_); }
    constexpr double cross(const UnitVec2& o) const { return v_.cross(o.v_); }

private:
    Vec2 v_;
};

/// 2x2 real matrix, row-major.
struct Mat2 {
    double m00 = 0.0, m01 = 0.0;
    double m10 = 0.0, m11 = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    constexpr Mat2 operator+(const Mat2& o) const {
        return {m00 + o.m00, m01 + o.m01, m10 + o.m10, m11 + o.m11};
    }
    constexpr Mat2 operator-(const Mat2& o) const {
        return {m00 - o.m00, m01 - o.m01, m10 - o.m10, m11 - o.m11};
    }
    constexpr Mat2 operator*(const Mat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }
    constexpr Vec2 operator*(Vec2 v) const {
        return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y};
    }
    constexpr Mat2 transpose() const { return {m00, m10, m01, m11}; }
    constexpr double trace() const { return m00 + m11; }
    bool finite() const {
        return std::isfinite(m00) && std::isfinite(m01) && std::isfinite(m10) &&
               std::isfinite(m11);
    }
};

/// Heading unit vector [cos phi, sin phi] for a heading angle phi.
inline UnitVec2 heading_from_angle(double phi) {
    if (!std::isfinite(phi)) {
        throw Error(ErrorCode::invalid_input, "heading_from_angle: non-finite angle");
    }
    return UnitVec2(std::cos(phi), std::sin(phi));
}

/// Orthogonal projection onto the subspace perpendicular to u: I - u u^T.
/// Symmetric, idempotent, annihilates u.
inline Mat2 projection_matrix(const UnitVec2& u) {
    const double ux = u.x();
    const double uy = u.y();
    return {1.0 - ux * ux, -ux * uy,
            -ux * uy, 1.0 - uy * uy};
}

/// Unit bearing vector from p toward q. Undefined (throws) when the points are
/// closer than min_separation.
inline UnitVec2 bearing(Vec2 p, Vec2 q, double min_separation = kMinSeparation) {
    if (!p.finite() || !q.finite()) {
        throw Error(ErrorCode::invalid_input, "bearing: non-finite point");
    }
    const Vec2 r = q - p;
    if (r.norm() < min_separation) {
        throw Error(ErrorCode::degenerate_bearing,
                    "bearing undefined: points separated by less than " +
                        std::to_string(min_separation));
    }
    return UnitVec2(r);
}

/// Wraps an angle into [0, 2*pi).
inline double normalize_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    // fmod can land exactly on 2*pi after the correction of a tiny negative
    if (r >= kTwoPi) {
        r = 0.0;
    }
    return r;
}

/// Angle of a unit vector measured from the +x axis, in [0, 2*pi).
inline double bearing_angle(const UnitVec2& z) {
    return normalize_angle(std::atan2(z.y(), z.x()));
}

} // namespace netpoint
