#pragma once

#include <cmath>

#include "netpoint/errors.hpp"
#include "netpoint/geometry.hpp"

namespace netpoint {

/// Heading rate for the pointing law: the agent-to-estimate offset projected
/// onto the plane orthogonal to the current heading. The projection keeps the
/// rate tangent to the unit circle, so the continuous flow preserves unit
/// norm and turns the heading toward the estimated target.
inline Vec2 heading_derivative(const UnitVec2& heading, Vec2 estimate, Vec2 position) {
    return projection_matrix(heading) * (estimate - position);
}

/// Angle in [0, pi] between the heading and the true bearing from the agent
/// to the target. Uses atan2 of the cross/dot pair for full-range accuracy;
/// throws degenerate_bearing if the agent sits on the target.
inline double pointing_error(const UnitVec2& heading, Vec2 position, Vec2 target,
                             double min_separation = kMinSeparation) {
    const UnitVec2 z = bearing(position, target, min_separation);
    return std::atan2(std::fabs(heading.cross(z)), heading.dot(z));
}

} // namespace netpoint
