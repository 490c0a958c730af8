#pragma once

// Analytic two-bone IK for the display avatar's right arm.

#include <rehab/core.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rehab {

struct ArmChain {
    Vec3 shoulder;
    double l_upper = 0.30;
    double l_fore = 0.28;
    Vec3 pole_hint{0.0, -1.0, 0.0};  // elbow bends toward this side of the reach ray
};

struct ArmPose {
    Vec3 elbow;
    Vec3 hand;
    bool reached = false;
};

class IkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Unit vector orthogonal to `dir` on the pole side. Falls back to the world
/// axis least aligned with `dir` when the pole is (nearly) parallel to it.
inline Vec3 bend_direction(const Vec3& dir, const Vec3& pole) {
    Vec3 b = pole - dir * pole.dot(dir);
    if (b.norm() < 1e-9) {
        const double ax = std::abs(dir.x()), ay = std::abs(dir.y()), az = std::abs(dir.z());
        Vec3 axis = (ax <= ay && ax <= az) ? Vec3{1, 0, 0} : (ay <= az ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
        b = axis - dir * axis.dot(dir);
    }
    return b * (1.0 / b.norm());
}

}  // namespace detail

/// Places the elbow with the law of cosines in the plane of the reach ray and
/// the pole hint. Out-of-reach targets are clamped along the ray to the
/// nearest reachable distance.
inline ArmPose solve_arm(const ArmChain& chain, const Vec3& target) {
    if (!(chain.l_upper > 0) || !(chain.l_fore > 0)) throw IkError("solve_arm: bone lengths must be > 0");
    const Vec3 to_target = target - chain.shoulder;
    const double d_raw = to_target.norm();
    if (d_raw < 1e-12) throw IkError("DegenerateChain: target coincides with shoulder");

    constexpr double kEps = 1e-9;
    const double d_lo = std::abs(chain.l_upper - chain.l_fore) + kEps;
    const double d_hi = chain.l_upper + chain.l_fore;
    const double d = std::clamp(d_raw, d_lo, d_hi);
    const Vec3 dir = to_target * (1.0 / d_raw);
    const Vec3 bend = detail::bend_direction(dir, chain.pole_hint);

    // Shoulder angle between the reach ray and the upper arm.
    const double lu = chain.l_upper, lf = chain.l_fore;
    const double cos_a = std::clamp((lu * lu + d * d - lf * lf) / (2.0 * lu * d), -1.0, 1.0);
    const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));

    ArmPose pose;
    pose.elbow = chain.shoulder + dir * (lu * cos_a) + bend * (lu * sin_a);
    pose.reached = d_raw >= d_lo && d_raw <= d_hi;
    pose.hand = pose.reached ? target : chain.shoulder + dir * d;
    return pose;
}

/// Interior elbow angle, radians, for a chain extended to distance d.
inline double elbow_angle(double l_upper, double l_fore, double d) {
    return std::acos(std::clamp((l_upper * l_upper + l_fore * l_fore - d * d) / (2.0 * l_upper * l_fore), -1.0, 1.0));
}

}  // namespace rehab
