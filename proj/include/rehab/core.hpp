#pragma once

// Shared geometric and sensory value types.
//
// Coordinates are sensor space: meters, right-handed, y up, the depth sensor
// at the origin looking along +z.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace rehab {

/// Sensor working envelope along the viewing axis.
inline constexpr double kMinDepth = 0.5;
inline constexpr double kMaxDepth = 5.0;

/// Nominal frame period at ~30 fps.
inline constexpr std::int64_t kFramePeriodUs = 33'333;

class Vec3 {
public:
    constexpr Vec3() = default;
    constexpr Vec3(double x, double y, double z) : x_(x), y_(y), z_(z) {
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
            throw std::domain_error("Vec3: non-finite component");
        }
    }

    constexpr double x() const { return x_; }
    constexpr double y() const { return y_; }
    constexpr double z() const { return z_; }

    friend constexpr Vec3 operator+(const Vec3& a, const Vec3& b) {
        return {a.x_ + b.x_, a.y_ + b.y_, a.z_ + b.z_};
    }
    friend constexpr Vec3 operator-(const Vec3& a, const Vec3& b) {
        return {a.x_ - b.x_, a.y_ - b.y_, a.z_ - b.z_};
    }
    friend constexpr Vec3 operator*(const Vec3& a, double s) { return {a.x_ * s, a.y_ * s, a.z_ * s}; }
    friend constexpr Vec3 operator*(double s, const Vec3& a) { return a * s; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

    constexpr double dot(const Vec3& o) const { return x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y_ * o.z_ - z_ * o.y_, z_ * o.x_ - x_ * o.z_, x_ * o.y_ - y_ * o.x_};
    }
    double norm() const { return std::sqrt(dot(*this)); }

private:
    double x_ = 0.0;
    double y_ = 0.0;
    double z_ = 0.0;
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// A point on the horizontal table plane.
struct PlanePoint {
    double x = 0.0;
    double z = 0.0;
    friend constexpr bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

inline double distance(const PlanePoint& a, const PlanePoint& b) { return std::hypot(a.x - b.x, a.z - b.z); }

enum class JointId { ShoulderRight, ElbowRight, WristRight, HandRight, SpineBase, Head };

inline constexpr std::array<JointId, 6> kAllJoints = {JointId::ShoulderRight, JointId::ElbowRight,
                                                       JointId::WristRight,    JointId::HandRight,
                                                       JointId::SpineBase,     JointId::Head};

constexpr std::string_view to_string(JointId j) {
    switch (j) {
        case JointId::ShoulderRight: return "shoulder_right";
        case JointId::ElbowRight:    return "elbow_right";
        case JointId::WristRight:    return "wrist_right";
        case JointId::HandRight:     return "hand_right";
        case JointId::SpineBase:     return "spine_base";
        case JointId::Head:          return "head";
    }
    return "?";
}

inline std::optional<JointId> joint_from_string(std::string_view name) {
    for (JointId j : kAllJoints) {
        if (to_string(j) == name) return j;
    }
    return std::nullopt;
}

enum class HandState { Open, Closed, Unknown };

constexpr std::string_view to_string(HandState h) {
    switch (h) {
        case HandState::Open:    return "open";
        case HandState::Closed:  return "closed";
        case HandState::Unknown: return "unknown";
    }
    return "?";
}

inline std::optional<HandState> hand_state_from_string(std::string_view s) {
    if (s == "open") return HandState::Open;
    if (s == "closed") return HandState::Closed;
    if (s == "unknown") return HandState::Unknown;
    return std::nullopt;
}

using JointMap = std::map<JointId, Vec3>;

struct SkeletonFrame {
    std::int64_t timestamp_us = 0;
    JointMap joints;
    HandState right_hand_state = HandState::Unknown;
    bool tracked = false;

    std::optional<Vec3> joint(JointId j) const {
        auto it = joints.find(j);
        if (it == joints.end()) return std::nullopt;
        return it->second;
    }

    friend bool operator==(const SkeletonFrame&, const SkeletonFrame&) = default;
};

enum class FrameRule { NonMonotonicTimestamp, OutOfRangeJoint, MissingRequiredJoint };

constexpr std::string_view to_string(FrameRule r) {
    switch (r) {
        case FrameRule::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
        case FrameRule::OutOfRangeJoint:       return "OutOfRangeJoint";
        case FrameRule::MissingRequiredJoint:  return "MissingRequiredJoint";
    }
    return "?";
}

struct FrameRejection {
    FrameRule rule;
    std::string detail;
};

/// A frame that has passed validate_frame. Only validate_frame constructs one.
class ValidFrame {
public:
    const SkeletonFrame& get() const { return frame_; }
    const SkeletonFrame* operator->() const { return &frame_; }
    Vec3 hand() const { return frame_.joints.at(JointId::HandRight); }

private:
    explicit ValidFrame(SkeletonFrame f) : frame_(std::move(f)) {}
    friend std::variant<ValidFrame, FrameRejection> validate_frame(SkeletonFrame, std::optional<std::int64_t>);
    SkeletonFrame frame_;
};

using FrameCheck = std::variant<ValidFrame, FrameRejection>;

/// Accepts a frame iff its timestamp does not go backwards and, when tracked,
/// it carries HandRight and every joint lies inside the depth envelope.
inline FrameCheck validate_frame(SkeletonFrame frame, std::optional<std::int64_t> prev_timestamp) {
    if (prev_timestamp && frame.timestamp_us < *prev_timestamp) {
        return FrameRejection{FrameRule::NonMonotonicTimestamp,
                              "timestamp " + std::to_string(frame.timestamp_us) + " precedes " +
                                  std::to_string(*prev_timestamp)};
    }
    if (frame.tracked) {
        if (!frame.joints.contains(JointId::HandRight)) {
            return FrameRejection{FrameRule::MissingRequiredJoint, "tracked frame lacks hand_right"};
        }
        for (const auto& [id, p] : frame.joints) {
            if (p.z() < kMinDepth || p.z() > kMaxDepth) {
                return FrameRejection{FrameRule::OutOfRangeJoint,
                                      std::string(to_string(id)) + " z=" + std::to_string(p.z()) +
                                          " outside [0.5, 5.0]"};
            }
        }
    }
    return ValidFrame(std::move(frame));
}

inline bool is_valid(const FrameCheck& c) { return std::holds_alternative<ValidFrame>(c); }

/// Static scene: a table in front of the player with the ball and target on it.
struct SceneConfig {
    double table_height = -0.10;
    PlanePoint table_center{0.0, 1.50};
    PlanePoint table_extent{0.60, 0.35};  // half-sizes in x and z
    double ball_radius = 0.04;
    Vec3 ball_home{0.25, -0.06, 1.50};
    PlanePoint target_center{-0.25, 1.50};
    double grab_radius = 0.10;
    double hover_offset = 0.08;  // pointer input hand height above the table

    double min_x() const { return table_center.x - table_extent.x; }
    double max_x() const { return table_center.x + table_extent.x; }
    double min_z() const { return table_center.z - table_extent.z; }
    double max_z() const { return table_center.z + table_extent.z; }

    bool on_table(PlanePoint p) const { return p.x >= min_x() && p.x <= max_x() && p.z >= min_z() && p.z <= max_z(); }

    PlanePoint clamp_to_table(PlanePoint p) const {
        return {std::clamp(p.x, min_x(), max_x()), std::clamp(p.z, min_z(), max_z())};
    }

    friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

/// Throws std::invalid_argument naming the first broken scene invariant.
inline void check(const SceneConfig& s) {
    if (!(s.ball_radius > 0)) throw std::invalid_argument("scene: ball_radius must be > 0");
    if (!(s.grab_radius > 0)) throw std::invalid_argument("scene: grab_radius must be > 0");
    if (!(s.table_extent.x > 0) || !(s.table_extent.z > 0))
        throw std::invalid_argument("scene: table_extent must be positive");
    if (std::abs(s.ball_home.y() - (s.table_height + s.ball_radius)) > 1e-9)
        throw std::invalid_argument("scene: ball_home must rest on the table (y = table_height + ball_radius)");
    if (!s.on_table({s.ball_home.x(), s.ball_home.z()}))
        throw std::invalid_argument("scene: ball_home outside table_extent");
    if (!s.on_table(s.target_center)) throw std::invalid_argument("scene: target_center outside table_extent");
    if (!(s.hover_offset >= 0)) throw std::invalid_argument("scene: hover_offset must be >= 0");
}

}  // namespace rehab
