#pragma once

// Debounced grab/release detection from the right-hand state channel.

#include <rehab/core.hpp>

#include <stdexcept>

namespace rehab {

struct GestureConfig {
    int n_grab = 3;     // consecutive Closed frames near the ball to grab
    int n_release = 2;  // consecutive Open frames to release
    friend bool operator==(const GestureConfig&, const GestureConfig&) = default;
};

inline void check(const GestureConfig& c) {
    if (c.n_grab < 1 || c.n_release < 1) throw std::invalid_argument("gesture: n_grab and n_release must be >= 1");
}

enum class GestureMode { Released, Held };
enum class GestureEvent { None, Grab, Release };

struct GestureFsm {
    GestureMode mode = GestureMode::Released;
    int streak = 0;
    friend bool operator==(const GestureFsm&, const GestureFsm&) = default;
};

struct GestureStep {
    GestureFsm fsm;
    GestureEvent event = GestureEvent::None;
};

/// Advances the detector by one frame. Released mode counts Closed frames
/// within grab_radius of the ball; Held mode counts Open frames. Any other
/// frame, Unknown included, resets the streak without changing mode.
inline GestureStep gesture_step(GestureFsm fsm, const GestureConfig& cfg, HandState hand_state, const Vec3& hand_pos,
                                const Vec3& ball_pos, double grab_radius) {
    if (fsm.mode == GestureMode::Released) {
        const bool qualifies = hand_state == HandState::Closed && distance(hand_pos, ball_pos) <= grab_radius;
        if (!qualifies) return {{GestureMode::Released, 0}, GestureEvent::None};
        if (fsm.streak + 1 >= cfg.n_grab) return {{GestureMode::Held, 0}, GestureEvent::Grab};
        return {{GestureMode::Released, fsm.streak + 1}, GestureEvent::None};
    }
    if (hand_state != HandState::Open) return {{GestureMode::Held, 0}, GestureEvent::None};
    if (fsm.streak + 1 >= cfg.n_release) return {{GestureMode::Released, 0}, GestureEvent::Release};
    return {{GestureMode::Held, fsm.streak + 1}, GestureEvent::None};
}

}  // namespace rehab
