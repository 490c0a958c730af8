#pragma once

// The grab-move-drop task loop, stepped one validated frame at a time.
//
// Time is measured in frames only; nothing here reads a clock, so a frame
// stream and a configuration fully determine the outcome.

#include <rehab/core.hpp>
#include <rehab/difficulty.hpp>
#include <rehab/gesture.hpp>

#include <cstdint>
#include <string_view>
#include <vector>

namespace rehab {

struct EngineConfig {
    int feedback_frames = 30;        // ~1 s cue at 30 fps
    int repetitions_per_block = 10;  // drops per block
    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

inline void check(const EngineConfig& c) {
    if (c.feedback_frames < 0) throw std::invalid_argument("engine: feedback_frames must be >= 0");
    if (c.repetitions_per_block < 1) throw std::invalid_argument("engine: repetitions_per_block must be >= 1");
}

struct GameConfig {
    SceneConfig scene;
    GestureConfig gesture;
    DdaConfig dda;
    EngineConfig engine;
    friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

inline void check(const GameConfig& c) {
    check(c.scene);
    check(c.gesture);
    check(c.dda);
    check(c.engine);
}

enum class PhaseKind { AwaitingGrab, Holding, Feedback };
enum class FeedbackKind { Success, TryAgain };

struct GamePhase {
    PhaseKind kind = PhaseKind::AwaitingGrab;
    FeedbackKind feedback = FeedbackKind::Success;  // meaningful in Feedback only
    int frames_remaining = 0;                       // meaningful in Feedback only
    friend bool operator==(const GamePhase&, const GamePhase&) = default;
};

constexpr std::string_view to_string(PhaseKind p) {
    switch (p) {
        case PhaseKind::AwaitingGrab: return "awaiting_grab";
        case PhaseKind::Holding:      return "holding";
        case PhaseKind::Feedback:     return "feedback";
    }
    return "?";
}

struct DropRecord {
    Vec3 release_pos;
    PlanePoint landing_xz;
    double radial_error = 0.0;
    double target_radius_at_drop = 0.0;
    bool on_table = true;  // off-table releases land on the nearest edge and always miss
    bool hit = false;
    std::int64_t timestamp_us = 0;
    friend bool operator==(const DropRecord&, const DropRecord&) = default;
};

enum class EventKind { Grabbed, Released, Success, TryAgain, RadiusChanged, TrackingLost, TrackingRegained };

constexpr std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::Grabbed:          return "grabbed";
        case EventKind::Released:         return "released";
        case EventKind::Success:          return "success";
        case EventKind::TryAgain:         return "try_again";
        case EventKind::RadiusChanged:    return "radius_changed";
        case EventKind::TrackingLost:     return "tracking_lost";
        case EventKind::TrackingRegained: return "tracking_regained";
    }
    return "?";
}

inline std::optional<EventKind> event_kind_from_string(std::string_view s) {
    for (auto k : {EventKind::Grabbed, EventKind::Released, EventKind::Success, EventKind::TryAgain,
                   EventKind::RadiusChanged, EventKind::TrackingLost, EventKind::TrackingRegained}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

struct GameEvent {
    EventKind kind = EventKind::Grabbed;
    std::int64_t timestamp_us = 0;
    double radius = 0.0;  // RadiusChanged only
    friend bool operator==(const GameEvent&, const GameEvent&) = default;
};

struct GameState {
    GamePhase phase;
    Vec3 ball_pos;
    PlanePoint target_center;
    DifficultyState difficulty;
    int score = 0;
    std::vector<DropRecord> drops;
    std::int64_t frames_seen = 0;
    GestureFsm gesture;
    bool tracking = true;

    friend bool operator==(const GameState&, const GameState&) = default;
};

inline GameState initial_state(const GameConfig& cfg) {
    GameState s;
    s.ball_pos = cfg.scene.ball_home;
    s.target_center = cfg.scene.target_center;
    s.difficulty = initial_difficulty(cfg.dda);
    return s;
}

/// Boundary-inclusive disc test on the table plane.
inline bool hit_test(PlanePoint landing, PlanePoint target_center, double radius) {
    return distance(landing, target_center) <= radius;
}

struct EngineStep {
    GameState state;
    std::vector<GameEvent> events;
};

namespace detail {

inline void drop_ball(GameState& s, const GameConfig& cfg, std::int64_t ts, std::vector<GameEvent>& events) {
    const SceneConfig& scene = cfg.scene;
    const PlanePoint raw{s.ball_pos.x(), s.ball_pos.z()};
    DropRecord d;
    d.release_pos = s.ball_pos;
    d.on_table = scene.on_table(raw);
    d.landing_xz = scene.clamp_to_table(raw);
    d.radial_error = distance(d.landing_xz, s.target_center);
    d.target_radius_at_drop = s.difficulty.radius;
    d.hit = d.on_table && hit_test(d.landing_xz, s.target_center, s.difficulty.radius);
    d.timestamp_us = ts;
    s.drops.push_back(d);

    events.push_back({EventKind::Released, ts});
    events.push_back({d.hit ? EventKind::Success : EventKind::TryAgain, ts});
    if (d.hit) ++s.score;

    const double before = s.difficulty.radius;
    s.difficulty = dda_update(s.difficulty, cfg.dda, d.hit ? Outcome::Hit : Outcome::Miss);
    if (s.difficulty.radius != before) events.push_back({EventKind::RadiusChanged, ts, s.difficulty.radius});

    s.ball_pos = Vec3{d.landing_xz.x, scene.table_height + scene.ball_radius, d.landing_xz.z};
    if (cfg.engine.feedback_frames > 0) {
        s.phase = {PhaseKind::Feedback, d.hit ? FeedbackKind::Success : FeedbackKind::TryAgain,
                   cfg.engine.feedback_frames};
    } else {
        s.phase = {};
        s.ball_pos = scene.ball_home;
    }
}

}  // namespace detail

/// Advances the game by one frame and returns the new state plus the events
/// raised during this step.
inline EngineStep engine_step(GameState s, const GameConfig& cfg, const ValidFrame& frame) {
    std::vector<GameEvent> events;
    const std::int64_t ts = frame->timestamp_us;
    ++s.frames_seen;

    if (!frame->tracked) {
        if (s.tracking) events.push_back({EventKind::TrackingLost, ts});
        s.tracking = false;
        s.gesture.streak = 0;
        return {std::move(s), std::move(events)};
    }
    if (!s.tracking) {
        events.push_back({EventKind::TrackingRegained, ts});
        s.tracking = true;
    }

    const Vec3 hand = frame.hand();
    switch (s.phase.kind) {
        case PhaseKind::AwaitingGrab: {
            auto g = gesture_step(s.gesture, cfg.gesture, frame->right_hand_state, hand, s.ball_pos,
                                  cfg.scene.grab_radius);
            s.gesture = g.fsm;
            if (g.event == GestureEvent::Grab) {
                s.phase = {PhaseKind::Holding};
                s.ball_pos = hand;
                events.push_back({EventKind::Grabbed, ts});
            }
            break;
        }
        case PhaseKind::Holding: {
            s.ball_pos = hand;
            auto g = gesture_step(s.gesture, cfg.gesture, frame->right_hand_state, hand, s.ball_pos,
                                  cfg.scene.grab_radius);
            s.gesture = g.fsm;
            if (g.event == GestureEvent::Release) detail::drop_ball(s, cfg, ts, events);
            break;
        }
        case PhaseKind::Feedback: {
            if (--s.phase.frames_remaining <= 0) {
                s.phase = {};
                s.ball_pos = cfg.scene.ball_home;
                s.gesture = {};
            }
            break;
        }
    }
    return {std::move(s), std::move(events)};
}

/// Index of the block the next drop belongs to.
inline int block_index(const GameState& s, const EngineConfig& e) {
    return static_cast<int>(s.drops.size()) / e.repetitions_per_block;
}

/// Runs a whole source through a fresh game.
struct SessionRun {
    GameState state;
    std::vector<GameEvent> events;
};

template <typename Source>
SessionRun run_session(Source& source, const GameConfig& cfg) {
    SessionRun run{initial_state(cfg), {}};
    while (auto frame = source.next()) {
        auto step = engine_step(std::move(run.state), cfg, *frame);
        run.state = std::move(step.state);
        run.events.insert(run.events.end(), step.events.begin(), step.events.end());
    }
    return run;
}

}  // namespace rehab
