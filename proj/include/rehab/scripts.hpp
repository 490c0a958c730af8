#pragma once

// Canned movement scripts for the synthetic patient, plus the JSON script
// file format:
//
//   {"waypoints": [{"t": 0.0, "hand": [x, y, z], "hand_state": "open"}, ...],
//    "tremor_amplitude": 0.0, "tremor_frequency": 0.0, "speed_scale": 1.0}

#include <rehab/codec.hpp>

#include <functional>

namespace rehab {

/// One grab-carry-release repetition per call of `release_point(i)`. The hand
/// starts above the ball, closes on it, carries it above the release point,
/// opens, and returns while the feedback cue plays.
inline MovementScript reach_script(const SceneConfig& scene, int repetitions,
                                   const std::function<PlanePoint(int)>& release_point) {
    const Vec3 home = scene.ball_home;
    const Vec3 rest = home + Vec3{0.0, 0.15, 0.0};
    const Vec3 at_ball = home + Vec3{0.0, 0.01, 0.0};
    const double carry_y = scene.table_height + 0.12;
    constexpr double kCycle = 3.2;

    MovementScript s;
    s.waypoints.push_back({0.0, rest, HandState::Open});
    for (int i = 0; i < repetitions; ++i) {
        const double c = kCycle * i;
        const PlanePoint r = release_point(i);
        const Vec3 above{r.x, carry_y, r.z};
        s.waypoints.push_back({c + 0.4, at_ball, HandState::Closed});
        s.waypoints.push_back({c + 0.7, at_ball, HandState::Closed});
        s.waypoints.push_back({c + 1.5, above, HandState::Closed});
        s.waypoints.push_back({c + 1.7, above, HandState::Open});
        s.waypoints.push_back({c + 2.0, above, HandState::Open});
        s.waypoints.push_back({c + kCycle, rest, HandState::Open});
    }
    return s;
}

/// Always releases directly over the target center.
inline MovementScript perfect_player(const SceneConfig& scene, int repetitions) {
    return reach_script(scene, repetitions, [&](int) { return scene.target_center; });
}

/// Always releases on the table well outside the largest allowed disc.
inline MovementScript always_miss_player(const SceneConfig& scene, const DdaConfig& dda, int repetitions) {
    const double offset = dda.r_max * 2.0;
    const PlanePoint lo = scene.clamp_to_table({-1e9, -1e9});
    const PlanePoint hi = scene.clamp_to_table({1e9, 1e9});
    PlanePoint p{scene.target_center.x + offset, scene.target_center.z};
    if (p.x > hi.x) p.x = scene.target_center.x - offset;
    if (p.x < lo.x) p.x = lo.x;
    return reach_script(scene, repetitions, [p](int) { return p; });
}

inline MovementScript script_from_json(const json& j) {
    detail::StrictObject o(j, "script");
    MovementScript s;
    const json& wps = o.require("waypoints");
    if (!wps.is_array()) throw DecodeError("script.waypoints: expected an array");
    for (std::size_t i = 0; i < wps.size(); ++i) {
        detail::StrictObject w(wps[i], "script.waypoints[" + std::to_string(i) + "]");
        Waypoint wp;
        w.require("t");
        w.number("t", wp.t_s);
        w.require("hand");
        w.vec3("hand", wp.hand);
        std::string hs = "open";
        w.string("hand_state", hs);
        auto state = hand_state_from_string(hs);
        if (!state) throw DecodeError("script: unknown hand_state '" + hs + "'");
        wp.hand_state = *state;
        w.finish();
        s.waypoints.push_back(wp);
    }
    o.number("tremor_amplitude", s.tremor_amplitude);
    o.number("tremor_frequency", s.tremor_frequency);
    o.number("speed_scale", s.speed_scale);
    o.finish();
    return s;
}

inline json to_json(const MovementScript& s) {
    json wps = json::array();
    for (const auto& w : s.waypoints) {
        wps.push_back({{"t", w.t_s}, {"hand", to_json(w.hand)}, {"hand_state", std::string(to_string(w.hand_state))}});
    }
    return {{"waypoints", std::move(wps)},
            {"tremor_amplitude", s.tremor_amplitude},
            {"tremor_frequency", s.tremor_frequency},
            {"speed_scale", s.speed_scale}};
}

}  // namespace rehab
