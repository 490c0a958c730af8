#pragma once

// JSON encodings shared by the frame/event logs, the session store, the
// configuration file and the wire protocol.
//
// Decoders are strict: unknown keys are rejected so that typos in
// configuration overrides surface immediately. Keys that are absent keep the
// value already present in the target object, which gives override semantics
// on top of defaults.

#include <rehab/capture.hpp>
#include <rehab/engine.hpp>
#include <rehab/metrics.hpp>

#include <json.hpp>

#include <set>
#include <stdexcept>
#include <string>

namespace rehab {

using json = nlohmann::json;

class DecodeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

/// Reads named members of a JSON object, remembering which ones were used.
class StrictObject {
public:
    StrictObject(const json& j, std::string context) : j_(j), ctx_(std::move(context)) {
        if (!j_.is_object()) throw DecodeError(ctx_ + ": expected an object");
    }

    const json* find(const char* key) {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(const char* key) {
        const json* v = find(key);
        if (!v) throw DecodeError(ctx_ + ": missing '" + key + "'");
        return *v;
    }

    void number(const char* key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw DecodeError(ctx_ + "." + key + ": expected a number");
            out = v->get<double>();
        }
    }

    void optional_number(const char* key, std::optional<double>& out) {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
            } else if (v->is_number()) {
                out = v->get<double>();
            } else {
                throw DecodeError(ctx_ + "." + key + ": expected a number or null");
            }
        }
    }

    template <typename Int>
    void integer(const char* key, Int& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) throw DecodeError(ctx_ + "." + key + ": expected an integer");
            out = v->get<Int>();
        }
    }

    void boolean(const char* key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw DecodeError(ctx_ + "." + key + ": expected a boolean");
            out = v->get<bool>();
        }
    }

    void string(const char* key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw DecodeError(ctx_ + "." + key + ": expected a string");
            out = v->get<std::string>();
        }
    }

    void vec3(const char* key, Vec3& out) {
        if (const json* v = find(key)) {
            try {
                out = vec3_from_json(*v);
            } catch (const std::exception& e) {
                throw DecodeError(ctx_ + "." + key + ": " + e.what());
            }
        }
    }

    void plane(const char* key, PlanePoint& out) {
        if (const json* v = find(key)) {
            if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
                throw DecodeError(ctx_ + "." + key + ": expected [x, z]");
            out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
        }
    }

    /// Rejects any member that no accessor asked about.
    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!used_.contains(k)) throw DecodeError(ctx_ + ": unknown key '" + k + "'");
        }
    }

    const std::string& context() const { return ctx_; }

private:
    const json& j_;
    std::string ctx_;
    std::set<std::string, std::less<>> used_;
};

inline json plane_json(PlanePoint p) { return json::array({p.x, p.z}); }

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace detail

// --- configs ---------------------------------------------------------------

inline json to_json(const SceneConfig& s) {
    return {{"table_height", s.table_height},
            {"table_center", detail::plane_json(s.table_center)},
            {"table_extent", detail::plane_json(s.table_extent)},
            {"ball_radius", s.ball_radius},
            {"ball_home", to_json(s.ball_home)},
            {"target_center", detail::plane_json(s.target_center)},
            {"grab_radius", s.grab_radius},
            {"hover_offset", s.hover_offset}};
}

inline void apply(const json& j, SceneConfig& s, const std::string& ctx = "scene") {
    detail::StrictObject o(j, ctx);
    o.number("table_height", s.table_height);
    o.plane("table_center", s.table_center);
    o.plane("table_extent", s.table_extent);
    o.number("ball_radius", s.ball_radius);
    o.vec3("ball_home", s.ball_home);
    o.plane("target_center", s.target_center);
    o.number("grab_radius", s.grab_radius);
    o.number("hover_offset", s.hover_offset);
    o.finish();
}

inline json to_json(const GestureConfig& g) { return {{"n_grab", g.n_grab}, {"n_release", g.n_release}}; }

inline void apply(const json& j, GestureConfig& g, const std::string& ctx = "gesture") {
    detail::StrictObject o(j, ctx);
    o.integer("n_grab", g.n_grab);
    o.integer("n_release", g.n_release);
    o.finish();
}

inline json to_json(const DdaConfig& d) {
    return {{"r0", d.r0},       {"r_min", d.r_min}, {"r_max", d.r_max},       {"alpha", d.alpha},
            {"beta", d.beta},   {"s_streak", d.s_streak}, {"f_streak", d.f_streak}};
}

inline void apply(const json& j, DdaConfig& d, const std::string& ctx = "dda") {
    detail::StrictObject o(j, ctx);
    o.number("r0", d.r0);
    o.number("r_min", d.r_min);
    o.number("r_max", d.r_max);
    o.number("alpha", d.alpha);
    o.number("beta", d.beta);
    o.integer("s_streak", d.s_streak);
    o.integer("f_streak", d.f_streak);
    o.finish();
}

inline json to_json(const EngineConfig& e) {
    return {{"feedback_frames", e.feedback_frames}, {"repetitions_per_block", e.repetitions_per_block}};
}

inline void apply(const json& j, EngineConfig& e, const std::string& ctx = "engine") {
    detail::StrictObject o(j, ctx);
    o.integer("feedback_frames", e.feedback_frames);
    o.integer("repetitions_per_block", e.repetitions_per_block);
    o.finish();
}

inline json to_json(const NoiseModel& n) { return {{"sigma_near", n.sigma_near}, {"sigma_far", n.sigma_far}}; }

inline void apply(const json& j, NoiseModel& n, const std::string& ctx = "noise") {
    detail::StrictObject o(j, ctx);
    o.number("sigma_near", n.sigma_near);
    o.number("sigma_far", n.sigma_far);
    o.finish();
}

// --- records ---------------------------------------------------------------

/// Event log line: `type` names the event; radius_changed carries `radius`.
inline json to_json(const GameEvent& e) {
    json j{{"type", std::string(to_string(e.kind))}, {"ts_us", e.timestamp_us}};
    if (e.kind == EventKind::RadiusChanged) j["radius"] = e.radius;
    return j;
}

inline GameEvent event_from_json(const json& j) {
    detail::StrictObject o(j, "event");
    GameEvent e;
    std::string type;
    o.string("type", type);
    auto kind = event_kind_from_string(type);
    if (!kind) throw DecodeError("event: unknown type '" + type + "'");
    e.kind = *kind;
    if (!o.find("ts_us")) throw DecodeError("event: missing 'ts_us'");
    o.integer("ts_us", e.timestamp_us);
    if (e.kind == EventKind::RadiusChanged) {
        if (!o.find("radius")) throw DecodeError("event: radius_changed without 'radius'");
        o.number("radius", e.radius);
    }
    o.finish();
    return e;
}

inline json to_json(const DropRecord& d) {
    return {{"release_pos", to_json(d.release_pos)},
            {"landing_xz", detail::plane_json(d.landing_xz)},
            {"radial_error", d.radial_error},
            {"target_radius_at_drop", d.target_radius_at_drop},
            {"on_table", d.on_table},
            {"hit", d.hit},
            {"ts_us", d.timestamp_us}};
}

inline DropRecord drop_from_json(const json& j) {
    detail::StrictObject o(j, "drop");
    DropRecord d;
    for (const char* key : {"release_pos", "landing_xz", "radial_error", "target_radius_at_drop", "on_table", "hit",
                            "ts_us"}) {
        o.require(key);
    }
    o.vec3("release_pos", d.release_pos);
    o.plane("landing_xz", d.landing_xz);
    o.number("radial_error", d.radial_error);
    o.number("target_radius_at_drop", d.target_radius_at_drop);
    o.boolean("on_table", d.on_table);
    o.boolean("hit", d.hit);
    o.integer("ts_us", d.timestamp_us);
    o.finish();
    return d;
}

inline json to_json(const SessionMetrics& m) {
    return {{"n_drops", m.n_drops},
            {"hit_rate", detail::optional_json(m.hit_rate)},
            {"accuracy_mre", detail::optional_json(m.accuracy_mre)},
            {"precision_rms", detail::optional_json(m.precision_rms)},
            {"final_radius", detail::optional_json(m.final_radius)}};
}

inline SessionMetrics metrics_from_json(const json& j) {
    detail::StrictObject o(j, "metrics");
    SessionMetrics m;
    o.integer("n_drops", m.n_drops);
    o.optional_number("hit_rate", m.hit_rate);
    o.optional_number("accuracy_mre", m.accuracy_mre);
    o.optional_number("precision_rms", m.precision_rms);
    o.optional_number("final_radius", m.final_radius);
    o.finish();
    return m;
}

// --- configuration file ----------------------------------------------------

/// Everything a configuration file may override.
struct RunConfig {
    GameConfig game;
    NoiseModel noise;
    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline json to_json(const RunConfig& c) {
    return {{"scene", to_json(c.game.scene)},
            {"gesture", to_json(c.game.gesture)},
            {"dda", to_json(c.game.dda)},
            {"engine", to_json(c.game.engine)},
            {"noise", to_json(c.noise)}};
}

/// Applies an override object of the form
/// {"scene": {...}, "gesture": {...}, "dda": {...}, "engine": {...}, "noise": {...}}
/// and validates every resulting invariant.
inline RunConfig apply_overrides(RunConfig c, const json& overrides) {
    detail::StrictObject o(overrides, "config");
    if (const json* v = o.find("scene")) apply(*v, c.game.scene);
    if (const json* v = o.find("gesture")) apply(*v, c.game.gesture);
    if (const json* v = o.find("dda")) apply(*v, c.game.dda);
    if (const json* v = o.find("engine")) apply(*v, c.game.engine);
    if (const json* v = o.find("noise")) apply(*v, c.noise);
    o.finish();
    try {
        check(c.game);
        check(c.noise);
    } catch (const std::invalid_argument& e) {
        throw DecodeError(std::string("config: ") + e.what());
    }
    return c;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DecodeError("config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DecodeError("config '" + path + "': " + e.what());
    }
    return apply_overrides(RunConfig{}, j);
}

}  // namespace rehab
