#pragma once

// Wire messages: one JSON object per text message, tagged by `type`.
//
// Inbound (client -> server)
//   {"type":"frame","ts_us":..,"tracked":..,"hand_state":..,"joints":{..}}
//   {"type":"pointer_input","x":..,"z":..,"grab":bool}
//   {"type":"session_cmd","cmd":"start|stop|load|delete|list","id":"..","config":{..}}
// Outbound (server -> client)
//   {"type":"state","phase":..,"feedback":..,"feedback_frames_remaining":..,"ball_pos":[..],
//    "target_center":[x,z],"radius":..,"score":..,"n_drops":..,"frames_seen":..,"avatar":{..}}
//   {"type":"event","event":{"type":..,"ts_us":..[,"radius":..]}}
//   {"type":"cmd_result","cmd":..,"ok":bool,"payload":{..}}
//   {"type":"error","code":..,"message":..}

#include <rehab/codec.hpp>
#include <rehab/ik.hpp>

#include <optional>
#include <string>
#include <variant>

namespace rehab {

struct FrameMsg {
    SkeletonFrame frame;
    friend bool operator==(const FrameMsg&, const FrameMsg&) = default;
};

struct PointerInputMsg {
    double x = 0.0;
    double z = 0.0;
    bool grab = false;
    friend bool operator==(const PointerInputMsg&, const PointerInputMsg&) = default;
};

enum class SessionCmd { Start, Stop, Load, Delete, List };

constexpr std::string_view to_string(SessionCmd c) {
    switch (c) {
        case SessionCmd::Start:  return "start";
        case SessionCmd::Stop:   return "stop";
        case SessionCmd::Load:   return "load";
        case SessionCmd::Delete: return "delete";
        case SessionCmd::List:   return "list";
    }
    return "?";
}

inline std::optional<SessionCmd> session_cmd_from_string(std::string_view s) {
    for (auto c : {SessionCmd::Start, SessionCmd::Stop, SessionCmd::Load, SessionCmd::Delete, SessionCmd::List}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

struct SessionCmdMsg {
    SessionCmd cmd = SessionCmd::Start;
    std::optional<std::string> id;
    std::optional<json> config;
    friend bool operator==(const SessionCmdMsg&, const SessionCmdMsg&) = default;
};

struct AvatarJoints {
    Vec3 shoulder;
    Vec3 elbow;
    Vec3 hand;
    friend bool operator==(const AvatarJoints&, const AvatarJoints&) = default;
};

struct StateMsg {
    PhaseKind phase = PhaseKind::AwaitingGrab;
    std::optional<FeedbackKind> feedback;
    int feedback_frames_remaining = 0;
    Vec3 ball_pos;
    PlanePoint target_center;
    double radius = 0.0;
    int score = 0;
    int n_drops = 0;
    std::int64_t frames_seen = 0;
    std::optional<AvatarJoints> avatar;
    friend bool operator==(const StateMsg&, const StateMsg&) = default;
};

struct EventMsg {
    GameEvent event;
    friend bool operator==(const EventMsg&, const EventMsg&) = default;
};

struct CmdResultMsg {
    SessionCmd cmd = SessionCmd::Start;
    bool ok = true;
    json payload = json::object();
    friend bool operator==(const CmdResultMsg&, const CmdResultMsg&) = default;
};

struct ErrorMsg {
    std::string code;
    std::string message;
    friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

using ProtocolMessage = std::variant<FrameMsg, PointerInputMsg, SessionCmdMsg, StateMsg, EventMsg, CmdResultMsg, ErrorMsg>;

inline bool is_inbound(const ProtocolMessage& m) {
    return std::holds_alternative<FrameMsg>(m) || std::holds_alternative<PointerInputMsg>(m) ||
           std::holds_alternative<SessionCmdMsg>(m);
}

class ProtocolError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

constexpr std::string_view feedback_name(FeedbackKind k) { return k == FeedbackKind::Success ? "success" : "try_again"; }

inline json encode_json(const FrameMsg& m) {
    json j = frame_to_json(m.frame);
    j["type"] = "frame";
    return j;
}

inline json encode_json(const PointerInputMsg& m) {
    return {{"type", "pointer_input"}, {"x", m.x}, {"z", m.z}, {"grab", m.grab}};
}

inline json encode_json(const SessionCmdMsg& m) {
    json j{{"type", "session_cmd"}, {"cmd", std::string(to_string(m.cmd))}};
    if (m.id) j["id"] = *m.id;
    if (m.config) j["config"] = *m.config;
    return j;
}

inline json encode_json(const StateMsg& m) {
    json j{{"type", "state"},
           {"phase", std::string(to_string(m.phase))},
           {"feedback", m.feedback ? json(std::string(feedback_name(*m.feedback))) : json(nullptr)},
           {"feedback_frames_remaining", m.feedback_frames_remaining},
           {"ball_pos", to_json(m.ball_pos)},
           {"target_center", plane_json(m.target_center)},
           {"radius", m.radius},
           {"score", m.score},
           {"n_drops", m.n_drops},
           {"frames_seen", m.frames_seen}};
    if (m.avatar) {
        j["avatar"] = {{"shoulder_right", to_json(m.avatar->shoulder)},
                       {"elbow_right", to_json(m.avatar->elbow)},
                       {"hand_right", to_json(m.avatar->hand)}};
    } else {
        j["avatar"] = nullptr;
    }
    return j;
}

inline json encode_json(const EventMsg& m) { return {{"type", "event"}, {"event", to_json(m.event)}}; }

inline json encode_json(const CmdResultMsg& m) {
    return {{"type", "cmd_result"}, {"cmd", std::string(to_string(m.cmd))}, {"ok", m.ok}, {"payload", m.payload}};
}

inline json encode_json(const ErrorMsg& m) { return {{"type", "error"}, {"code", m.code}, {"message", m.message}}; }

inline ProtocolMessage decode_frame(const json& j) {
    StrictObject o(j, "frame");
    for (const char* k : {"type", "ts_us", "tracked", "hand_state", "joints"}) o.find(k);
    o.finish();
    try {
        return FrameMsg{frame_from_json(j)};
    } catch (const std::exception& e) {
        throw DecodeError(std::string("frame: ") + e.what());
    }
}

inline ProtocolMessage decode_pointer(const json& j) {
    StrictObject o(j, "pointer_input");
    o.find("type");
    for (const char* k : {"x", "z", "grab"}) o.require(k);
    PointerInputMsg m;
    o.number("x", m.x);
    o.number("z", m.z);
    o.boolean("grab", m.grab);
    o.finish();
    if (!std::isfinite(m.x) || !std::isfinite(m.z)) throw DecodeError("pointer_input: non-finite coordinate");
    return m;
}

inline ProtocolMessage decode_session_cmd(const json& j) {
    StrictObject o(j, "session_cmd");
    o.find("type");
    std::string cmd;
    o.require("cmd");
    o.string("cmd", cmd);
    auto c = session_cmd_from_string(cmd);
    if (!c) throw DecodeError("session_cmd: unknown cmd '" + cmd + "'");
    SessionCmdMsg m{*c, std::nullopt, std::nullopt};
    if (const json* id = o.find("id")) {
        if (!id->is_string()) throw DecodeError("session_cmd.id: expected a string");
        m.id = id->get<std::string>();
    }
    if (const json* cfg = o.find("config")) {
        if (!cfg->is_object()) throw DecodeError("session_cmd.config: expected an object");
        m.config = *cfg;
    }
    o.finish();
    return m;
}

inline ProtocolMessage decode_state(const json& j) {
    StrictObject o(j, "state");
    o.find("type");
    for (const char* k : {"phase", "feedback", "feedback_frames_remaining", "ball_pos", "target_center", "radius",
                          "score", "n_drops", "frames_seen", "avatar"}) {
        o.require(k);
    }
    StateMsg m;
    std::string phase;
    o.string("phase", phase);
    if (phase == "awaiting_grab") m.phase = PhaseKind::AwaitingGrab;
    else if (phase == "holding") m.phase = PhaseKind::Holding;
    else if (phase == "feedback") m.phase = PhaseKind::Feedback;
    else throw DecodeError("state.phase: unknown '" + phase + "'");
    const json& fb = *o.find("feedback");
    if (fb.is_null()) m.feedback.reset();
    else if (fb == "success") m.feedback = FeedbackKind::Success;
    else if (fb == "try_again") m.feedback = FeedbackKind::TryAgain;
    else throw DecodeError("state.feedback: unknown value");
    o.integer("feedback_frames_remaining", m.feedback_frames_remaining);
    o.vec3("ball_pos", m.ball_pos);
    o.plane("target_center", m.target_center);
    o.number("radius", m.radius);
    o.integer("score", m.score);
    o.integer("n_drops", m.n_drops);
    o.integer("frames_seen", m.frames_seen);
    const json& av = *o.find("avatar");
    if (!av.is_null()) {
        StrictObject a(av, "state.avatar");
        for (const char* k : {"shoulder_right", "elbow_right", "hand_right"}) a.require(k);
        AvatarJoints joints;
        a.vec3("shoulder_right", joints.shoulder);
        a.vec3("elbow_right", joints.elbow);
        a.vec3("hand_right", joints.hand);
        a.finish();
        m.avatar = joints;
    }
    o.finish();
    return m;
}

inline ProtocolMessage decode_event(const json& j) {
    StrictObject o(j, "event");
    o.find("type");
    EventMsg m{event_from_json(o.require("event"))};
    o.finish();
    return m;
}

inline ProtocolMessage decode_cmd_result(const json& j) {
    StrictObject o(j, "cmd_result");
    o.find("type");
    for (const char* k : {"cmd", "ok", "payload"}) o.require(k);
    CmdResultMsg m;
    std::string cmd;
    o.string("cmd", cmd);
    auto c = session_cmd_from_string(cmd);
    if (!c) throw DecodeError("cmd_result: unknown cmd '" + cmd + "'");
    m.cmd = *c;
    o.boolean("ok", m.ok);
    m.payload = *o.find("payload");
    o.finish();
    return m;
}

inline ProtocolMessage decode_error(const json& j) {
    StrictObject o(j, "error");
    o.find("type");
    for (const char* k : {"code", "message"}) o.require(k);
    ErrorMsg m;
    o.string("code", m.code);
    o.string("message", m.message);
    o.finish();
    return m;
}

}  // namespace detail

inline json encode_json(const ProtocolMessage& m) {
    return std::visit([](const auto& v) { return detail::encode_json(v); }, m);
}

inline std::string encode(const ProtocolMessage& m) { return encode_json(m).dump(); }

inline ProtocolMessage decode_json(const json& j) {
    if (!j.is_object()) throw ProtocolError("message must be a JSON object");
    auto it = j.find("type");
    if (it == j.end() || !it->is_string()) throw ProtocolError("message lacks a string 'type'");
    const std::string type = it->get<std::string>();
    try {
        if (type == "frame") return detail::decode_frame(j);
        if (type == "pointer_input") return detail::decode_pointer(j);
        if (type == "session_cmd") return detail::decode_session_cmd(j);
        if (type == "state") return detail::decode_state(j);
        if (type == "event") return detail::decode_event(j);
        if (type == "cmd_result") return detail::decode_cmd_result(j);
        if (type == "error") return detail::decode_error(j);
    } catch (const std::exception& e) {
        throw ProtocolError(e.what());
    }
    throw ProtocolError("unknown message type '" + type + "'");
}

inline ProtocolMessage decode(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("invalid JSON: ") + e.what());
    }
    return decode_json(j);
}

/// Synthesizes a tracked frame with the hand hovering over a table point.
/// Points off the table are clamped to its nearest edge.
inline SkeletonFrame pointer_to_frame(const PointerInputMsg& p, const SceneConfig& scene, std::int64_t ts_us) {
    const PlanePoint c = scene.clamp_to_table({p.x, p.z});
    SkeletonFrame f;
    f.timestamp_us = ts_us;
    f.tracked = true;
    f.right_hand_state = p.grab ? HandState::Closed : HandState::Open;
    f.joints.emplace(JointId::HandRight, Vec3{c.x, scene.table_height + scene.hover_offset, c.z});
    return f;
}

}  // namespace rehab
