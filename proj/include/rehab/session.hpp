#pragma once

// Per-connection session logic, independent of the socket transport.
//
// A Session consumes inbound protocol messages in arrival order and produces
// the outbound messages for each. Inbound order is the only clock: frames
// carry their own timestamps and pointer input is stamped one nominal frame
// period after the previous input.

#include <rehab/persistence.hpp>
#include <rehab/protocol.hpp>

#include <deque>
#include <memory>
#include <mutex>

namespace rehab {

/// A store shared by every connection of one server process. Writers are
/// serialized through the mutex.
struct SharedStore {
    explicit SharedStore(std::filesystem::path root) : store(std::move(root)) {}
    SessionStore store;
    std::mutex mutex;
};

/// Default display arm used when a frame carries no shoulder joint.
inline ArmChain default_arm(const SceneConfig& scene) {
    ArmChain chain;
    chain.shoulder = Vec3{scene.table_center.x + 0.15, scene.table_height + 0.45, scene.table_center.z + 0.50};
    return chain;
}

/// Poses the avatar arm toward the ball. Display only; never feeds back into
/// the game.
inline std::optional<AvatarJoints> avatar_for(const SceneConfig& scene, const std::optional<SkeletonFrame>& frame,
                                              const Vec3& ball) {
    ArmChain chain = default_arm(scene);
    if (frame && frame->tracked) {
        if (auto s = frame->joint(JointId::ShoulderRight)) chain.shoulder = *s;
    }
    try {
        ArmPose pose = solve_arm(chain, ball);
        return AvatarJoints{chain.shoulder, pose.elbow, pose.hand};
    } catch (const IkError&) {
        return std::nullopt;
    }
}

inline json record_to_json(const SessionRecord& r) {
    json drops = json::array();
    for (const auto& d : r.drops) drops.push_back(to_json(d));
    json events = json::array();
    for (const auto& e : r.events) events.push_back(to_json(e));
    return {{"session_id", r.session_id},
            {"created_at_us", r.created_at_us},
            {"schema_version", r.schema_version},
            {"scene", to_json(r.scene)},
            {"gesture", to_json(r.gesture)},
            {"dda", to_json(r.dda)},
            {"engine", to_json(r.engine)},
            {"metrics", to_json(r.metrics)},
            {"drops", std::move(drops)},
            {"events", std::move(events)}};
}

inline json summary_to_json(const SessionSummary& s) {
    return {{"session_id", s.session_id},
            {"created_at_us", s.created_at_us},
            {"n_drops", s.n_drops},
            {"hit_rate", s.hit_rate ? json(*s.hit_rate) : json(nullptr)}};
}

class Session {
public:
    Session(RunConfig defaults, std::shared_ptr<SharedStore> store)
        : defaults_(std::move(defaults)), store_(std::move(store)) {}

    bool active() const { return game_.has_value(); }
    const GameState* state() const { return game_ ? &game_->state : nullptr; }

    std::vector<ProtocolMessage> handle_text(std::string_view text) {
        ProtocolMessage msg;
        try {
            msg = decode(text);
        } catch (const ProtocolError& e) {
            return {ErrorMsg{"MalformedMessage", e.what()}};
        }
        return handle(msg);
    }

    std::vector<ProtocolMessage> handle(const ProtocolMessage& msg) {
        if (auto* f = std::get_if<FrameMsg>(&msg)) return on_frame(f->frame);
        if (auto* p = std::get_if<PointerInputMsg>(&msg)) {
            if (!game_) return {no_session()};
            const std::int64_t ts = game_->prev_ts ? *game_->prev_ts + kFramePeriodUs : 0;
            return on_frame(pointer_to_frame(*p, game_->config.game.scene, ts));
        }
        if (auto* c = std::get_if<SessionCmdMsg>(&msg)) return on_command(*c);
        return {ErrorMsg{"UnexpectedMessage", "server does not accept outbound message types"}};
    }

    StateMsg snapshot() const {
        const GameState& s = game_->state;
        StateMsg m;
        m.phase = s.phase.kind;
        if (s.phase.kind == PhaseKind::Feedback) {
            m.feedback = s.phase.feedback;
            m.feedback_frames_remaining = s.phase.frames_remaining;
        }
        m.ball_pos = s.ball_pos;
        m.target_center = s.target_center;
        m.radius = s.difficulty.radius;
        m.score = s.score;
        m.n_drops = static_cast<int>(s.drops.size());
        m.frames_seen = s.frames_seen;
        m.avatar = avatar_for(game_->config.game.scene, game_->last_frame, s.ball_pos);
        return m;
    }

private:
    struct Active {
        RunConfig config;
        GameState state;
        std::vector<GameEvent> events;
        std::optional<std::int64_t> prev_ts;
        std::optional<SkeletonFrame> last_frame;
        std::int64_t created_at_us = 0;
    };

    static ErrorMsg no_session() { return {"NoActiveSession", "send session_cmd start first"}; }

    static CmdResultMsg failure(SessionCmd cmd, std::string_view code, const std::string& message) {
        return {cmd, false, json{{"code", std::string(code)}, {"message", message}}};
    }

    std::vector<ProtocolMessage> on_frame(SkeletonFrame frame) {
        if (!game_) return {no_session()};
        auto checked = validate_frame(std::move(frame), game_->prev_ts);
        if (auto* rej = std::get_if<FrameRejection>(&checked)) {
            return {ErrorMsg{"InvalidFrame", std::string(to_string(rej->rule)) + ": " + rej->detail}};
        }
        const ValidFrame& valid = std::get<ValidFrame>(checked);
        game_->prev_ts = valid->timestamp_us;
        auto step = engine_step(std::move(game_->state), game_->config.game, valid);
        game_->state = std::move(step.state);
        if (valid->tracked) game_->last_frame = valid.get();

        std::vector<ProtocolMessage> out;
        out.reserve(step.events.size() + 1);
        for (const auto& e : step.events) {
            game_->events.push_back(e);
            out.emplace_back(EventMsg{e});
        }
        out.emplace_back(snapshot());
        return out;
    }

    std::vector<ProtocolMessage> on_command(const SessionCmdMsg& c) {
        switch (c.cmd) {
            case SessionCmd::Start: return start(c);
            case SessionCmd::Stop: return stop();
            case SessionCmd::Load:
            case SessionCmd::Delete:
            case SessionCmd::List: return store_command(c);
        }
        return {failure(c.cmd, "UnknownCommand", "")};
    }

    std::vector<ProtocolMessage> start(const SessionCmdMsg& c) {
        if (game_) return {failure(c.cmd, "SessionActive", "stop the running session first")};
        RunConfig cfg = defaults_;
        if (c.config) {
            try {
                cfg = apply_overrides(cfg, *c.config);
            } catch (const std::exception& e) {
                return {failure(c.cmd, "InvalidConfig", e.what())};
            }
        }
        game_ = Active{cfg, initial_state(cfg.game), {}, std::nullopt, std::nullopt, now_us()};
        return {CmdResultMsg{c.cmd, true, json{{"config", to_json(cfg)}}}, snapshot()};
    }

    std::vector<ProtocolMessage> stop() {
        if (!game_) return {failure(SessionCmd::Stop, "NoActiveSession", "no session is running")};
        SessionRecord record = make_record(game_->config.game, game_->state, game_->events, game_->created_at_us);
        try {
            std::lock_guard lock(store_->mutex);
            store_->store.save(record);
        } catch (const StoreError& e) {
            return {failure(SessionCmd::Stop, to_string(e.kind()), e.what())};
        }
        game_.reset();
        return {CmdResultMsg{SessionCmd::Stop, true,
                             json{{"session_id", record.session_id}, {"metrics", to_json(record.metrics)}}}};
    }

    std::vector<ProtocolMessage> store_command(const SessionCmdMsg& c) {
        if (c.cmd != SessionCmd::List && !c.id) return {failure(c.cmd, "MissingId", "this command needs an id")};
        try {
            std::lock_guard lock(store_->mutex);
            switch (c.cmd) {
                case SessionCmd::Load:
                    return {CmdResultMsg{c.cmd, true, json{{"record", record_to_json(store_->store.load(*c.id))}}}};
                case SessionCmd::Delete:
                    store_->store.remove(*c.id);
                    return {CmdResultMsg{c.cmd, true, json{{"session_id", *c.id}}}};
                default: {
                    json sessions = json::array();
                    for (const auto& s : store_->store.list()) sessions.push_back(summary_to_json(s));
                    return {CmdResultMsg{c.cmd, true, json{{"sessions", std::move(sessions)}}}};
                }
            }
        } catch (const StoreError& e) {
            return {failure(c.cmd, to_string(e.kind()), e.what())};
        }
    }

    RunConfig defaults_;
    std::shared_ptr<SharedStore> store_;
    std::optional<Active> game_;
};

/// Outbound buffer for one connection. When a client falls behind, queued
/// state snapshots are conflated to the newest one; events are never dropped
/// and keep their order.
class OutboundQueue {
public:
    void push(const ProtocolMessage& m) { push(std::holds_alternative<StateMsg>(m), encode(m)); }

    void push(bool is_state, std::string text) {
        if (is_state) {
            std::erase_if(items_, [](const Item& i) { return i.is_state; });
        }
        items_.push_back({is_state, std::move(text)});
    }

    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }

    std::string pop() {
        std::string s = std::move(items_.front().text);
        items_.pop_front();
        return s;
    }

private:
    struct Item {
        bool is_state;
        std::string text;
    };
    std::deque<Item> items_;
};

}  // namespace rehab
