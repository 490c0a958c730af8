#pragma once

#include <rehab/protocol.hpp>

#include <random>

namespace rehab::testing {

inline Vec3 random_vec(std::mt19937_64& gen, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return Vec3{u(gen), u(gen), u(gen)};
}

inline SkeletonFrame random_frame(std::mt19937_64& gen, std::int64_t ts) {
    SkeletonFrame f;
    f.timestamp_us = ts;
    f.tracked = gen() % 4 != 0;
    f.right_hand_state = static_cast<HandState>(gen() % 3);
    for (JointId j : kAllJoints) {
        if (j == JointId::HandRight || gen() % 2) f.joints.emplace(j, random_vec(gen, 0.5, 5.0));
    }
    return f;
}

inline ProtocolMessage random_message(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> i(0, 1000);
    auto text = [&] {
        std::string s;
        for (int k = 0, n = i(gen) % 12; k < n; ++k) s += static_cast<char>("abc \"\\/\n_-{}:"[gen() % 13]);
        return s;
    };
    switch (gen() % 7) {
        case 0: return FrameMsg{random_frame(gen, static_cast<std::int64_t>(gen() % 1'000'000'000))};
        case 1: return PointerInputMsg{u(gen), u(gen), gen() % 2 == 0};
        case 2: {
            SessionCmdMsg m{static_cast<SessionCmd>(gen() % 5), std::nullopt, std::nullopt};
            if (gen() % 2) m.id = text();
            if (gen() % 2) m.config = json{{"dda", {{"r0", u(gen)}}}, {"engine", {{"feedback_frames", i(gen)}}}};
            return m;
        }
        case 3: {
            StateMsg m;
            m.phase = static_cast<PhaseKind>(gen() % 3);
            if (gen() % 2) m.feedback = static_cast<FeedbackKind>(gen() % 2);
            m.feedback_frames_remaining = i(gen);
            m.ball_pos = random_vec(gen, -1, 2);
            m.target_center = {u(gen), u(gen)};
            m.radius = u(gen);
            m.score = i(gen);
            m.n_drops = i(gen);
            m.frames_seen = static_cast<std::int64_t>(gen() % 10'000'000'000ULL);
            if (gen() % 2) m.avatar = AvatarJoints{random_vec(gen, -1, 2), random_vec(gen, -1, 2), random_vec(gen, -1, 2)};
            return m;
        }
        case 4: {
            GameEvent e{static_cast<EventKind>(gen() % 7), static_cast<std::int64_t>(gen() % 1'000'000'000)};
            if (e.kind == EventKind::RadiusChanged) e.radius = u(gen);
            return EventMsg{e};
        }
        case 5:
            return CmdResultMsg{static_cast<SessionCmd>(gen() % 5), gen() % 2 == 0,
                                json{{"code", text()}, {"n", i(gen)}, {"x", u(gen)}, {"list", json::array({1, "a"})}}};
        default: return ErrorMsg{text(), text()};
    }
}

}  // namespace rehab::testing
