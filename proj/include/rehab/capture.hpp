#pragma once

// Frame sources: file replay and a seeded synthetic patient with a
// distance-dependent sensor noise model.

#include <rehab/core.hpp>
#include <rehab/rng.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rehab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Noise model

/// Per-axis zero-mean Gaussian whose sigma grows linearly with distance from
/// the sensor between the two envelope ends and is held constant outside.
struct NoiseModel {
    double sigma_near = 0.002;  // at 0.5 m
    double sigma_far = 0.040;   // at 5.0 m
    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

inline void check(const NoiseModel& m) {
    if (!(m.sigma_near >= 0) || !(m.sigma_far >= m.sigma_near))
        throw std::invalid_argument("noise: require 0 <= sigma_near <= sigma_far");
}

inline double noise_sigma(const NoiseModel& m, double d) {
    const double c = std::clamp(d, kMinDepth, kMaxDepth);
    return m.sigma_near + (m.sigma_far - m.sigma_near) * (c - kMinDepth) / (kMaxDepth - kMinDepth);
}

// ---------------------------------------------------------------------------
// Errors

class CaptureError : public std::runtime_error {
public:
    enum class Kind { FileNotFound, MalformedRecord, NonMonotonicTimestamp, InvalidFrame, EmptyScript, BadArgument };

    CaptureError(Kind kind, std::string what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), kind_(kind), line_(line) {}

    Kind kind() const { return kind_; }
    /// 1-based line number for file errors, 0 otherwise.
    std::size_t line() const { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

// ---------------------------------------------------------------------------
// Frame record codec (one JSON object per line)

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
        throw std::invalid_argument("expected [x, y, z] of numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline json frame_to_json(const SkeletonFrame& f) {
    json joints = json::object();
    for (const auto& [id, p] : f.joints) joints[std::string(to_string(id))] = to_json(p);
    return json{{"ts_us", f.timestamp_us},
                {"tracked", f.tracked},
                {"hand_state", std::string(to_string(f.right_hand_state))},
                {"joints", std::move(joints)}};
}

/// Decodes the fields of a frame record. Extra keys (such as a message
/// `type` tag) are ignored; missing or mistyped fields throw
/// std::invalid_argument.
inline SkeletonFrame frame_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("frame record must be an object");
    auto need = [&](const char* key) -> const json& {
        auto it = j.find(key);
        if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + key + "'");
        return *it;
    };
    SkeletonFrame f;
    const json& ts = need("ts_us");
    if (!ts.is_number_integer()) throw std::invalid_argument("ts_us must be an integer");
    f.timestamp_us = ts.get<std::int64_t>();
    const json& tracked = need("tracked");
    if (!tracked.is_boolean()) throw std::invalid_argument("tracked must be a boolean");
    f.tracked = tracked.get<bool>();
    const json& hs = need("hand_state");
    if (!hs.is_string()) throw std::invalid_argument("hand_state must be a string");
    auto state = hand_state_from_string(hs.get<std::string>());
    if (!state) throw std::invalid_argument("unknown hand_state '" + hs.get<std::string>() + "'");
    f.right_hand_state = *state;
    const json& joints = need("joints");
    if (!joints.is_object()) throw std::invalid_argument("joints must be an object");
    for (const auto& [name, value] : joints.items()) {
        auto id = joint_from_string(name);
        if (!id) throw std::invalid_argument("unknown joint '" + name + "'");
        try {
            f.joints.emplace(*id, vec3_from_json(value));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("joint '" + name + "': " + e.what());
        }
    }
    return f;
}

inline void write_frame(std::ostream& os, const SkeletonFrame& f) { os << frame_to_json(f).dump() << '\n'; }

inline void write_frames(std::ostream& os, const std::vector<SkeletonFrame>& frames) {
    for (const auto& f : frames) write_frame(os, f);
}

// ---------------------------------------------------------------------------
// Sources

/// Single-consumer producer of validated frames in timestamp order. Once
/// next() returns nullopt it keeps returning nullopt.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual std::optional<ValidFrame> next() = 0;
};

/// Reads frames lazily from a line-delimited frame file. Blank lines are
/// skipped but still counted for error line numbers.
class ReplaySource final : public FrameSource {
public:
    explicit ReplaySource(const std::string& path) : in_(path), path_(path) {
        if (!in_) throw CaptureError(CaptureError::Kind::FileNotFound, "cannot open frame file '" + path + "'");
    }

    std::optional<ValidFrame> next() override {
        if (ended_) return std::nullopt;
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            SkeletonFrame frame;
            try {
                frame = frame_from_json(json::parse(line));
            } catch (const json::exception& e) {
                fail(CaptureError::Kind::MalformedRecord, std::string("malformed record: ") + e.what());
            } catch (const std::exception& e) {
                fail(CaptureError::Kind::MalformedRecord, std::string("malformed record: ") + e.what());
            }
            auto checked = validate_frame(std::move(frame), prev_ts_);
            if (auto* rej = std::get_if<FrameRejection>(&checked)) {
                fail(rej->rule == FrameRule::NonMonotonicTimestamp ? CaptureError::Kind::NonMonotonicTimestamp
                                                                   : CaptureError::Kind::InvalidFrame,
                     std::string(to_string(rej->rule)) + ": " + rej->detail);
            }
            auto& valid = std::get<ValidFrame>(checked);
            prev_ts_ = valid->timestamp_us;
            return std::move(valid);
        }
        ended_ = true;
        return std::nullopt;
    }

private:
    [[noreturn]] void fail(CaptureError::Kind kind, std::string what) {
        ended_ = true;
        throw CaptureError(kind, std::move(what), line_no_);
    }

    std::ifstream in_;
    std::string path_;
    std::size_t line_no_ = 0;
    std::optional<std::int64_t> prev_ts_;
    bool ended_ = false;
};

inline std::unique_ptr<FrameSource> open_replay(const std::string& path) {
    return std::make_unique<ReplaySource>(path);
}

/// Replays an in-memory sequence, validating each frame as it is yielded.
class VectorSource final : public FrameSource {
public:
    explicit VectorSource(std::vector<SkeletonFrame> frames) : frames_(std::move(frames)) {}

    std::optional<ValidFrame> next() override {
        if (pos_ >= frames_.size()) return std::nullopt;
        auto checked = validate_frame(frames_[pos_], prev_ts_);
        if (auto* rej = std::get_if<FrameRejection>(&checked)) {
            pos_ = frames_.size();
            throw CaptureError(rej->rule == FrameRule::NonMonotonicTimestamp ? CaptureError::Kind::NonMonotonicTimestamp
                                                                             : CaptureError::Kind::InvalidFrame,
                               std::string(to_string(rej->rule)) + ": " + rej->detail);
        }
        ++pos_;
        auto& valid = std::get<ValidFrame>(checked);
        prev_ts_ = valid->timestamp_us;
        return std::move(valid);
    }

private:
    std::vector<SkeletonFrame> frames_;
    std::size_t pos_ = 0;
    std::optional<std::int64_t> prev_ts_;
};

/// Drains a source into a vector of plain frames.
inline std::vector<SkeletonFrame> collect(FrameSource& src) {
    std::vector<SkeletonFrame> out;
    while (auto f = src.next()) out.push_back(f->get());
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic patient

struct Waypoint {
    double t_s = 0.0;  // nominal time, seconds
    Vec3 hand;
    HandState hand_state = HandState::Open;  // held from this waypoint until the next
    friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct MovementScript {
    std::vector<Waypoint> waypoints;
    double tremor_amplitude = 0.0;  // meters, applied along x
    double tremor_frequency = 0.0;  // Hz
    double speed_scale = 1.0;       // < 1 slows every transit by 1/speed_scale
    friend bool operator==(const MovementScript&, const MovementScript&) = default;
};

inline void check(const MovementScript& s) {
    if (s.waypoints.empty()) throw CaptureError(CaptureError::Kind::EmptyScript, "movement script has no waypoints");
    for (std::size_t i = 1; i < s.waypoints.size(); ++i) {
        if (!(s.waypoints[i].t_s > s.waypoints[i - 1].t_s))
            throw CaptureError(CaptureError::Kind::BadArgument, "waypoint times must be strictly increasing");
    }
    if (!(s.tremor_amplitude >= 0)) throw CaptureError(CaptureError::Kind::BadArgument, "tremor_amplitude must be >= 0");
    if (!(s.tremor_frequency >= 0)) throw CaptureError(CaptureError::Kind::BadArgument, "tremor_frequency must be >= 0");
    if (!(s.speed_scale > 0 && s.speed_scale <= 1))
        throw CaptureError(CaptureError::Kind::BadArgument, "speed_scale must be in (0, 1]");
}

// Fixed arm offsets from the hand for synthetic skeletons: the player stands
// behind the table (larger z) with a nearly straight arm.
inline const Vec3 kElbowFromHand{0.04, 0.22, 0.20};
inline const Vec3 kWristFromHand{0.01, 0.02, 0.06};
inline const Vec3 kShoulderFromHand{0.08, 0.42, 0.40};
inline const Vec3 kSpineFromShoulder{-0.18, -0.55, 0.05};
inline const Vec3 kHeadFromShoulder{-0.18, 0.28, 0.00};

/// Samples a movement script at a fixed rate, adding tremor and sensor noise.
/// The output is a pure function of (script, noise, seed, fps).
class SyntheticSource final : public FrameSource {
public:
    SyntheticSource(MovementScript script, NoiseModel noise, std::uint64_t seed, double fps)
        : script_(std::move(script)), noise_(noise), rng_(seed), fps_(fps) {
        check(script_);
        check(noise_);
        if (!(fps_ > 0) || !std::isfinite(fps_)) throw CaptureError(CaptureError::Kind::BadArgument, "fps must be > 0");
        const auto& w = script_.waypoints;
        t0_ = w.front().t_s;
        scaled_.reserve(w.size());
        for (const auto& p : w) scaled_.push_back(t0_ + (p.t_s - t0_) / script_.speed_scale);
        const double span = scaled_.back() - t0_;
        count_ = static_cast<std::size_t>(std::floor(span * fps_ + 1e-9)) + 1;
        t0_us_ = std::llround(t0_ * 1e6);
    }

    std::size_t frame_count() const { return count_; }

    std::optional<ValidFrame> next() override {
        if (k_ >= count_) return std::nullopt;
        const double t_rel = static_cast<double>(k_) / fps_;
        SkeletonFrame f;
        f.timestamp_us = t0_us_ + std::llround(static_cast<double>(k_) * 1e6 / fps_);
        ++k_;

        auto [hand, state] = sample(t0_ + t_rel);
        if (script_.tremor_amplitude > 0 && script_.tremor_frequency > 0) {
            hand = hand + Vec3{script_.tremor_amplitude *
                                   std::sin(2.0 * std::numbers::pi * script_.tremor_frequency * t_rel),
                               0.0, 0.0};
        }
        const Vec3 shoulder = hand + kShoulderFromHand;
        JointMap truth{{JointId::HandRight, hand},
                       {JointId::WristRight, hand + kWristFromHand},
                       {JointId::ElbowRight, hand + kElbowFromHand},
                       {JointId::ShoulderRight, shoulder},
                       {JointId::SpineBase, shoulder + kSpineFromShoulder},
                       {JointId::Head, shoulder + kHeadFromShoulder}};
        f.tracked = true;
        for (auto& [id, p] : truth) {
            const double sigma = noise_sigma(noise_, p.norm());
            const double nx = normal_(rng_), ny = normal_(rng_), nz = normal_(rng_);
            const Vec3 noisy = p + Vec3{sigma * nx, sigma * ny, sigma * nz};
            if (noisy.z() < kMinDepth || noisy.z() > kMaxDepth) f.tracked = false;
            f.joints.emplace(id, noisy);
        }
        f.right_hand_state = state;
        return std::get<ValidFrame>(validate_frame(std::move(f), std::nullopt));
    }

private:
    std::pair<Vec3, HandState> sample(double t) const {
        const auto& w = script_.waypoints;
        if (t <= scaled_.front()) return {w.front().hand, w.front().hand_state};
        if (t >= scaled_.back() - 1e-12) return {w.back().hand, w.back().hand_state};
        const auto it = std::upper_bound(scaled_.begin(), scaled_.end(), t + 1e-12);
        const std::size_t i = static_cast<std::size_t>(it - scaled_.begin()) - 1;
        const double a = (t - scaled_[i]) / (scaled_[i + 1] - scaled_[i]);
        const Vec3 pos = w[i].hand + (w[i + 1].hand - w[i].hand) * std::clamp(a, 0.0, 1.0);
        return {pos, w[i].hand_state};
    }

    MovementScript script_;
    NoiseModel noise_;
    Xoshiro256ss rng_;
    NormalSampler normal_;
    double fps_;
    double t0_ = 0.0;
    std::int64_t t0_us_ = 0;
    std::vector<double> scaled_;
    std::size_t count_ = 0;
    std::size_t k_ = 0;
};

inline std::unique_ptr<FrameSource> generate(MovementScript script, NoiseModel noise, std::uint64_t seed,
                                             double fps = 30.0) {
    return std::make_unique<SyntheticSource>(std::move(script), noise, seed, fps);
}

}  // namespace rehab
