#pragma once

// File-per-session store.
//
// Layout: <store_root>/<session_id>, a line-delimited JSON file whose first
// line is the session header and whose remaining lines are drop and event
// records:
//
//   {"type":"session","schema_version":1,"session_id":...,"created_at_us":...,
//    "scene":{...},"gesture":{...},"dda":{...},"engine":{...},
//    "metrics":{...},"n_drops":N,"n_events":M}
//   {"type":"drop","drop":{...}}        x N
//   {"type":"event","event":{...}}      x M
//
// Saves are atomic: the record is written and fsynced under a hidden
// temporary name and then hard-linked into place, so readers see either no
// file or a complete one. Temporary files (leading '.') are never listed.

#include <rehab/codec.hpp>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace rehab {

inline constexpr int kSchemaVersion = 1;

struct SessionRecord {
    std::string session_id;
    std::int64_t created_at_us = 0;
    SceneConfig scene;
    DdaConfig dda;
    GestureConfig gesture;
    EngineConfig engine;
    std::vector<DropRecord> drops;
    std::vector<GameEvent> events;
    SessionMetrics metrics;
    int schema_version = kSchemaVersion;
    friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

struct SessionSummary {
    std::string session_id;
    std::int64_t created_at_us = 0;
    int n_drops = 0;
    std::optional<double> hit_rate;
    friend bool operator==(const SessionSummary&, const SessionSummary&) = default;
};

class StoreError : public std::runtime_error {
public:
    enum class Kind { StoreUnwritable, DuplicateId, NotFound, SchemaMismatch, CorruptRecord, InvalidId };

    StoreError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

constexpr std::string_view to_string(StoreError::Kind k) {
    switch (k) {
        case StoreError::Kind::StoreUnwritable: return "StoreUnwritable";
        case StoreError::Kind::DuplicateId:     return "DuplicateId";
        case StoreError::Kind::NotFound:        return "NotFound";
        case StoreError::Kind::SchemaMismatch:  return "SchemaMismatch";
        case StoreError::Kind::CorruptRecord:   return "CorruptRecord";
        case StoreError::Kind::InvalidId:       return "InvalidId";
    }
    return "?";
}

/// Ids are restricted to a filename-safe alphabet and may not start with '.'.
inline bool valid_session_id(std::string_view id) {
    if (id.empty() || id.size() > 128 || id.front() == '.') return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-' || c == '_' ||
               c == '.';
    });
}

/// "<created_at_us, 16 digits>-<8 hex digits>": sorts by creation time.
inline std::string new_session_id(std::int64_t created_at_us) {
    static thread_local std::mt19937_64 gen{std::random_device{}()};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%016lld-%08llx", static_cast<long long>(created_at_us),
                  static_cast<unsigned long long>(gen() & 0xffffffffULL));
    return buf;
}

inline std::int64_t now_us() {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

/// Builds a record for a finished run; metrics are derived from the drops.
inline SessionRecord make_record(const GameConfig& cfg, const GameState& state, std::vector<GameEvent> events,
                                 std::int64_t created_at_us) {
    SessionRecord r;
    r.created_at_us = created_at_us;
    r.session_id = new_session_id(created_at_us);
    r.scene = cfg.scene;
    r.dda = cfg.dda;
    r.gesture = cfg.gesture;
    r.engine = cfg.engine;
    r.drops = state.drops;
    r.events = std::move(events);
    r.metrics = compute_metrics(r.drops, r.scene.target_center);
    return r;
}

inline std::string encode_record(const SessionRecord& r) {
    std::string out;
    json header{{"type", "session"},
                {"schema_version", r.schema_version},
                {"session_id", r.session_id},
                {"created_at_us", r.created_at_us},
                {"scene", to_json(r.scene)},
                {"gesture", to_json(r.gesture)},
                {"dda", to_json(r.dda)},
                {"engine", to_json(r.engine)},
                {"metrics", to_json(r.metrics)},
                {"n_drops", r.drops.size()},
                {"n_events", r.events.size()}};
    out += header.dump();
    out += '\n';
    for (const auto& d : r.drops) {
        out += json{{"type", "drop"}, {"drop", to_json(d)}}.dump();
        out += '\n';
    }
    for (const auto& e : r.events) {
        out += json{{"type", "event"}, {"event", to_json(e)}}.dump();
        out += '\n';
    }
    return out;
}

namespace detail {

struct Header {
    SessionRecord record;  // drops/events empty
    std::size_t n_drops = 0;
    std::size_t n_events = 0;
};

inline Header decode_header(const json& j) {
    StrictObject o(j, "session header");
    std::string type;
    o.string("type", type);
    if (type != "session") throw DecodeError("first record is not a session header");
    Header h;
    SessionRecord& r = h.record;
    o.integer("schema_version", r.schema_version);
    if (r.schema_version != kSchemaVersion) {
        throw StoreError(StoreError::Kind::SchemaMismatch,
                         "schema_version " + std::to_string(r.schema_version) + " (expected " +
                             std::to_string(kSchemaVersion) + ")");
    }
    o.string("session_id", r.session_id);
    o.integer("created_at_us", r.created_at_us);
    apply(o.require("scene"), r.scene);
    apply(o.require("gesture"), r.gesture);
    apply(o.require("dda"), r.dda);
    apply(o.require("engine"), r.engine);
    r.metrics = metrics_from_json(o.require("metrics"));
    o.require("n_drops");
    o.integer("n_drops", h.n_drops);
    o.require("n_events");
    o.integer("n_events", h.n_events);
    o.finish();
    return h;
}

}  // namespace detail

/// Parses a stored record and verifies schema, completeness and that the
/// stored metrics agree with the drops.
inline SessionRecord decode_record(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw StoreError(StoreError::Kind::CorruptRecord, "empty record");
    SessionRecord r;
    std::size_t n_drops = 0, n_events = 0;
    try {
        auto h = detail::decode_header(json::parse(line));
        r = std::move(h.record);
        n_drops = h.n_drops;
        n_events = h.n_events;
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            json j = json::parse(line);
            detail::StrictObject o(j, "line " + std::to_string(line_no));
            std::string type;
            o.string("type", type);
            if (type == "drop") {
                if (!r.events.empty()) throw DecodeError("drop after events");
                r.drops.push_back(drop_from_json(o.require("drop")));
            } else if (type == "event") {
                r.events.push_back(event_from_json(o.require("event")));
            } else {
                throw DecodeError("line " + std::to_string(line_no) + ": unexpected record type '" + type + "'");
            }
            o.finish();
        }
    } catch (const StoreError&) {
        throw;
    } catch (const std::exception& e) {
        throw StoreError(StoreError::Kind::CorruptRecord, e.what());
    }
    if (r.drops.size() != n_drops || r.events.size() != n_events) {
        throw StoreError(StoreError::Kind::CorruptRecord, "record is incomplete");
    }
    if (compute_metrics(r.drops, r.scene.target_center) != r.metrics) {
        throw StoreError(StoreError::Kind::CorruptRecord, "stored metrics disagree with drops");
    }
    return r;
}

inline SessionRecord decode_record(const std::string& text) {
    std::istringstream in(text);
    return decode_record(in);
}

/// Test seam: called at named points of save(). A hook may terminate the
/// process to simulate a crash at that point.
using SaveHook = std::function<void(std::string_view point)>;

class SessionStore {
public:
    explicit SessionStore(std::filesystem::path root, SaveHook hook = {}) : root_(std::move(root)), hook_(std::move(hook)) {}

    const std::filesystem::path& root() const { return root_; }

    std::string save(const SessionRecord& r) const {
        using K = StoreError::Kind;
        if (!valid_session_id(r.session_id)) throw StoreError(K::InvalidId, "invalid session id '" + r.session_id + "'");
        std::error_code ec;
        std::filesystem::create_directories(root_, ec);
        if (ec) throw StoreError(K::StoreUnwritable, "cannot create store '" + root_.string() + "': " + ec.message());
        const auto final_path = root_ / r.session_id;
        if (std::filesystem::exists(final_path, ec)) throw StoreError(K::DuplicateId, "duplicate id " + r.session_id);

        static std::atomic<unsigned> counter{0};
        const auto tmp_path =
            root_ / ("." + r.session_id + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++));
        const std::string data = encode_record(r);

        const int fd = ::open(tmp_path.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
        if (fd < 0) throw StoreError(K::StoreUnwritable, "open " + tmp_path.string() + ": " + std::strerror(errno));
        auto fail = [&](const std::string& what) {
            const std::string msg = what + ": " + std::strerror(errno);
            ::close(fd);
            ::unlink(tmp_path.c_str());
            throw StoreError(K::StoreUnwritable, msg);
        };
        const std::size_t half = data.size() / 2;
        if (!write_all(fd, std::string_view(data).substr(0, half))) fail("write");
        if (hook_) hook_("partial_write");
        if (!write_all(fd, std::string_view(data).substr(half))) fail("write");
        if (::fsync(fd) != 0) fail("fsync");
        ::close(fd);
        if (hook_) hook_("before_publish");

        if (::link(tmp_path.c_str(), final_path.c_str()) != 0) {
            const int err = errno;
            ::unlink(tmp_path.c_str());
            if (err == EEXIST) throw StoreError(K::DuplicateId, "duplicate id " + r.session_id);
            throw StoreError(K::StoreUnwritable, "link: " + std::string(std::strerror(err)));
        }
        ::unlink(tmp_path.c_str());
        sync_dir();
        return r.session_id;
    }

    SessionRecord load(const std::string& id) const {
        std::ifstream in(path_for(id));
        if (!in) throw StoreError(StoreError::Kind::NotFound, "no session " + id);
        SessionRecord r = decode_record(in);
        if (r.session_id != id) throw StoreError(StoreError::Kind::CorruptRecord, "id mismatch in " + id);
        return r;
    }

    void remove(const std::string& id) const {
        const auto p = path_for(id);
        if (::unlink(p.c_str()) != 0) {
            if (errno == ENOENT) throw StoreError(StoreError::Kind::NotFound, "no session " + id);
            throw StoreError(StoreError::Kind::StoreUnwritable, "unlink " + p.string() + ": " + std::strerror(errno));
        }
        sync_dir();
    }

    /// Summaries of every readable record, oldest first. Unreadable files are skipped.
    std::vector<SessionSummary> list() const {
        std::vector<SessionSummary> out;
        std::error_code ec;
        if (!std::filesystem::is_directory(root_, ec)) return out;
        for (const auto& entry : std::filesystem::directory_iterator(root_, ec)) {
            const std::string name = entry.path().filename().string();
            if (!valid_session_id(name) || !entry.is_regular_file(ec)) continue;
            std::ifstream in(entry.path());
            std::string line;
            if (!std::getline(in, line)) continue;
            try {
                auto h = detail::decode_header(json::parse(line));
                out.push_back({h.record.session_id, h.record.created_at_us, h.record.metrics.n_drops,
                               h.record.metrics.hit_rate});
            } catch (const std::exception&) {
                continue;
            }
        }
        std::sort(out.begin(), out.end(), [](const SessionSummary& a, const SessionSummary& b) {
            return std::tie(a.created_at_us, a.session_id) < std::tie(b.created_at_us, b.session_id);
        });
        return out;
    }

private:
    std::filesystem::path path_for(const std::string& id) const {
        if (!valid_session_id(id)) throw StoreError(StoreError::Kind::NotFound, "no session " + id);
        return root_ / id;
    }

    static bool write_all(int fd, std::string_view data) {
        while (!data.empty()) {
            const ssize_t n = ::write(fd, data.data(), data.size());
            if (n < 0) {
                if (errno == EINTR) continue;
                return false;
            }
            data.remove_prefix(static_cast<std::size_t>(n));
        }
        return true;
    }

    void sync_dir() const {
        const int dfd = ::open(root_.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
        if (dfd >= 0) {
            ::fsync(dfd);
            ::close(dfd);
        }
    }

    std::filesystem::path root_;
    SaveHook hook_;
};

}  // namespace rehab
