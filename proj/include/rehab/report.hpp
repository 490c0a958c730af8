#pragma once

// Session reports: a human-readable table (millimeters, whole-mm display)
// and a line-delimited JSON form with one record per radius level followed by
// a session summary. Neither form contains ids or wall-clock times, so equal
// sessions give byte-identical reports.

#include <rehab/persistence.hpp>

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

namespace rehab {

/// Target radius in force when the session ended.
inline double end_radius(const SessionRecord& r) {
    double radius = r.dda.r0;
    for (const auto& e : r.events) {
        if (e.kind == EventKind::RadiusChanged) radius = e.radius;
    }
    return radius;
}

namespace detail {

inline std::string mm(const std::optional<double>& meters) {
    if (!meters) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", *meters * 1000.0);
    return buf;
}

inline std::string percent(const std::optional<double>& fraction) {
    if (!fraction) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", *fraction * 100.0);
    return buf;
}

}  // namespace detail

inline std::string format_report(const SessionRecord& r) {
    const SessionMetrics& m = r.metrics;
    std::ostringstream os;
    char line[160];
    os << "Session summary\n";
    std::snprintf(line, sizeof line, "  %-22s %s\n", "drops", std::to_string(m.n_drops).c_str());
    os << line;
    std::snprintf(line, sizeof line, "  %-22s %s\n", "hit rate", detail::percent(m.hit_rate).c_str());
    os << line;
    std::snprintf(line, sizeof line, "  %-22s %s mm\n", "accuracy (mean error)", detail::mm(m.accuracy_mre).c_str());
    os << line;
    std::snprintf(line, sizeof line, "  %-22s %s mm\n", "precision (RMS)", detail::mm(m.precision_rms).c_str());
    os << line;
    std::snprintf(line, sizeof line, "  %-22s %s mm\n", "end radius", detail::mm(end_radius(r)).c_str());
    os << line;
    os << "\nPer radius level\n";
    std::snprintf(line, sizeof line, "  %10s %6s %9s %12s %13s\n", "radius_mm", "drops", "hit_rate", "accuracy_mm",
                  "precision_mm");
    os << line;
    for (const auto& lvl : metrics_by_radius(r.drops, r.scene.target_center)) {
        std::snprintf(line, sizeof line, "  %10s %6d %9s %12s %13s\n", detail::mm(lvl.radius).c_str(),
                      lvl.metrics.n_drops, detail::percent(lvl.metrics.hit_rate).c_str(),
                      detail::mm(lvl.metrics.accuracy_mre).c_str(), detail::mm(lvl.metrics.precision_rms).c_str());
        os << line;
    }
    return os.str();
}

inline std::string report_jsonl(const SessionRecord& r) {
    std::string out;
    for (const auto& lvl : metrics_by_radius(r.drops, r.scene.target_center)) {
        out += json{{"type", "level"}, {"radius", lvl.radius}, {"metrics", to_json(lvl.metrics)}}.dump();
        out += '\n';
    }
    out += json{{"type", "summary"}, {"metrics", to_json(r.metrics)}, {"end_radius", end_radius(r)}}.dump();
    out += '\n';
    return out;
}

inline std::string event_log(const std::vector<GameEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        out += to_json(e).dump();
        out += '\n';
    }
    return out;
}

inline std::vector<GameEvent> parse_event_log(std::istream& in) {
    std::vector<GameEvent> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(event_from_json(json::parse(line)));
    }
    return out;
}

}  // namespace rehab
