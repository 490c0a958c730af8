#pragma once

// Movement quality from drop records.
//
//   accuracy  = mean radial distance of landing points from the target center
//   precision = RMS distance of landing points from their own centroid
//
// With no drops every measure is absent rather than zero.

#include <rehab/engine.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace rehab {

struct SessionMetrics {
    int n_drops = 0;
    std::optional<double> hit_rate;
    std::optional<double> accuracy_mre;
    std::optional<double> precision_rms;
    std::optional<double> final_radius;  // target radius in force at the last drop
    friend bool operator==(const SessionMetrics&, const SessionMetrics&) = default;
};

inline SessionMetrics compute_metrics(std::span<const DropRecord> drops, PlanePoint target_center) {
    SessionMetrics m;
    m.n_drops = static_cast<int>(drops.size());
    if (drops.empty()) return m;

    const double n = static_cast<double>(drops.size());
    double hits = 0, err_sum = 0, cx = 0, cz = 0;
    for (const auto& d : drops) {
        hits += d.hit ? 1 : 0;
        err_sum += distance(d.landing_xz, target_center);
        cx += d.landing_xz.x;
        cz += d.landing_xz.z;
    }
    cx /= n;
    cz /= n;
    double sq = 0;
    for (const auto& d : drops) {
        const double dx = d.landing_xz.x - cx, dz = d.landing_xz.z - cz;
        sq += dx * dx + dz * dz;
    }
    m.hit_rate = hits / n;
    m.accuracy_mre = err_sum / n;
    m.precision_rms = std::sqrt(sq / n);
    m.final_radius = drops.back().target_radius_at_drop;
    return m;
}

/// Incremental form of compute_metrics (Welford update of the 2-D centroid
/// and scatter), for live sessions.
class RunningMetrics {
public:
    explicit RunningMetrics(PlanePoint target_center) : target_(target_center) {}

    void add(const DropRecord& d) {
        ++n_;
        hits_ += d.hit ? 1 : 0;
        err_sum_ += distance(d.landing_xz, target_);
        const double dx = d.landing_xz.x - mean_x_, dz = d.landing_xz.z - mean_z_;
        mean_x_ += dx / n_;
        mean_z_ += dz / n_;
        m2_ += dx * (d.landing_xz.x - mean_x_) + dz * (d.landing_xz.z - mean_z_);
        last_radius_ = d.target_radius_at_drop;
    }

    SessionMetrics value() const {
        SessionMetrics m;
        m.n_drops = n_;
        if (n_ == 0) return m;
        m.hit_rate = static_cast<double>(hits_) / n_;
        m.accuracy_mre = err_sum_ / n_;
        m.precision_rms = std::sqrt(std::max(0.0, m2_) / n_);
        m.final_radius = last_radius_;
        return m;
    }

private:
    PlanePoint target_;
    int n_ = 0;
    int hits_ = 0;
    double err_sum_ = 0, mean_x_ = 0, mean_z_ = 0, m2_ = 0, last_radius_ = 0;
};

struct LevelMetrics {
    double radius = 0.0;
    SessionMetrics metrics;
};

/// Metrics grouped by the target radius in force at each drop, largest
/// radius first.
inline std::vector<LevelMetrics> metrics_by_radius(std::span<const DropRecord> drops, PlanePoint target_center) {
    std::map<double, std::vector<DropRecord>, std::greater<>> groups;
    for (const auto& d : drops) groups[d.target_radius_at_drop].push_back(d);
    std::vector<LevelMetrics> out;
    out.reserve(groups.size());
    for (const auto& [r, ds] : groups) out.push_back({r, compute_metrics(ds, target_center)});
    return out;
}

}  // namespace rehab
