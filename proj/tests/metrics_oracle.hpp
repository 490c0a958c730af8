#pragma once

// Reference formulas for the movement metrics. Precision uses the pairwise
// identity  sum_i |p_i - c|^2 / n = sum_{i,j} |p_i - p_j|^2 / (2 n^2),
// which never forms the centroid.

#include <cmath>
#include <utility>
#include <vector>

namespace rehab::oracle {

struct MetricsRef {
    double accuracy;
    double precision;
};

inline MetricsRef metrics_ref(const std::vector<std::pair<double, double>>& pts, std::pair<double, double> target) {
    const double n = static_cast<double>(pts.size());
    double err = 0;
    for (const auto& [x, z] : pts) err += std::hypot(x - target.first, z - target.second);
    double pair_sq = 0;
    for (const auto& [xi, zi] : pts) {
        for (const auto& [xj, zj] : pts) pair_sq += (xi - xj) * (xi - xj) + (zi - zj) * (zi - zj);
    }
    return {err / n, std::sqrt(pair_sq / (2.0 * n * n))};
}

}  // namespace rehab::oracle
