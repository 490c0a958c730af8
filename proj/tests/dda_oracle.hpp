#pragma once

// Independent reference for the difficulty rule, used by the unit and
// acceptance suites. It works on runs of equal outcomes instead of streak
// counters: inside a run, the k-th multiple of the streak length triggers a
// step, and a run boundary discards any partial streak.

#include <algorithm>
#include <vector>

namespace rehab::oracle {

struct DdaParams {
    double r0, r_min, r_max, alpha, beta;
    int s_streak, f_streak;
};

/// outcomes[i] is true for a hit. Returns the radius after every outcome.
inline std::vector<double> dda_trajectory(const DdaParams& p, const std::vector<bool>& outcomes) {
    std::vector<double> out;
    double r = p.r0;
    std::size_t i = 0;
    while (i < outcomes.size()) {
        std::size_t j = i;
        while (j < outcomes.size() && outcomes[j] == outcomes[i]) ++j;
        const bool hit = outcomes[i];
        const int every = hit ? p.s_streak : p.f_streak;
        for (std::size_t k = i; k < j; ++k) {
            const std::size_t pos_in_run = k - i + 1;
            if (pos_in_run % static_cast<std::size_t>(every) == 0) {
                r = hit ? std::max(p.r_min, r * p.alpha) : std::min(p.r_max, r * p.beta);
            }
            out.push_back(r);
        }
        i = j;
    }
    return out;
}

}  // namespace rehab::oracle
