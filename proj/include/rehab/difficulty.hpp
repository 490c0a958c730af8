#pragma once

// Dynamic difficulty: the target disc shrinks after a streak of hits and grows
// after a streak of misses, geometrically, within fixed bounds.

#include <algorithm>
#include <stdexcept>

namespace rehab {

struct DdaConfig {
    double r0 = 0.15;
    double r_min = 0.03;
    double r_max = 0.30;
    double alpha = 0.8;   // shrink factor
    double beta = 1.25;   // growth factor
    int s_streak = 3;     // hits per shrink
    int f_streak = 3;     // misses per growth
    friend bool operator==(const DdaConfig&, const DdaConfig&) = default;
};

inline void check(const DdaConfig& c) {
    if (!(0 < c.r_min && c.r_min <= c.r0 && c.r0 <= c.r_max))
        throw std::invalid_argument("dda: require 0 < r_min <= r0 <= r_max");
    if (!(0 < c.alpha && c.alpha < 1)) throw std::invalid_argument("dda: require 0 < alpha < 1");
    if (!(c.beta > 1)) throw std::invalid_argument("dda: require beta > 1");
    if (c.s_streak < 1 || c.f_streak < 1) throw std::invalid_argument("dda: streak lengths must be >= 1");
}

struct DifficultyState {
    double radius = 0.15;
    int success_streak = 0;
    int miss_streak = 0;
    friend bool operator==(const DifficultyState&, const DifficultyState&) = default;
};

inline DifficultyState initial_difficulty(const DdaConfig& c) { return {c.r0, 0, 0}; }

enum class Outcome { Hit, Miss };

inline DifficultyState dda_update(DifficultyState s, const DdaConfig& c, Outcome outcome) {
    if (outcome == Outcome::Hit) {
        s.miss_streak = 0;
        if (++s.success_streak == c.s_streak) {
            s.radius = std::max(c.r_min, s.radius * c.alpha);
            s.success_streak = 0;
        }
    } else {
        s.success_streak = 0;
        if (++s.miss_streak == c.f_streak) {
            s.radius = std::min(c.r_max, s.radius * c.beta);
            s.miss_streak = 0;
        }
    }
    return s;
}

}  // namespace rehab
