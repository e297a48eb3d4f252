#pragma once

#include <cmath>

namespace flsim {

struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double psi = 0.0;
};

// Explicit Euler step of the planar unicycle: position advances along the
// heading held at the start of the step, then the heading turns.
inline Pose2 euler_step(const Pose2& p, double speed, double yaw_rate, double dt) {
    Pose2 next;
    next.x = p.x + speed * std::cos(p.psi) * dt;
    next.y = p.y + speed * std::sin(p.psi) * dt;
    next.psi = p.psi + yaw_rate * dt;
    return next;
}

// Moves `current` toward `target` by at most `max_delta` (slew limit).
inline double ramp_toward(double current, double target, double max_delta) {
    if (current < target) return std::min(target, current + max_delta);
    return std::max(target, current - max_delta);
}

}  // namespace flsim
