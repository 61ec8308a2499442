#include "hydra/plant.hpp"

#include <algorithm>
#include <cmath>

namespace hydra {

namespace {

// delta_{-1}: unit step, inclusive at zero.
double unit_step(double t) {
    return t >= 0.0 ? 1.0 : 0.0;
}

double sign_of(double t) {
    if (t > 0.0) return 1.0;
    if (t < 0.0) return -1.0;
    return 0.0;
}

// sqrt with the argument clamped to >= 0; levels can dip negative numerically.
double safe_sqrt(double t) {
    return std::sqrt(std::max(t, 0.0));
}

} // namespace

void PlantParams::validate() const {
    if (!(tank_area > 0.0) || !(pipe_area > 0.0) || !(gravity > 0.0) || !(dt > 0.0))
        throw ConfigError("plant: A, a, grav and dt must be positive");
    if (connect_height < 0.0 || pump1_rate < 0.0 || pump2_gain < 0.0)
        throw ConfigError("plant: h_con, k1 and k2 must be non-negative");
}

void ControllerParams::validate() const {
    if (gain < 0.0 || quantum < 0.0)
        throw ConfigError("controller: gain and quantum must be non-negative");
    if (hold_steps < 1)
        throw ConfigError("controller: hold_steps must be at least 1");
}

Flows flows(const TankState& state, const ActuatorInput& input, const PlantParams& params) {
    const double x1 = state.levels(0);
    const double x2 = state.levels(1);
    const double x3 = state.levels(2);
    const double a = params.pipe_area;
    const double g2 = 2.0 * params.gravity;
    const double hc = params.connect_height; // x_con and h_con are the same height

    Flows f;
    f.q12 = a * input.valve12 * safe_sqrt(g2 * x1);
    f.q23 = a * input.valve23 * unit_step(x2 - hc) * unit_step(x3 - hc) * sign_of(x2 - x3) *
            safe_sqrt(g2 * std::abs(x2 - x3));
    f.q23h = a * input.valve23 * unit_step(x2 - hc) * unit_step(hc - x3) * safe_sqrt(g2 * (x2 - hc));
    f.q32h = a * input.valve23 * unit_step(x3 - hc) * unit_step(hc - x2) * safe_sqrt(g2 * (x3 - hc));
    f.p2 = params.pump2_gain * a * safe_sqrt(g2 * x3);
    f.p1 = params.pump1_rate;
    return f;
}

Eigen::Vector3d derivative(const TankState& state, const ActuatorInput& input,
                           const PlantParams& params) {
    const Flows f = flows(state, input, params);
    Eigen::Vector3d d;
    d(0) = f.p1 + f.p2 - f.q12;
    d(1) = f.q12 - f.q23 - f.q23h + f.q32h;
    d(2) = f.q23 + f.q23h - f.q32h - f.p2;
    return d / params.tank_area;
}

TankState step(const TankState& state, const ActuatorInput& input, const PlantParams& params,
               const std::optional<Eigen::Vector3d>& noise) {
    TankState next;
    next.levels = state.levels + params.dt * derivative(state, input, params);
    if (noise)
        next.levels += *noise;
    next.levels = next.levels.cwiseMax(0.0);
    return next;
}

Eigen::Vector3d measure(const TankState& state, const std::optional<Eigen::Vector3d>& noise) {
    if (noise)
        return state.levels + *noise;
    return state.levels;
}

ActuatorInput level_controller(const Eigen::Vector3d& measured, const Eigen::Vector3d& setpoints,
                               const ControllerParams& params) {
    const auto law = [&](double level, double setpoint) {
        double v = std::clamp(params.gain * (level - setpoint), 0.0, 1.0);
        if (params.quantum > 0.0)
            v = std::round(v / params.quantum) * params.quantum;
        return std::clamp(v, 0.0, 1.0);
    };
    ActuatorInput u;
    u.valve12 = law(measured(0), setpoints(0));
    u.valve23 = law(measured(1), setpoints(1));
    return u;
}

} // namespace hydra
