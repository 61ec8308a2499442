#pragma once

#include <optional>

#include <Eigen/Dense>

#include "hydra/errors.hpp"

namespace hydra {

/// Physical constants of the three-tank rig. Water enters tank 1 through
/// pump 1 (constant rate k1), cascades 1 -> 2 -> 3 through two proportional
/// valves, and pump 2 recirculates tank 3 back into tank 1 at a rate
/// proportional to sqrt(x3).
struct PlantParams {
    double tank_area = 0.01;      // A, m^2
    double pipe_area = 0.0005;    // a, m^2
    double gravity = 9.81;        // g, m/s^2
    double connect_height = 0.05; // h_con, m, height of the tank-2/3 connection
    double pump1_rate = 1e-4;     // k1, m^3/s, constant inflow P1
    double pump2_gain = 0.2;      // k2, dimensionless, P2 = k2 * a * sqrt(2 g x3)
    double dt = 0.1;              // integration step, s

    void validate() const;
};

/// Water levels of the three tanks, metres. Levels are clamped to >= 0
/// after every integration step.
struct TankState {
    Eigen::Vector3d levels = Eigen::Vector3d::Zero();
};

/// Valve openings in [0, 1]: v12 between tanks 1-2, v23 between tanks 2-3.
struct ActuatorInput {
    double valve12 = 0.0;
    double valve23 = 0.0;
};

/// Instantaneous flows, m^3/s.
struct Flows {
    double q12 = 0.0;  // tank 1 -> tank 2 through valve v12
    double q23 = 0.0;  // signed flow between tanks 2 and 3 (positive: 2 -> 3)
    double q23h = 0.0; // spill 2 -> 3 over the connection when tank 3 is below it
    double q32h = 0.0; // spill 3 -> 2 over the connection when tank 2 is below it
    double p1 = 0.0;   // pump 1 inflow into tank 1
    double p2 = 0.0;   // pump 2 flow, tank 3 -> tank 1
};

/// Evaluates the five flow formulas. Unit step delta(t) = 1 for t >= 0,
/// sign(0) = 0, and every sqrt argument is clamped to >= 0 first, so this
/// is total for any state.
Flows flows(const TankState& state, const ActuatorInput& input, const PlantParams& params);

/// Level rates (1/A times the mass balance):
///   A x1' = P1 + P2 - Q12
///   A x2' = Q12 - Q23 - Q23h + Q32h
///   A x3' = Q23 + Q23h - Q32h - P2
Eigen::Vector3d derivative(const TankState& state, const ActuatorInput& input,
                           const PlantParams& params);

/// One forward-Euler step x + dt * derivative + noise, then clamp each level
/// to >= 0. Without noise this is the deterministic transition map reused by
/// the state estimator.
TankState step(const TankState& state, const ActuatorInput& input, const PlantParams& params,
               const std::optional<Eigen::Vector3d>& noise = std::nullopt);

/// Identity observation map: y = x + v.
Eigen::Vector3d measure(const TankState& state,
                        const std::optional<Eigen::Vector3d>& noise = std::nullopt);

/// Proportional level controller with output quantization (a stand-in for a
/// PLC's low-level loop; quantum models the PLC's finite output resolution,
/// hold_steps its actuation scan cycle: the loop recomputes valve commands
/// every hold_steps transmission steps and holds them in between).
struct ControllerParams {
    double gain = 0.8;
    double quantum = 0.005;      // 0 disables quantization
    std::size_t hold_steps = 25; // 1 recomputes every step

    void validate() const;
};

/// Each valve opens proportionally to the upstream level's excess over its
/// setpoint: v12 from (x1 - setpoint1), v23 from (x2 - setpoint2); the third
/// setpoint is unused (tank 3 has no downstream valve). Output clamped to
/// [0, 1] and snapped to the quantization grid; deterministic in its inputs.
ActuatorInput level_controller(const Eigen::Vector3d& measured, const Eigen::Vector3d& setpoints,
                               const ControllerParams& params);

} // namespace hydra
