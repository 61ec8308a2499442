#pragma once

#include <functional>

#include <Eigen/Dense>

#include "hydra/errors.hpp"
#include "hydra/plant.hpp"

namespace hydra {

enum class EkfPhase { initial, predicted, updated };

/// Extended Kalman filter state. The observation map is the identity
/// (G = I), matching the plant's level sensors; the state dimension is
/// whatever xhat carries, so the same filter runs the 3-tank model and the
/// scalar test systems.
struct EkfState {
    Eigen::VectorXd xhat;
    Eigen::MatrixXd P;
    EkfPhase phase = EkfPhase::initial;
};

using TransitionFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central finite-difference Jacobian of f at x, with per-component
/// perturbation h_i = max(1e-6, 1e-6 |x_i|).
Eigen::MatrixXd numeric_jacobian(const TransitionFn& f, const Eigen::VectorXd& x);

/// Jacobian of the discrete (noise-free) plant step at the given point.
Eigen::Matrix3d jacobian_f(const Eigen::Vector3d& xhat, const ActuatorInput& u,
                           const PlantParams& params);

/// The noise-free plant step as a TransitionFn for the filter.
TransitionFn plant_transition(const ActuatorInput& u, const PlantParams& params);

/// Prediction: xhat <- f(xhat); P <- F P F^T + Q with F the numeric Jacobian
/// of f at the prior xhat; P re-symmetrized. Requires phase initial/updated.
void predict(EkfState& ekf, const TransitionFn& f, const Eigen::MatrixXd& Q);

/// Mahalanobis statistic of the innovation: nu^T S^-1 nu with
/// nu = y - xhat and S = P + R. Requires phase predicted.
double gate_statistic(const EkfState& ekf, const Eigen::VectorXd& y, const Eigen::MatrixXd& R);

/// Validation gate: accept the measurement iff the statistic is within the
/// chi-square threshold.
bool gate(const EkfState& ekf, const Eigen::VectorXd& y, const Eigen::MatrixXd& R,
          double chi2_threshold);

/// Measurement update: K = P (P + R)^-1; xhat += K nu; P <- (I - K) P,
/// re-symmetrized. Requires phase predicted (gate enforcement is the
/// caller's job; on rejection simply skip the update).
void update(EkfState& ekf, const Eigen::VectorXd& y, const Eigen::MatrixXd& R);

/// Detector residual r = y - xhat. Normally evaluated on the updated
/// estimate; when the gate rejected, the caller passes the predicted state
/// so the measurement still reaches the detector.
Eigen::VectorXd residual(const Eigen::VectorXd& y, const EkfState& ekf);

} // namespace hydra
