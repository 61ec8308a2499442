#include "hydra/ekf.hpp"

#include <cmath>

namespace hydra {

namespace {

void require_phase(const EkfState& ekf, EkfPhase wanted, const char* op) {
    if (ekf.phase != wanted)
        throw std::logic_error(std::string(op) + ": called in the wrong filter phase");
}

Eigen::LLT<Eigen::MatrixXd> innovation_factor(const EkfState& ekf, const Eigen::MatrixXd& R) {
    Eigen::MatrixXd s = ekf.P + R;
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success)
        throw NumericalError("innovation covariance is not invertible");
    return llt;
}

} // namespace

Eigen::MatrixXd numeric_jacobian(const TransitionFn& f, const Eigen::VectorXd& x) {
    const auto n = x.size();
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = std::max(1e-6, 1e-6 * std::abs(x(j)));
        Eigen::VectorXd hi = x, lo = x;
        hi(j) += h;
        lo(j) -= h;
        jac.col(j) = (f(hi) - f(lo)) / (2.0 * h);
    }
    return jac;
}

TransitionFn plant_transition(const ActuatorInput& u, const PlantParams& params) {
    return [u, params](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        TankState s;
        s.levels = x;
        return step(s, u, params).levels;
    };
}

Eigen::Matrix3d jacobian_f(const Eigen::Vector3d& xhat, const ActuatorInput& u,
                           const PlantParams& params) {
    return numeric_jacobian(plant_transition(u, params), xhat);
}

void predict(EkfState& ekf, const TransitionFn& f, const Eigen::MatrixXd& Q) {
    // Any phase is a legal starting point: predicted -> predicted happens
    // whenever the gate rejected or the packet never arrived.
    const Eigen::MatrixXd jac = numeric_jacobian(f, ekf.xhat);
    ekf.xhat = f(ekf.xhat);
    ekf.P = jac * ekf.P * jac.transpose() + Q;
    ekf.P = ((ekf.P + ekf.P.transpose()) / 2.0).eval();
    if (!ekf.xhat.allFinite() || !ekf.P.allFinite())
        throw NumericalError("predict produced a non-finite state");
    ekf.phase = EkfPhase::predicted;
}

double gate_statistic(const EkfState& ekf, const Eigen::VectorXd& y, const Eigen::MatrixXd& R) {
    require_phase(ekf, EkfPhase::predicted, "gate");
    const Eigen::VectorXd nu = y - ekf.xhat;
    const auto llt = innovation_factor(ekf, R);
    return nu.dot(llt.solve(nu));
}

bool gate(const EkfState& ekf, const Eigen::VectorXd& y, const Eigen::MatrixXd& R,
          double chi2_threshold) {
    return gate_statistic(ekf, y, R) <= chi2_threshold;
}

void update(EkfState& ekf, const Eigen::VectorXd& y, const Eigen::MatrixXd& R) {
    require_phase(ekf, EkfPhase::predicted, "update");
    const auto llt = innovation_factor(ekf, R);
    // K = P S^-1 (G = I); solve on the transpose since S is symmetric.
    const Eigen::MatrixXd gain = llt.solve(ekf.P).transpose();
    ekf.xhat += gain * (y - ekf.xhat);
    const auto n = ekf.xhat.size();
    ekf.P = (Eigen::MatrixXd::Identity(n, n) - gain) * ekf.P;
    ekf.P = ((ekf.P + ekf.P.transpose()) / 2.0).eval();
    if (!ekf.xhat.allFinite() || !ekf.P.allFinite())
        throw NumericalError("update produced a non-finite state");
    ekf.phase = EkfPhase::updated;
}

Eigen::VectorXd residual(const Eigen::VectorXd& y, const EkfState& ekf) {
    return y - ekf.xhat;
}

} // namespace hydra
