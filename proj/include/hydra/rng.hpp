#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "hydra/errors.hpp"

namespace hydra {

/// Seedable Gaussian generator with a fully pinned-down algorithm so runs
/// replay bit-identically: mt19937_64 for the uniform stream, 53-bit mantissa
/// uniforms, Box-Muller for the normal pairs.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in (0, 1]; never 0, so log() below is always finite.
    double uniform01() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    double standard_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        spare_ = radius * std::sin(two_pi * u2);
        have_spare_ = true;
        return radius * std::cos(two_pi * u2);
    }

    Eigen::VectorXd standard_normal(int n) {
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i)
            z(i) = standard_normal();
        return z;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Process/measurement noise model: w ~ N(0, Q), v ~ N(0, R).
struct NoiseSpec {
    Eigen::Matrix3d Q = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d R = Eigen::Matrix3d::Zero();
    std::uint64_t rng_seed = 0;
};

/// Factor of a symmetric PSD matrix C such that F F^T = C, usable for
/// sampling correlated Gaussians. Uses LDLT so exactly-singular covariances
/// (zero rows) are fine; small negative pivots from rounding are clamped.
inline Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
    if (!cov.isApprox(cov.transpose(), 1e-9))
        throw InvalidElementError("covariance must be symmetric");
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("covariance factorization failed");
    Eigen::VectorXd d = ldlt.vectorD();
    for (int i = 0; i < d.size(); ++i) {
        if (d(i) < -1e-12)
            throw InvalidElementError("covariance is not positive semi-definite");
        d(i) = std::sqrt(std::max(d(i), 0.0));
    }
    Eigen::MatrixXd l = ldlt.matrixL();
    return ldlt.transpositionsP().transpose() * (l * d.asDiagonal());
}

/// Draws the per-step plant noise vectors for one simulation run.
class NoiseSource {
public:
    explicit NoiseSource(const NoiseSpec& spec)
        : sampler_(spec.rng_seed),
          lq_(psd_factor(spec.Q)),
          lr_(psd_factor(spec.R)) {}

    Eigen::Vector3d process() { return lq_ * sampler_.standard_normal(3); }
    Eigen::Vector3d measurement() { return lr_ * sampler_.standard_normal(3); }

private:
    GaussianSampler sampler_;
    Eigen::Matrix3d lq_;
    Eigen::Matrix3d lr_;
};

} // namespace hydra
