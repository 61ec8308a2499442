#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hydra/errors.hpp"

namespace hydra {

/// Per-component residual thresholds learned from a fault/attack-free window.
struct ThresholdVector {
    Eigen::VectorXd beta;        // margin already applied
    std::size_t calibration_len = 0;
    double margin = 1.0;
};

/// beta_i = margin * max_k |r_{k,i}| over the supplied healthy window.
/// Absolute values keep the rule two-sided; it reduces to the plain max for
/// non-negative residuals. Throws CalibrationError on an empty history.
ThresholdVector calibrate(const std::vector<Eigen::VectorXd>& residual_history,
                          double margin = 1.0);

enum class Hypothesis { healthy, under_attack }; // H0 / H1

struct Decision {
    Hypothesis hypothesis = Hypothesis::healthy;
    std::vector<int> violated_components; // non-empty iff under_attack
};

/// Component i is violated iff |r_i| > beta_i; H1 iff any component is.
/// Equality stays healthy, per the H0 branch of the decision rule.
Decision decide(const Eigen::VectorXd& r, const ThresholdVector& thresholds);

struct AlarmEvent {
    std::size_t step = 0;
    std::vector<int> violated_components;
};

struct AlarmSummary {
    std::vector<AlarmEvent> events;
    /// first H1 step at or after onset, minus onset; only set when an onset
    /// was supplied and an alarm followed it
    std::optional<std::size_t> detection_delay;
};

/// One event per H1 decision, in order. decisions[i] is attributed to step
/// base_step + i.
AlarmSummary alarm_stream(const std::vector<Decision>& decisions, std::size_t base_step = 0,
                          std::optional<std::size_t> onset = std::nullopt);

/// Threshold persistence, so calibration and attack runs can be separate CLI
/// invocations. Plain text: margin, calibration length, one named beta line
/// per component.
void save_thresholds(const std::filesystem::path& path, const ThresholdVector& thresholds);
ThresholdVector load_thresholds(const std::filesystem::path& path);

} // namespace hydra
