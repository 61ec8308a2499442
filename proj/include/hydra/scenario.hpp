#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hydra/config.hpp"
#include "hydra/detector.hpp"

namespace hydra {

/// Everything observed in one transmission step.
struct StepRecord {
    std::size_t step = 0;
    Eigen::Vector3d x_true = Eigen::Vector3d::Zero();
    Eigen::Vector3d y_plain = Eigen::Vector3d::Zero(); // measurement before coding
    std::vector<double> payload_coded;                 // wire payload as delivered (empty if lost)
    std::optional<Eigen::Vector3d> y_decoded;          // accepted + decoded measurement
    Eigen::Vector3d xhat = Eigen::Vector3d::Zero();    // monitor estimate after the step
    std::optional<Eigen::Vector3d> residual;
    std::optional<Decision> decision; // only from the end of calibration on
    std::string adversary_action = "none";
    std::uint32_t seq = 0;
    bool delivered = false;
    bool gate_accepted = false;
};

struct RunSummary {
    std::size_t alarms = 0; // H1 decisions
    std::optional<std::size_t> detection_delay;
    double false_alarm_rate = 0.0; // H1 fraction of decided steps before onset
    std::size_t dropped_packets = 0; // lost + checksum-rejected + stale-rejected
    std::size_t missing_data_alarms = 0;
    std::optional<std::size_t> onset; // absolute step of the first substituted packet
    ThresholdVector thresholds;
};

struct RunLog {
    std::vector<StepRecord> records; // exactly horizon entries
    RunSummary summary;
    std::vector<std::string> packet_log; // capture-log lines, header excluded
};

/// Runs the full closed loop: phase 1 (steps [0, T)) healthy and calibrating,
/// phase 2 with the configured attack armed; the adversary picks its own
/// onset by watching the actuator commands. Deterministic in the config.
/// With preset_thresholds the calibration result is discarded in favour of
/// the supplied (previously persisted) thresholds.
RunLog run_scenario(const ScenarioConfig& cfg,
                    const std::optional<ThresholdVector>& preset_thresholds = std::nullopt);

/// Phase 1 only: runs the calibration window and computes thresholds,
/// never arming the attack.
RunLog run_calibration_only(const ScenarioConfig& cfg);

/// Writes <dir>/run.csv (17 fixed columns: step, x1..x3 true, y1..y3
/// decoded, r1..r3, beta1..beta3, decision, adversary_action, seq,
/// delivered) and <dir>/summary.csv. Number cells use shortest round-trip
/// formatting, so re-parsing reproduces the logged values exactly.
void emit_csv(const RunLog& log, const std::filesystem::path& dir);

/// Writes <dir>/packets.csv, the packet-capture log.
void emit_packets_csv(const RunLog& log, const std::filesystem::path& dir);

/// Writes residuals.dat, thresholds.dat, onset.dat and a ready-to-run
/// gnuplot script plot.gp into dir.
void emit_plot_data(const RunLog& log, const std::filesystem::path& dir);

/// One parsed row of run.csv.
struct RunCsvRow {
    std::size_t step = 0;
    Eigen::Vector3d x_true = Eigen::Vector3d::Zero();
    Eigen::Vector3d y_decoded = Eigen::Vector3d::Zero(); // NaN when missing
    Eigen::Vector3d residual = Eigen::Vector3d::Zero();  // NaN when missing
    Eigen::Vector3d beta = Eigen::Vector3d::Zero();
    std::string decision;
    std::string adversary_action;
    std::uint32_t seq = 0;
    bool delivered = false;
};

std::vector<RunCsvRow> parse_run_csv(const std::filesystem::path& file);

} // namespace hydra
