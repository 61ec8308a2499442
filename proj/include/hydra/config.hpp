#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "hydra/adversary.hpp"
#include "hydra/channel.hpp"
#include "hydra/plant.hpp"
#include "hydra/rng.hpp"

namespace hydra {

enum class ResidualMode { posterior, innovation };

/// Monitor-side filter options.
struct EkfOptions {
    double chi2_threshold = 11.345; // chi-square, 3 dof, 99%
    double p0 = 1e-6;               // initial covariance, diagonal value
    double init_offset = 0.3;       // xhat0 = x0 * (1 + init_offset)
    ResidualMode residual_mode = ResidualMode::posterior;

    void validate() const;
};

/// Everything one simulation run needs. Defaults describe the stock
/// scenario; every field maps to one dotted config-file key.
struct ScenarioConfig {
    PlantParams plant;
    Eigen::Vector3d x0{0.20, 0.15, 0.12}; // initial tank levels
    NoiseSpec noise;
    PSequenceKey key{1, 7};
    ChannelConfig channel;
    AttackConfig attack;
    EkfOptions ekf;
    ControllerParams controller;
    std::size_t horizon = 5000;
    std::size_t calibration_len = 1000; // T
    Eigen::Vector3d setpoints{0.05, 0.05, 0.05};
    double margin = 1.2;
    std::string output_dir = "out";
    std::size_t max_consecutive_losses = 25; // missing-data alarm threshold

    void validate() const;
};

/// The stock scenario (healthy, coding on, no attack).
ScenarioConfig default_scenario_config();

/// Applies `key = value` entries parsed from a config file on top of the
/// defaults. Unknown keys, duplicate keys, and malformed values are hard
/// errors. '#' starts a comment.
ScenarioConfig load_scenario_config(const std::filesystem::path& path);
ScenarioConfig parse_scenario_config(const std::string& text);

/// One "key = value" line per setting, defaults included; the inverse of the
/// parser, handy for writing templates.
std::string dump_config(const ScenarioConfig& cfg);

AttackMode attack_mode_from_name(const std::string& name);
std::string attack_mode_name(AttackMode mode);

} // namespace hydra
