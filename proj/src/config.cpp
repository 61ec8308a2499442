#include "hydra/config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "hydra/text.hpp"

namespace hydra {

void EkfOptions::validate() const {
    if (!(chi2_threshold > 0.0))
        throw ConfigError("ekf: chi2 threshold must be positive");
    if (p0 < 0.0)
        throw ConfigError("ekf: initial covariance must be non-negative");
    if (init_offset < -1.0)
        throw ConfigError("ekf: initial-estimate offset below -1 makes levels negative");
}

void ScenarioConfig::validate() const {
    plant.validate();
    controller.validate();
    channel.validate();
    attack.validate();
    ekf.validate();
    if (calibration_len < 1 || horizon <= calibration_len)
        throw ConfigError("scenario: horizon must exceed calibration_len >= 1");
    if (!(margin > 0.0))
        throw ConfigError("scenario: margin must be positive");
    if ((x0.array() < 0.0).any())
        throw ConfigError("scenario: initial levels must be non-negative");
    if (max_consecutive_losses < 1)
        throw ConfigError("scenario: max_consecutive_losses must be at least 1");
    for (int i = 0; i < 3; ++i) {
        if (noise.Q(i, i) < 0.0 || noise.R(i, i) < 0.0)
            throw ConfigError("noise: variances must be non-negative");
    }
}

ScenarioConfig default_scenario_config() {
    ScenarioConfig cfg;
    cfg.noise.Q = Eigen::Matrix3d::Identity() * 1e-5;
    cfg.noise.R = Eigen::Matrix3d::Identity() * 1e-5;
    cfg.noise.rng_seed = 42;
    cfg.channel.key = cfg.key;
    cfg.channel.rng_seed = 1042;
    cfg.attack.bias = Eigen::Vector3d::Constant(0.05);
    return cfg;
}

AttackMode attack_mode_from_name(const std::string& name) {
    if (name == "none") return AttackMode::none;
    if (name == "replay_payload") return AttackMode::replay_payload;
    if (name == "replay_packet") return AttackMode::replay_packet;
    if (name == "bias_injection") return AttackMode::bias_injection;
    throw ConfigError("unknown attack mode '" + name + "'");
}

std::string attack_mode_name(AttackMode mode) {
    switch (mode) {
    case AttackMode::none: return "none";
    case AttackMode::replay_payload: return "replay_payload";
    case AttackMode::replay_packet: return "replay_packet";
    case AttackMode::bias_injection: return "bias_injection";
    }
    return "none";
}

namespace {

struct KeyBinding {
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw ConfigError("expected a boolean (true/false), got '" + v + "'");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

double to_double(const std::string& v) {
    try {
        return parse_double(v);
    } catch (const Error&) {
        throw ConfigError("expected a number, got '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& v) {
    try {
        return parse_u64(v);
    } catch (const Error&) {
        throw ConfigError("expected a non-negative integer, got '" + v + "'");
    }
}

const std::vector<std::pair<std::string, KeyBinding>>& bindings() {
    using C = ScenarioConfig;
    static const std::vector<std::pair<std::string, KeyBinding>> table = {
        {"plant.A", {[](C& c, const std::string& v) { c.plant.tank_area = to_double(v); },
                     [](const C& c) { return format_double(c.plant.tank_area); }}},
        {"plant.a", {[](C& c, const std::string& v) { c.plant.pipe_area = to_double(v); },
                     [](const C& c) { return format_double(c.plant.pipe_area); }}},
        {"plant.grav", {[](C& c, const std::string& v) { c.plant.gravity = to_double(v); },
                        [](const C& c) { return format_double(c.plant.gravity); }}},
        {"plant.h_con", {[](C& c, const std::string& v) { c.plant.connect_height = to_double(v); },
                         [](const C& c) { return format_double(c.plant.connect_height); }}},
        {"plant.k1", {[](C& c, const std::string& v) { c.plant.pump1_rate = to_double(v); },
                      [](const C& c) { return format_double(c.plant.pump1_rate); }}},
        {"plant.k2", {[](C& c, const std::string& v) { c.plant.pump2_gain = to_double(v); },
                      [](const C& c) { return format_double(c.plant.pump2_gain); }}},
        {"plant.dt", {[](C& c, const std::string& v) { c.plant.dt = to_double(v); },
                      [](const C& c) { return format_double(c.plant.dt); }}},
        {"scenario.x0_1", {[](C& c, const std::string& v) { c.x0(0) = to_double(v); },
                           [](const C& c) { return format_double(c.x0(0)); }}},
        {"scenario.x0_2", {[](C& c, const std::string& v) { c.x0(1) = to_double(v); },
                           [](const C& c) { return format_double(c.x0(1)); }}},
        {"scenario.x0_3", {[](C& c, const std::string& v) { c.x0(2) = to_double(v); },
                           [](const C& c) { return format_double(c.x0(2)); }}},
        {"noise.q1", {[](C& c, const std::string& v) { c.noise.Q(0, 0) = to_double(v); },
                      [](const C& c) { return format_double(c.noise.Q(0, 0)); }}},
        {"noise.q2", {[](C& c, const std::string& v) { c.noise.Q(1, 1) = to_double(v); },
                      [](const C& c) { return format_double(c.noise.Q(1, 1)); }}},
        {"noise.q3", {[](C& c, const std::string& v) { c.noise.Q(2, 2) = to_double(v); },
                      [](const C& c) { return format_double(c.noise.Q(2, 2)); }}},
        {"noise.r1", {[](C& c, const std::string& v) { c.noise.R(0, 0) = to_double(v); },
                      [](const C& c) { return format_double(c.noise.R(0, 0)); }}},
        {"noise.r2", {[](C& c, const std::string& v) { c.noise.R(1, 1) = to_double(v); },
                      [](const C& c) { return format_double(c.noise.R(1, 1)); }}},
        {"noise.r3", {[](C& c, const std::string& v) { c.noise.R(2, 2) = to_double(v); },
                      [](const C& c) { return format_double(c.noise.R(2, 2)); }}},
        {"noise.rng_seed", {[](C& c, const std::string& v) { c.noise.rng_seed = to_u64(v); },
                            [](const C& c) { return std::to_string(c.noise.rng_seed); }}},
        {"key.p", {[](C& c, const std::string& v) {
                       c.key.p = static_cast<std::uint32_t>(to_u64(v));
                       c.channel.key.p = c.key.p;
                   },
                   [](const C& c) { return std::to_string(c.key.p); }}},
        {"key.seed", {[](C& c, const std::string& v) {
                          c.key.seed = to_u64(v);
                          c.channel.key.seed = c.key.seed;
                      },
                      [](const C& c) { return std::to_string(c.key.seed); }}},
        {"channel.coding_enabled",
         {[](C& c, const std::string& v) { c.channel.coding_enabled = parse_bool(v); },
          [](const C& c) { return bool_text(c.channel.coding_enabled); }}},
        {"channel.loss_probability",
         {[](C& c, const std::string& v) { c.channel.loss_probability = to_double(v); },
          [](const C& c) { return format_double(c.channel.loss_probability); }}},
        {"channel.rng_seed", {[](C& c, const std::string& v) { c.channel.rng_seed = to_u64(v); },
                              [](const C& c) { return std::to_string(c.channel.rng_seed); }}},
        {"channel.selection_modulus",
         {[](C& c, const std::string& v) {
              if (v == "full")
                  c.channel.selection_modulus = SelectionModulus::full_codebook;
              else if (v == "ny")
                  c.channel.selection_modulus = SelectionModulus::output_dimension;
              else
                  throw ConfigError("channel.selection_modulus must be 'full' or 'ny'");
          },
          [](const C& c) {
              return c.channel.selection_modulus == SelectionModulus::full_codebook ? "full" : "ny";
          }}},
        {"attack.mode", {[](C& c, const std::string& v) { c.attack.mode = attack_mode_from_name(v); },
                         [](const C& c) { return attack_mode_name(c.attack.mode); }}},
        {"attack.steady_window",
         {[](C& c, const std::string& v) { c.attack.steady_window = to_u64(v); },
          [](const C& c) { return std::to_string(c.attack.steady_window); }}},
        {"attack.steady_epsilon",
         {[](C& c, const std::string& v) { c.attack.steady_epsilon = to_double(v); },
          [](const C& c) { return format_double(c.attack.steady_epsilon); }}},
        {"attack.bias_1", {[](C& c, const std::string& v) { c.attack.bias(0) = to_double(v); },
                           [](const C& c) { return format_double(c.attack.bias(0)); }}},
        {"attack.bias_2", {[](C& c, const std::string& v) { c.attack.bias(1) = to_double(v); },
                           [](const C& c) { return format_double(c.attack.bias(1)); }}},
        {"attack.bias_3", {[](C& c, const std::string& v) { c.attack.bias(2) = to_double(v); },
                           [](const C& c) { return format_double(c.attack.bias(2)); }}},
        {"attack.recorder_capacity",
         {[](C& c, const std::string& v) { c.attack.recorder_capacity = to_u64(v); },
          [](const C& c) { return std::to_string(c.attack.recorder_capacity); }}},
        {"ekf.chi2_threshold",
         {[](C& c, const std::string& v) { c.ekf.chi2_threshold = to_double(v); },
          [](const C& c) { return format_double(c.ekf.chi2_threshold); }}},
        {"ekf.p0", {[](C& c, const std::string& v) { c.ekf.p0 = to_double(v); },
                    [](const C& c) { return format_double(c.ekf.p0); }}},
        {"ekf.init_offset", {[](C& c, const std::string& v) { c.ekf.init_offset = to_double(v); },
                             [](const C& c) { return format_double(c.ekf.init_offset); }}},
        {"ekf.residual_mode",
         {[](C& c, const std::string& v) {
              if (v == "posterior")
                  c.ekf.residual_mode = ResidualMode::posterior;
              else if (v == "innovation")
                  c.ekf.residual_mode = ResidualMode::innovation;
              else
                  throw ConfigError("ekf.residual_mode must be 'posterior' or 'innovation'");
          },
          [](const C& c) {
              return c.ekf.residual_mode == ResidualMode::posterior ? "posterior" : "innovation";
          }}},
        {"controller.gain", {[](C& c, const std::string& v) { c.controller.gain = to_double(v); },
                             [](const C& c) { return format_double(c.controller.gain); }}},
        {"controller.quantum",
         {[](C& c, const std::string& v) { c.controller.quantum = to_double(v); },
          [](const C& c) { return format_double(c.controller.quantum); }}},
        {"controller.hold_steps",
         {[](C& c, const std::string& v) { c.controller.hold_steps = to_u64(v); },
          [](const C& c) { return std::to_string(c.controller.hold_steps); }}},
        {"scenario.horizon", {[](C& c, const std::string& v) { c.horizon = to_u64(v); },
                              [](const C& c) { return std::to_string(c.horizon); }}},
        {"scenario.calibration_len",
         {[](C& c, const std::string& v) { c.calibration_len = to_u64(v); },
          [](const C& c) { return std::to_string(c.calibration_len); }}},
        {"scenario.setpoint_1", {[](C& c, const std::string& v) { c.setpoints(0) = to_double(v); },
                                 [](const C& c) { return format_double(c.setpoints(0)); }}},
        {"scenario.setpoint_2", {[](C& c, const std::string& v) { c.setpoints(1) = to_double(v); },
                                 [](const C& c) { return format_double(c.setpoints(1)); }}},
        {"scenario.setpoint_3", {[](C& c, const std::string& v) { c.setpoints(2) = to_double(v); },
                                 [](const C& c) { return format_double(c.setpoints(2)); }}},
        {"scenario.margin", {[](C& c, const std::string& v) { c.margin = to_double(v); },
                             [](const C& c) { return format_double(c.margin); }}},
        {"scenario.output_dir", {[](C& c, const std::string& v) { c.output_dir = v; },
                                 [](const C& c) { return c.output_dir; }}},
        {"scenario.max_consecutive_losses",
         {[](C& c, const std::string& v) { c.max_consecutive_losses = to_u64(v); },
          [](const C& c) { return std::to_string(c.max_consecutive_losses); }}},
    };
    return table;
}

const KeyBinding* find_binding(const std::string& key) {
    for (const auto& [name, binding] : bindings())
        if (name == key)
            return &binding;
    return nullptr;
}

} // namespace

ScenarioConfig parse_scenario_config(const std::string& text) {
    ScenarioConfig cfg = default_scenario_config();
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto content = trim(line);
        if (content.empty())
            continue;
        const auto eq = content.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key{trim(content.substr(0, eq))};
        const std::string value{trim(content.substr(eq + 1))};
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        if (!seen.insert(key).second)
            throw ConfigError("duplicate config key '" + key + "'");
        const KeyBinding* binding = find_binding(key);
        if (!binding)
            throw ConfigError("unknown config key '" + key + "'");
        try {
            binding->set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError("key '" + key + "': " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario_config(text.str());
}

std::string dump_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    for (const auto& [name, binding] : bindings())
        out << name << " = " << binding.get(cfg) << "\n";
    return out.str();
}

} // namespace hydra
