#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hydra/channel.hpp"
#include "hydra/plant.hpp"

namespace hydra {

enum class AttackMode { none, replay_payload, replay_packet, bias_injection };

/// Parameters of the man-in-the-middle attack. Deliberately key-free: the
/// adversary can read and rewrite packets but never touches PSequenceKey
/// material, which is what makes the replay blind.
struct AttackConfig {
    AttackMode mode = AttackMode::none;
    std::size_t steady_window = 50;  // W, packets
    double steady_epsilon = 1e-3;    // max componentwise command spread in a window
    Eigen::Vector3d bias = Eigen::Vector3d::Zero(); // bias_injection only
    std::size_t recorder_capacity = 1;              // payload snapshots to cycle

    void validate() const;
};

/// First index t (0-based) such that all commands over the last W
/// observations [t-W+1, t] vary by at most steady_epsilon componentwise;
/// nullopt when the stream never settles.
std::optional<std::size_t> detect_steady_state(std::span<const ActuatorInput> commands,
                                               const AttackConfig& cfg);

/// Packets captured just before onset; the replay source material.
struct RecorderBuffer {
    std::vector<Packet> recorded; // oldest first
    std::uint32_t onset_seq = 0;

    const Packet& cycled(std::size_t steps_since_onset) const;
};

/// Core substitution rule, a pure function of the recorded buffer:
///   replay_payload  - keep the live seq, splice in the recorded payload
///                     (cycled), recompute the checksum; the coded bytes are
///                     reused verbatim because the key is unknown
///   replay_packet   - resend the recorded packet byte-identically (old seq)
///   bias_injection  - live payload plus a constant bias, checksum redone
Packet replay_intercept(const Packet& live, const RecorderBuffer& buffer, const AttackConfig& cfg,
                        std::size_t steps_since_onset);

/// Stateful MITM interceptor for the sensor channel. Until its steady-state
/// trigger fires it only watches: packets pass through byte-identical while
/// a rolling window of payloads is recorded. From onset on it substitutes
/// traffic according to the configured mode.
class Adversary {
public:
    explicit Adversary(AttackConfig cfg) : cfg_(std::move(cfg)) {}

    /// Feed one actuator command observed on the (uncoded) controller side.
    void observe_command(const ActuatorInput& u);

    /// Sensor-channel tap; plugs into Channel::transmit.
    std::optional<Packet> intercept(const Packet& pkt);

    bool active() const { return onset_step_.has_value(); }
    std::optional<std::size_t> onset_step() const { return onset_step_; }

    /// What happened to the last intercepted packet, for the capture log.
    const std::string& last_action() const { return last_action_; }

private:
    bool window_is_steady() const;

    AttackConfig cfg_;
    std::deque<ActuatorInput> window_;
    std::size_t commands_seen_ = 0;
    std::optional<std::size_t> onset_step_; // index in the observed command stream
    std::deque<Packet> rolling_;
    RecorderBuffer buffer_;
    std::size_t replayed_ = 0;
    std::string last_action_ = "idle";
};

} // namespace hydra
