#include "hydra/adversary.hpp"

#include <algorithm>
#include <cmath>

namespace hydra {

void AttackConfig::validate() const {
    if (steady_window < 1)
        throw ConfigError("attack: steady window must be at least 1");
    if (steady_epsilon < 0.0)
        throw ConfigError("attack: steady epsilon must be non-negative");
    if (recorder_capacity < 1)
        throw ConfigError("attack: recorder capacity must be at least 1");
}

namespace {

bool spread_within(std::span<const ActuatorInput> window, double eps) {
    double lo12 = window[0].valve12, hi12 = lo12;
    double lo23 = window[0].valve23, hi23 = lo23;
    for (const auto& u : window) {
        lo12 = std::min(lo12, u.valve12);
        hi12 = std::max(hi12, u.valve12);
        lo23 = std::min(lo23, u.valve23);
        hi23 = std::max(hi23, u.valve23);
    }
    return (hi12 - lo12) <= eps && (hi23 - lo23) <= eps;
}

} // namespace

std::optional<std::size_t> detect_steady_state(std::span<const ActuatorInput> commands,
                                               const AttackConfig& cfg) {
    const std::size_t w = cfg.steady_window;
    if (commands.size() < w)
        return std::nullopt;
    for (std::size_t t = w - 1; t < commands.size(); ++t) {
        if (spread_within(commands.subspan(t - (w - 1), w), cfg.steady_epsilon))
            return t;
    }
    return std::nullopt;
}

const Packet& RecorderBuffer::cycled(std::size_t steps_since_onset) const {
    if (recorded.empty())
        throw Error("replay buffer is empty");
    return recorded[steps_since_onset % recorded.size()];
}

Packet replay_intercept(const Packet& live, const RecorderBuffer& buffer, const AttackConfig& cfg,
                        std::size_t steps_since_onset) {
    const Packet& source = buffer.cycled(steps_since_onset);
    switch (cfg.mode) {
    case AttackMode::replay_payload: {
        Packet out = live;
        out.payload = source.payload;
        out.count = source.count;
        out.crc = packet_crc(out);
        return out;
    }
    case AttackMode::replay_packet:
        return source;
    case AttackMode::bias_injection: {
        Packet out = live;
        for (std::size_t i = 0; i < out.payload.size() && i < 3; ++i)
            out.payload[i] += cfg.bias(static_cast<Eigen::Index>(i));
        out.crc = packet_crc(out);
        return out;
    }
    case AttackMode::none:
        break;
    }
    return live;
}

bool Adversary::window_is_steady() const {
    if (window_.size() < cfg_.steady_window)
        return false;
    std::vector<ActuatorInput> snapshot(window_.begin(), window_.end());
    return spread_within(snapshot, cfg_.steady_epsilon);
}

void Adversary::observe_command(const ActuatorInput& u) {
    if (onset_step_ || cfg_.mode == AttackMode::none) {
        ++commands_seen_;
        return;
    }
    window_.push_back(u);
    if (window_.size() > cfg_.steady_window)
        window_.pop_front();
    if (window_is_steady()) {
        onset_step_ = commands_seen_;
        buffer_.recorded.assign(rolling_.begin(), rolling_.end());
    }
    ++commands_seen_;
}

std::optional<Packet> Adversary::intercept(const Packet& pkt) {
    if (cfg_.mode == AttackMode::none) {
        last_action_ = "idle";
        return pkt;
    }
    if (!onset_step_ || buffer_.recorded.empty()) {
        // disclosure phase: pass through untouched, remember recent payloads
        rolling_.push_back(pkt);
        if (rolling_.size() > cfg_.recorder_capacity)
            rolling_.pop_front();
        if (!onset_step_) {
            last_action_ = "observe";
            return pkt;
        }
        // onset fired before anything was recorded; keep watching
        buffer_.recorded.assign(rolling_.begin(), rolling_.end());
        buffer_.onset_seq = pkt.seq;
        last_action_ = "observe";
        return pkt;
    }
    if (replayed_ == 0)
        buffer_.onset_seq = pkt.seq;
    switch (cfg_.mode) {
    case AttackMode::replay_payload:
        last_action_ = "replay_payload";
        break;
    case AttackMode::replay_packet:
        last_action_ = "replay_packet";
        break;
    case AttackMode::bias_injection:
        last_action_ = "bias_injection";
        break;
    case AttackMode::none:
        break;
    }
    return replay_intercept(pkt, buffer_, cfg_, replayed_++);
}

} // namespace hydra
