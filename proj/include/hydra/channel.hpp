#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hydra/errors.hpp"
#include "hydra/keystream.hpp"

namespace hydra {

/// Sequenced wire frame carrying one (possibly coded) output vector.
///
/// Wire layout, byte-exact:
///   magic "HYD1" (4 bytes)
///   seq     u32 little-endian
///   count   u16 little-endian
///   payload count x IEEE-754 binary64 little-endian
///   crc32   u32 little-endian, polynomial 0xEDB88320, over all preceding bytes
struct Packet {
    std::uint32_t seq = 0;
    std::uint16_t count = 0;
    std::vector<double> payload;
    std::uint32_t crc = 0;
};

/// Which modulus maps the keystream onto the codebook: the full codebook
/// size 2^n n! (default), or literally the output dimension n, which uses
/// only the first n matrices of the sorted set.
enum class SelectionModulus { full_codebook, output_dimension };

struct ChannelConfig {
    bool coding_enabled = true;
    PSequenceKey key;
    double loss_probability = 0.0; // must be < 1
    std::uint64_t rng_seed = 0;
    SelectionModulus selection_modulus = SelectionModulus::full_codebook;

    void validate() const;
};

/// CRC-32 (reflected, init/final 0xFFFFFFFF, polynomial 0xEDB88320).
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize(const Packet& pkt);

/// Parses a wire frame; validates magic and framing, not the checksum
/// (the stored crc field is returned for the receiver to verify).
Packet parse(std::span<const std::uint8_t> bytes);

/// Recomputes the packet checksum over magic + header + payload.
std::uint32_t packet_crc(const Packet& pkt);

/// The codebook index used for a packet of `count` measurements at `seq`.
std::uint64_t coding_index(std::uint32_t seq, std::uint16_t count, const ChannelConfig& cfg);

/// Builds the frame for measurement vector y at sequence number seq. With
/// coding enabled the payload is y scrambled by the key-selected signed
/// permutation; either way the payload bytes are a signed reorder of y's
/// bytes, never a rounded value.
Packet encode(std::span<const double> y, std::uint32_t seq, const ChannelConfig& cfg);

/// Inverse of encode for a frame with a valid checksum; throws PacketError
/// on a checksum mismatch. Sequence-number policing lives in Receiver.
std::vector<double> decode(const Packet& pkt, const ChannelConfig& cfg);

enum class ReceiveVerdict { accepted, crc_mismatch, stale_seq };

struct ReceiveResult {
    ReceiveVerdict verdict = ReceiveVerdict::accepted;
    std::optional<std::vector<double>> y; // decoded measurements when accepted
};

/// Receiving endpoint: verifies the checksum, enforces strictly increasing
/// sequence numbers (a replayed full packet with an old seq decodes cleanly,
/// so freshness must be policed here), then decodes.
class Receiver {
public:
    explicit Receiver(ChannelConfig cfg) : cfg_(std::move(cfg)) {}

    ReceiveResult receive(const Packet& pkt);

    std::size_t crc_rejections() const { return crc_rejections_; }
    std::size_t stale_rejections() const { return stale_rejections_; }

private:
    ChannelConfig cfg_;
    std::optional<std::uint32_t> last_seq_;
    std::size_t crc_rejections_ = 0;
    std::size_t stale_rejections_ = 0;
};

/// MITM hook: may observe (return a copy), substitute, or drop (nullopt).
using Interceptor = std::function<std::optional<Packet>(const Packet&)>;

/// The link between concentrator and monitor: seeded Bernoulli loss first,
/// then the interceptor (if any) sees every surviving packet.
class Channel {
public:
    explicit Channel(const ChannelConfig& cfg)
        : loss_probability_(cfg.loss_probability), engine_(cfg.rng_seed) {}

    std::optional<Packet> transmit(const Packet& pkt, const Interceptor& tap = nullptr);

private:
    double loss_probability_;
    std::mt19937_64 engine_;
};

/// One line of the packet-capture log (the simulation's stand-in for a
/// network sniffer).
std::string packet_log_line(std::size_t step, std::string_view direction, const Packet& pkt,
                            std::string_view verdict);
std::string packet_log_header();

} // namespace hydra
