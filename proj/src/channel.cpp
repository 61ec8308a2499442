#include "hydra/channel.hpp"

#include <array>
#include <bit>
#include <sstream>

#include "hydra/signed_permutation.hpp"

namespace hydra {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'H', 'Y', 'D', '1'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t at) {
    return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i)
        v = (v << 8) | in[at + static_cast<std::size_t>(i)];
    return v;
}

double get_f64(std::span<const std::uint8_t> in, std::size_t at) {
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i)
        bits = (bits << 8) | in[at + static_cast<std::size_t>(i)];
    return std::bit_cast<double>(bits);
}

const std::array<std::uint32_t, 256>& crc_table() {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    return table;
}

std::vector<std::uint8_t> serialize_body(const Packet& pkt) {
    std::vector<std::uint8_t> out;
    out.reserve(4 + 4 + 2 + 8 * pkt.payload.size());
    for (std::uint8_t m : kMagic)
        out.push_back(m);
    put_u32(out, pkt.seq);
    put_u16(out, pkt.count);
    for (double v : pkt.payload)
        put_f64(out, v);
    return out;
}

} // namespace

void ChannelConfig::validate() const {
    if (!(loss_probability >= 0.0 && loss_probability < 1.0))
        throw ConfigError("channel: loss probability must be in [0, 1)");
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::uint8_t b : bytes)
        c = crc_table()[(c ^ b) & 0xffu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::uint32_t packet_crc(const Packet& pkt) {
    const auto body = serialize_body(pkt);
    return crc32(body);
}

std::vector<std::uint8_t> serialize(const Packet& pkt) {
    if (pkt.payload.size() != pkt.count)
        throw PacketError("serialize: count does not match payload length");
    auto out = serialize_body(pkt);
    put_u32(out, pkt.crc);
    return out;
}

Packet parse(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 14)
        throw PacketError("parse: frame too short");
    for (std::size_t i = 0; i < kMagic.size(); ++i)
        if (bytes[i] != kMagic[i])
            throw PacketError("parse: bad magic");
    Packet pkt;
    pkt.seq = get_u32(bytes, 4);
    pkt.count = get_u16(bytes, 8);
    if (bytes.size() != 14 + std::size_t{8} * pkt.count)
        throw PacketError("parse: frame length does not match count");
    pkt.payload.resize(pkt.count);
    for (std::size_t i = 0; i < pkt.count; ++i)
        pkt.payload[i] = get_f64(bytes, 10 + 8 * i);
    pkt.crc = get_u32(bytes, 10 + 8 * std::size_t{pkt.count});
    return pkt;
}

std::uint64_t coding_index(std::uint32_t seq, std::uint16_t count, const ChannelConfig& cfg) {
    const std::uint64_t modulus = cfg.selection_modulus == SelectionModulus::full_codebook
                                      ? codebook_size(count)
                                      : count;
    return select_index(cfg.key, seq, modulus);
}

Packet encode(std::span<const double> y, std::uint32_t seq, const ChannelConfig& cfg) {
    Packet pkt;
    pkt.seq = seq;
    pkt.count = static_cast<std::uint16_t>(y.size());
    if (cfg.coding_enabled) {
        pkt.payload = unrank(coding_index(seq, pkt.count, cfg), pkt.count).apply(y);
    } else {
        pkt.payload.assign(y.begin(), y.end());
    }
    pkt.crc = packet_crc(pkt);
    return pkt;
}

std::vector<double> decode(const Packet& pkt, const ChannelConfig& cfg) {
    if (pkt.payload.size() != pkt.count)
        throw PacketError("decode: count does not match payload length");
    if (pkt.crc != packet_crc(pkt))
        throw PacketError("decode: checksum mismatch");
    if (!cfg.coding_enabled)
        return pkt.payload;
    return unrank(coding_index(pkt.seq, pkt.count, cfg), pkt.count).inverse().apply(pkt.payload);
}

ReceiveResult Receiver::receive(const Packet& pkt) {
    if (pkt.payload.size() != pkt.count || pkt.crc != packet_crc(pkt)) {
        ++crc_rejections_;
        return {ReceiveVerdict::crc_mismatch, std::nullopt};
    }
    if (last_seq_ && pkt.seq <= *last_seq_) {
        ++stale_rejections_;
        return {ReceiveVerdict::stale_seq, std::nullopt};
    }
    last_seq_ = pkt.seq;
    return {ReceiveVerdict::accepted, decode(pkt, cfg_)};
}

std::optional<Packet> Channel::transmit(const Packet& pkt, const Interceptor& tap) {
    if (loss_probability_ > 0.0) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        if (u < loss_probability_)
            return std::nullopt;
    }
    if (tap)
        return tap(pkt);
    return pkt;
}

std::string packet_log_header() {
    return "step,direction,seq,count,payload_hex,verdict";
}

std::string packet_log_line(std::size_t step, std::string_view direction, const Packet& pkt,
                            std::string_view verdict) {
    static const char* hex = "0123456789abcdef";
    std::string payload_hex;
    payload_hex.reserve(pkt.payload.size() * 16);
    for (double v : pkt.payload) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) { // little-endian byte order, matching the wire
            const auto byte = static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff);
            payload_hex.push_back(hex[byte >> 4]);
            payload_hex.push_back(hex[byte & 0xf]);
        }
    }
    std::ostringstream line;
    line << step << ',' << direction << ',' << pkt.seq << ',' << pkt.count << ',' << payload_hex
         << ',' << verdict;
    return line.str();
}

} // namespace hydra
