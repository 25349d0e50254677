#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include "vertisim/mqtt/packet.hpp"

namespace vertisim::mqtt {

/// Largest accepted packet (fixed header included).
inline constexpr std::size_t kMaxPacketSize = 1u << 20;

/// Upper bound of the four-byte remaining-length varint.
inline constexpr std::uint32_t kMaxRemainingLength = 268'435'455;

class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Serialises a packet to MQTT 3.1.1 wire bytes. Throws CodecError when the
/// packet violates a wire invariant (wildcard in a PUBLISH topic, missing
/// packet id, oversize field, ...).
Bytes encode(const Packet& packet);

void encode_remaining_length(std::uint32_t value, Bytes& out);

struct Decoded {
    Packet packet;
    std::size_t consumed = 0;
};

/// The buffer holds a strict prefix of a packet.
struct NeedMore {};

/// Malformed input. The connection that produced it must be closed.
struct ProtocolError {
    std::string reason;
};

using DecodeResult = std::variant<Decoded, NeedMore, ProtocolError>;

/// Decodes the first packet in `bytes`. Streaming safe: any prefix of a valid
/// packet yields NeedMore.
DecodeResult decode(std::span<const std::uint8_t> bytes,
                    std::size_t max_packet_size = kMaxPacketSize);

struct RemainingLength {
    std::uint32_t value = 0;
    std::size_t length = 0;  // bytes used by the varint
};

std::variant<RemainingLength, NeedMore, ProtocolError> decode_remaining_length(
    std::span<const std::uint8_t> bytes);

/// True when `s` is well-formed UTF-8 without U+0000, as MQTT strings require.
bool valid_mqtt_utf8(std::string_view s);

}  // namespace vertisim::mqtt
