#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace vertisim::mqtt {

using Bytes = std::vector<std::uint8_t>;

enum class PacketType : std::uint8_t {
    Connect = 1,
    ConnAck = 2,
    Publish = 3,
    PubAck = 4,
    PubRec = 5,
    PubRel = 6,
    PubComp = 7,
    Subscribe = 8,
    SubAck = 9,
    Unsubscribe = 10,
    UnsubAck = 11,
    PingReq = 12,
    PingResp = 13,
    Disconnect = 14,
};

std::string_view to_string(PacketType type);

enum class QoS : std::uint8_t {
    AtMostOnce = 0,
    AtLeastOnce = 1,
    ExactlyOnce = 2,
};

inline QoS min_qos(QoS a, QoS b) { return a < b ? a : b; }

/// SUBACK return code for a rejected filter.
inline constexpr std::uint8_t kSubscribeFailure = 0x80;

struct Will {
    std::string topic;
    Bytes payload;
    QoS qos = QoS::AtMostOnce;
    bool retain = false;

    bool operator==(const Will&) const = default;
};

struct Connect {
    std::string client_id;
    bool clean_session = true;
    std::uint16_t keep_alive = 0;
    std::optional<Will> will;
    std::optional<std::string> username;
    std::optional<Bytes> password;

    bool operator==(const Connect&) const = default;
};

namespace connack {
inline constexpr std::uint8_t kAccepted = 0x00;
inline constexpr std::uint8_t kBadProtocolVersion = 0x01;
inline constexpr std::uint8_t kIdentifierRejected = 0x02;
}  // namespace connack

struct ConnAck {
    bool session_present = false;
    std::uint8_t return_code = connack::kAccepted;

    bool operator==(const ConnAck&) const = default;
};

struct Publish {
    std::string topic;
    Bytes payload;
    QoS qos = QoS::AtMostOnce;
    bool retain = false;
    bool dup = false;
    std::uint16_t packet_id = 0;  // zero iff qos == AtMostOnce

    bool operator==(const Publish&) const = default;
};

/// The four packet-id-only acknowledgements share one shape.
template <PacketType Kind>
struct IdOnly {
    std::uint16_t packet_id = 0;

    bool operator==(const IdOnly&) const = default;
};

using PubAck = IdOnly<PacketType::PubAck>;
using PubRec = IdOnly<PacketType::PubRec>;
using PubRel = IdOnly<PacketType::PubRel>;
using PubComp = IdOnly<PacketType::PubComp>;
using UnsubAck = IdOnly<PacketType::UnsubAck>;

struct Subscribe {
    std::uint16_t packet_id = 0;
    std::vector<std::pair<std::string, QoS>> filters;

    bool operator==(const Subscribe&) const = default;
};

struct SubAck {
    std::uint16_t packet_id = 0;
    std::vector<std::uint8_t> return_codes;

    bool operator==(const SubAck&) const = default;
};

struct Unsubscribe {
    std::uint16_t packet_id = 0;
    std::vector<std::string> filters;

    bool operator==(const Unsubscribe&) const = default;
};

struct PingReq {
    bool operator==(const PingReq&) const = default;
};
struct PingResp {
    bool operator==(const PingResp&) const = default;
};
struct Disconnect {
    bool operator==(const Disconnect&) const = default;
};

using Packet = std::variant<Connect, ConnAck, Publish, PubAck, PubRec, PubRel, PubComp,
                            Subscribe, SubAck, Unsubscribe, UnsubAck, PingReq, PingResp,
                            Disconnect>;

PacketType type_of(const Packet& packet);

}  // namespace vertisim::mqtt
