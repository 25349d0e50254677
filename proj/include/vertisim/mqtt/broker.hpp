#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>

#include "vertisim/mqtt/codec.hpp"
#include "vertisim/mqtt/packet.hpp"
#include "vertisim/mqtt/subscription_tree.hpp"

namespace vertisim::mqtt {

using Millis = std::chrono::milliseconds;
using ConnectionId = std::uint64_t;

struct BrokerOptions {
    Millis retry_interval{1000};
    int max_retries = 5;
    std::size_t max_packet_size = kMaxPacketSize;
};

struct RetainedMessage {
    Bytes payload;
    QoS qos = QoS::AtMostOnce;
};

struct BrokerStats {
    std::uint64_t publishes_received = 0;
    std::uint64_t messages_sent = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t protocol_errors = 0;
    std::uint64_t wills_published = 0;
    std::uint64_t sessions_expired = 0;
};

/// MQTT 3.1.1 broker core. It owns no sockets: the transport feeds it bytes
/// per connection and receives bytes back through the send callback, so the
/// same state machine serves TCP and the in-process simulation network.
///
/// All methods must be called from one thread (one serialized event loop).
class Broker {
public:
    using SendFn = std::function<void(ConnectionId, Bytes)>;
    using CloseFn = std::function<void(ConnectionId)>;

    Broker(BrokerOptions options, SendFn send, CloseFn close);

    void open(ConnectionId id, Millis now);
    void receive(ConnectionId id, std::span<const std::uint8_t> bytes, Millis now);

    /// The transport lost the connection without a DISCONNECT packet.
    void connection_lost(ConnectionId id, Millis now);

    /// Drives retransmissions and keep-alive expiry.
    void on_timer(Millis now);
    std::optional<Millis> next_deadline() const;

    const std::map<std::string, RetainedMessage>& retained() const { return retained_; }
    bool is_connected(const std::string& client_id) const { return sessions_.contains(client_id); }
    std::size_t session_count() const { return sessions_.size(); }
    std::size_t inflight_count(const std::string& client_id) const;
    const BrokerStats& stats() const { return stats_; }

private:
    struct Connection {
        Bytes buffer;
        std::optional<std::string> client_id;
        std::uint16_t keep_alive = 0;
        Millis last_activity{0};
    };

    enum class Stage { AwaitPubAck, AwaitPubRec, AwaitPubComp };

    struct Outbound {
        Publish publish;
        Stage stage = Stage::AwaitPubAck;
        Millis deadline{0};
        int retries = 0;
    };

    struct Session {
        std::string client_id;
        ConnectionId connection = 0;
        std::optional<Will> will;
        std::map<std::uint16_t, Outbound> outbound;
        std::set<std::uint16_t> inbound_qos2;
        std::uint16_t next_packet_id = 1;
    };

    void handle(ConnectionId id, Packet packet);
    void handle_connect(ConnectionId id, Connect& packet);
    void handle_publish(Session& session, Publish& packet);
    void handle_subscribe(Session& session, const Subscribe& packet);

    void route(const std::string& topic, const Bytes& payload, QoS qos, bool retain);
    void deliver(Session& session, const std::string& topic, const Bytes& payload, QoS qos, bool retain);
    void send(ConnectionId id, const Packet& packet);

    /// Closes a connection from the broker side. An abnormal close publishes
    /// the session's will.
    void drop(ConnectionId id, bool publish_will);

    Session* session_for(ConnectionId id);
    std::uint16_t allocate_packet_id(Session& session);

    BrokerOptions options_;
    SendFn send_;
    CloseFn close_;
    Millis now_{0};

    std::map<ConnectionId, Connection> connections_;
    std::map<std::string, Session> sessions_;
    SubscriptionTree subscriptions_;
    std::map<std::string, RetainedMessage> retained_;
    BrokerStats stats_;
    std::uint64_t anonymous_ids_ = 0;
};

}  // namespace vertisim::mqtt
