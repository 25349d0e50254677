#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vertisim/mqtt/codec.hpp"
#include "vertisim/mqtt/packet.hpp"

namespace vertisim::mqtt {

using Millis = std::chrono::milliseconds;

struct Message {
    std::string topic;
    Bytes payload;
    QoS qos = QoS::AtMostOnce;
    bool retain = false;
    bool dup = false;
};

struct ClientOptions {
    std::string client_id;
    std::optional<Will> will;
    std::uint16_t keep_alive = 0;  // seconds, 0 disables
    Millis retry_interval{1000};
    int max_retries = 5;
};

struct ClientStats {
    std::uint64_t messages_received = 0;
    std::uint64_t duplicates_received = 0;  // dup flag set on arrival
    std::uint64_t retransmissions = 0;
};

/// Client side of an MQTT 3.1.1 session, independent of the byte transport.
/// The owner feeds received bytes in and pumps on_timer at next_deadline().
class Client {
public:
    using SendFn = std::function<void(Bytes)>;
    using ClockFn = std::function<Millis()>;
    using MessageHandler = std::function<void(const Message&)>;

    Client(ClientOptions options, SendFn send, ClockFn clock);

    void connect();
    void disconnect();
    /// Sends PINGREQ; pings_answered() counts the PINGRESPs.
    void ping() { send(PingReq{}); }
    std::uint64_t pings_answered() const { return pings_answered_; }

    std::uint16_t subscribe(std::vector<std::pair<std::string, QoS>> filters);
    std::uint16_t subscribe(const std::string& filter, QoS qos) { return subscribe({{filter, qos}}); }
    std::uint16_t unsubscribe(std::vector<std::string> filters);
    /// Returns the packet id (0 for QoS 0).
    std::uint16_t publish(std::string topic, Bytes payload, QoS qos, bool retain = false);

    void set_message_handler(MessageHandler handler) { handler_ = std::move(handler); }

    void receive(std::span<const std::uint8_t> bytes);
    void on_timer();
    std::optional<Millis> next_deadline() const;

    bool connected() const { return connected_; }
    /// Set after a protocol error or exhausted retries; the session is unusable.
    bool failed() const { return failed_; }
    const std::string& client_id() const { return options_.client_id; }
    std::optional<std::uint8_t> connack_code() const { return connack_code_; }
    /// SUBACK return codes keyed by SUBSCRIBE packet id.
    const std::map<std::uint16_t, std::vector<std::uint8_t>>& suback_codes() const { return subacks_; }
    std::size_t inflight() const { return outbound_.size(); }
    const ClientStats& stats() const { return stats_; }

private:
    enum class Stage { AwaitPubAck, AwaitPubRec, AwaitPubComp };
    struct Outbound {
        Publish publish;
        Stage stage = Stage::AwaitPubAck;
        Millis deadline{0};
        int retries = 0;
    };

    void handle(Packet packet);
    void send(const Packet& packet);
    std::uint16_t allocate_packet_id();

    ClientOptions options_;
    SendFn send_;
    ClockFn clock_;
    MessageHandler handler_;

    Bytes buffer_;
    bool connected_ = false;
    bool failed_ = false;
    std::optional<std::uint8_t> connack_code_;
    std::map<std::uint16_t, Outbound> outbound_;
    std::set<std::uint16_t> inbound_qos2_;
    std::set<std::uint16_t> pending_acks_;  // SUBSCRIBE/UNSUBSCRIBE ids in use
    std::map<std::uint16_t, std::vector<std::uint8_t>> subacks_;
    std::uint16_t next_packet_id_ = 1;
    Millis last_sent_{0};
    std::uint64_t pings_answered_ = 0;
    ClientStats stats_;
};

}  // namespace vertisim::mqtt
