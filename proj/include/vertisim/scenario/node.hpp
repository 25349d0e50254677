#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vertisim/messages/envelope.hpp"
#include "vertisim/messages/outgoing.hpp"
#include "vertisim/mqtt/sim_network.hpp"
#include "vertisim/mqtt/tcp.hpp"

namespace vertisim::scenario {

/// One broker session as seen by a node.
class Link {
public:
    virtual ~Link() = default;
    virtual void subscribe(const std::string& filter, mqtt::QoS qos) = 0;
    virtual void publish(const std::string& topic, mqtt::Bytes payload, mqtt::QoS qos, bool retain) = 0;
    /// Messages delivered since the last call, in arrival order.
    virtual std::vector<mqtt::Message> drain() = 0;
    virtual void close() = 0;
};

/// Transport under a run: the deterministic in-process network, or TCP.
class Bus {
public:
    virtual ~Bus() = default;
    virtual std::unique_ptr<Link> connect(const std::string& client_id, std::optional<mqtt::Will> will = {}) = 0;
    /// Moves transport time forward (retransmission timers).
    virtual void advance_to(SimTime t) = 0;
    /// Returns once everything published so far has been delivered to its subscribers.
    virtual void flush() = 0;
    virtual std::string describe() const = 0;
};

class SimBus final : public Bus {
public:
    explicit SimBus(mqtt::SimNetwork::Options options = {});
    std::unique_ptr<Link> connect(const std::string& client_id, std::optional<mqtt::Will> will) override;
    void advance_to(SimTime t) override;
    void flush() override { network_.settle(); }
    std::string describe() const override { return "in-process"; }
    mqtt::SimNetwork& network() { return network_; }

private:
    mqtt::SimNetwork network_;
};

/// TCP sessions against a broker at host:port. flush() is a two-pass ping
/// barrier over every open link; skipped when nothing was published.
class TcpBus final : public Bus {
public:
    TcpBus(std::string host, std::uint16_t port, std::chrono::milliseconds timeout = std::chrono::seconds(5));
    std::unique_ptr<Link> connect(const std::string& client_id, std::optional<mqtt::Will> will) override;
    void advance_to(SimTime t) override;
    void flush() override;
    std::string describe() const override;

    class TcpLink;

private:
    std::string host_;
    std::uint16_t port_;
    std::chrono::milliseconds timeout_;
    std::vector<TcpLink*> links_;
    bool dirty_ = false;
};

/// A service's broker client: stamps sender, per-sender seq and sim time on
/// outgoing bodies and picks topic/QoS/retain from the message type.
class Node {
public:
    Node(std::string sender, std::unique_ptr<Link> link);

    const std::string& sender() const { return sender_; }
    void subscribe(const std::vector<std::string>& filters, mqtt::QoS qos = mqtt::QoS::AtLeastOnce);
    Envelope stamp(const Outgoing& out, SimTime now);
    void send(const Outgoing& out, SimTime now);
    void send(const Outbox& outbox, SimTime now);

    /// Parsed envelopes received since the last call. Unparseable payloads are counted and skipped.
    std::vector<Envelope> receive();
    std::uint64_t parse_errors() const { return parse_errors_; }
    std::uint64_t sent() const { return seq_; }
    void close() { link_->close(); }

private:
    std::string sender_;
    std::unique_ptr<Link> link_;
    std::int64_t seq_ = 0;
    std::uint64_t parse_errors_ = 0;
};

}  // namespace vertisim::scenario
