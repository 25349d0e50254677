#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "vertisim/mqtt/broker.hpp"
#include "vertisim/mqtt/client.hpp"

namespace vertisim::mqtt {

enum class Direction { ToBroker, ToClient };

/// Returns true to drop the packet. `packet` holds exactly one encoded packet.
using FaultInjector =
    std::function<bool(Direction, const std::string& client_id, std::span<const std::uint8_t> packet)>;

/// Drops every distinct QoS-flow packet (PUBLISH, PUBACK, PUBREC, PUBREL,
/// PUBCOMP) the first time it is seen on a link; retransmissions, which differ
/// only in the DUP flag, pass.
FaultInjector drop_each_once();

/// Deterministic in-process transport: a broker and any number of clients
/// exchanging bytes through a single event queue ordered by (time, seq).
class SimNetwork {
public:
    struct Options {
        Millis latency{0};
        BrokerOptions broker;
    };

    SimNetwork();
    explicit SimNetwork(Options options);
    SimNetwork(const SimNetwork&) = delete;
    SimNetwork& operator=(const SimNetwork&) = delete;

    /// Creates a client bound to a fresh connection. Call connect() on it.
    Client& add_client(ClientOptions options);

    /// Tears the link down without DISCONNECT (broker sees an abnormal close).
    void drop_client(const Client& client);
    bool attached(const Client& client) const;

    void set_fault_injector(FaultInjector injector) { injector_ = std::move(injector); }

    /// Processes every event and timer due at or before `t`, then sets now = t.
    void advance_to(Millis t);
    void advance_by(Millis dt) { advance_to(now_ + dt); }
    /// Delivers everything already queued for the current instant.
    void settle() { advance_to(now_); }

    Millis now() const { return now_; }
    Broker& broker() { return broker_; }
    const Broker& broker() const { return broker_; }
    std::uint64_t dropped_packets() const { return dropped_; }

private:
    struct Endpoint {
        std::unique_ptr<Client> client;
        ConnectionId connection = 0;
        bool attached = true;
    };

    struct Event {
        Millis time;
        std::uint64_t seq;
        ConnectionId connection;
        Direction direction;
        Bytes bytes;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    void enqueue(ConnectionId connection, Direction direction, Bytes bytes);
    Endpoint* endpoint(ConnectionId connection);
    std::optional<Millis> next_timer() const;

    Options options_;
    Millis now_{0};
    std::uint64_t seq_ = 0;
    std::uint64_t dropped_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::deque<Endpoint> endpoints_;  // index = connection - 1
    FaultInjector injector_;
    Broker broker_;
};

}  // namespace vertisim::mqtt
