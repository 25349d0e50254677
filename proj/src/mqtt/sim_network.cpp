#include "vertisim/mqtt/sim_network.hpp"

#include <set>
#include <tuple>

namespace vertisim::mqtt {

FaultInjector drop_each_once() {
    auto seen = std::make_shared<std::set<std::tuple<Direction, std::string, Bytes>>>();
    return [seen](Direction dir, const std::string& client, std::span<const std::uint8_t> packet) {
        if (packet.empty()) return false;
        const auto type = packet[0] >> 4;
        if (type < 3 || type > 7) return false;
        Bytes key(packet.begin(), packet.end());
        if (type == 3) key[0] &= 0xF7;  // ignore DUP
        return seen->emplace(dir, client, std::move(key)).second;
    };
}

SimNetwork::SimNetwork() : SimNetwork(Options{}) {}

SimNetwork::SimNetwork(Options options)
    : options_(options),
      broker_(
          options.broker,
          [this](ConnectionId id, Bytes bytes) { enqueue(id, Direction::ToClient, std::move(bytes)); },
          [this](ConnectionId id) {
              if (auto* ep = endpoint(id)) ep->attached = false;
          }) {}

SimNetwork::Endpoint* SimNetwork::endpoint(ConnectionId connection) {
    if (connection == 0 || connection > endpoints_.size()) return nullptr;
    return &endpoints_[connection - 1];
}

Client& SimNetwork::add_client(ClientOptions options) {
    const ConnectionId id = endpoints_.size() + 1;
    auto client = std::make_unique<Client>(
        std::move(options),
        [this, id](Bytes bytes) { enqueue(id, Direction::ToBroker, std::move(bytes)); },
        [this] { return now_; });
    endpoints_.push_back(Endpoint{std::move(client), id, true});
    broker_.open(id, now_);
    return *endpoints_.back().client;
}

void SimNetwork::drop_client(const Client& client) {
    for (auto& ep : endpoints_) {
        if (ep.client.get() == &client && ep.attached) {
            ep.attached = false;
            broker_.connection_lost(ep.connection, now_);
        }
    }
}

bool SimNetwork::attached(const Client& client) const {
    for (const auto& ep : endpoints_) {
        if (ep.client.get() == &client) return ep.attached;
    }
    return false;
}

void SimNetwork::enqueue(ConnectionId connection, Direction direction, Bytes bytes) {
    auto* ep = endpoint(connection);
    if (ep == nullptr || !ep->attached) return;
    if (injector_ && injector_(direction, ep->client->client_id(), bytes)) {
        ++dropped_;
        return;
    }
    queue_.push(Event{now_ + options_.latency, seq_++, connection, direction, std::move(bytes)});
}

std::optional<Millis> SimNetwork::next_timer() const {
    auto next = broker_.next_deadline();
    for (const auto& ep : endpoints_) {
        if (!ep.attached) continue;
        if (const auto d = ep.client->next_deadline(); d && (!next || *d < *next)) next = d;
    }
    return next;
}

void SimNetwork::advance_to(Millis t) {
    while (true) {
        const auto timer = next_timer();
        const bool event_due = !queue_.empty() && queue_.top().time <= t;
        const bool timer_due = timer && *timer <= t;
        if (!event_due && !timer_due) break;

        // Timers fire before events at the same instant.
        if (timer_due && (!event_due || *timer <= queue_.top().time)) {
            now_ = std::max(now_, *timer);
            broker_.on_timer(now_);
            for (auto& ep : endpoints_) {
                if (ep.attached) ep.client->on_timer();
            }
            continue;
        }

        Event ev = queue_.top();
        queue_.pop();
        now_ = std::max(now_, ev.time);
        auto* ep = endpoint(ev.connection);
        if (ep == nullptr || !ep->attached) continue;
        if (ev.direction == Direction::ToBroker) {
            broker_.receive(ev.connection, ev.bytes, now_);
        } else {
            ep->client->receive(ev.bytes);
        }
    }
    now_ = std::max(now_, t);
}

}  // namespace vertisim::mqtt
