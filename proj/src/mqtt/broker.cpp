#include "vertisim/mqtt/broker.hpp"

#include <algorithm>
#include <vector>

#include "vertisim/mqtt/topic.hpp"

namespace vertisim::mqtt {

Broker::Broker(BrokerOptions options, SendFn send, CloseFn close)
    : options_(options), send_(std::move(send)), close_(std::move(close)) {}

void Broker::open(ConnectionId id, Millis now) {
    now_ = now;
    connections_[id].last_activity = now;
}

std::size_t Broker::inflight_count(const std::string& client_id) const {
    const auto it = sessions_.find(client_id);
    return it == sessions_.end() ? 0 : it->second.outbound.size() + it->second.inbound_qos2.size();
}

Broker::Session* Broker::session_for(ConnectionId id) {
    const auto conn = connections_.find(id);
    if (conn == connections_.end() || !conn->second.client_id) return nullptr;
    const auto it = sessions_.find(*conn->second.client_id);
    if (it == sessions_.end() || it->second.connection != id) return nullptr;
    return &it->second;
}

void Broker::receive(ConnectionId id, std::span<const std::uint8_t> bytes, Millis now) {
    now_ = now;
    auto conn = connections_.find(id);
    if (conn == connections_.end()) return;
    conn->second.buffer.insert(conn->second.buffer.end(), bytes.begin(), bytes.end());
    conn->second.last_activity = now;

    while (true) {
        conn = connections_.find(id);
        if (conn == connections_.end()) return;
        auto& buffer = conn->second.buffer;
        auto result = decode(buffer, options_.max_packet_size);
        if (std::holds_alternative<NeedMore>(result)) return;
        if (std::holds_alternative<ProtocolError>(result)) {
            ++stats_.protocol_errors;
            drop(id, true);
            return;
        }
        auto& decoded = std::get<Decoded>(result);
        buffer.erase(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(decoded.consumed));
        handle(id, std::move(decoded.packet));
    }
}

void Broker::handle(ConnectionId id, Packet packet) {
    if (auto* connect = std::get_if<Connect>(&packet)) {
        handle_connect(id, *connect);
        return;
    }
    Session* session = session_for(id);
    if (session == nullptr) {
        // Anything before CONNECT closes the connection.
        ++stats_.protocol_errors;
        drop(id, false);
        return;
    }

    std::visit(
        [&](auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Publish>) {
                handle_publish(*session, p);
            } else if constexpr (std::is_same_v<T, PubAck>) {
                const auto it = session->outbound.find(p.packet_id);
                if (it != session->outbound.end() && it->second.stage == Stage::AwaitPubAck) {
                    session->outbound.erase(it);
                }
            } else if constexpr (std::is_same_v<T, PubRec>) {
                const auto it = session->outbound.find(p.packet_id);
                if (it != session->outbound.end() && it->second.stage != Stage::AwaitPubAck) {
                    it->second.stage = Stage::AwaitPubComp;
                    it->second.deadline = now_ + options_.retry_interval;
                    it->second.retries = 0;
                }
                send(id, PubRel{p.packet_id});
            } else if constexpr (std::is_same_v<T, PubRel>) {
                session->inbound_qos2.erase(p.packet_id);
                send(id, PubComp{p.packet_id});
            } else if constexpr (std::is_same_v<T, PubComp>) {
                const auto it = session->outbound.find(p.packet_id);
                if (it != session->outbound.end() && it->second.stage == Stage::AwaitPubComp) {
                    session->outbound.erase(it);
                }
            } else if constexpr (std::is_same_v<T, Subscribe>) {
                handle_subscribe(*session, p);
            } else if constexpr (std::is_same_v<T, Unsubscribe>) {
                for (const auto& f : p.filters) subscriptions_.remove(f, session->client_id);
                send(id, UnsubAck{p.packet_id});
            } else if constexpr (std::is_same_v<T, PingReq>) {
                send(id, PingResp{});
            } else if constexpr (std::is_same_v<T, Disconnect>) {
                drop(id, false);
            } else {
                // Server-to-client packet types are a protocol violation.
                ++stats_.protocol_errors;
                drop(id, true);
            }
        },
        packet);
}

void Broker::handle_connect(ConnectionId id, Connect& packet) {
    auto& conn = connections_[id];
    if (conn.client_id) {
        // A second CONNECT on one connection is a protocol violation.
        ++stats_.protocol_errors;
        drop(id, true);
        return;
    }
    if (packet.client_id.empty()) {
        if (!packet.clean_session) {
            send(id, ConnAck{false, connack::kIdentifierRejected});
            drop(id, false);
            return;
        }
        packet.client_id = "auto-" + std::to_string(++anonymous_ids_);
    }

    // Session takeover: the older connection is closed as if it failed.
    if (const auto existing = sessions_.find(packet.client_id); existing != sessions_.end()) {
        drop(existing->second.connection, true);
    }

    conn.client_id = packet.client_id;
    conn.keep_alive = packet.keep_alive;
    Session session;
    session.client_id = packet.client_id;
    session.connection = id;
    session.will = std::move(packet.will);
    sessions_.insert_or_assign(packet.client_id, std::move(session));
    send(id, ConnAck{false, connack::kAccepted});
}

void Broker::handle_publish(Session& session, Publish& packet) {
    ++stats_.publishes_received;
    const auto connection = session.connection;
    switch (packet.qos) {
        case QoS::AtMostOnce:
            route(packet.topic, packet.payload, packet.qos, packet.retain);
            break;
        case QoS::AtLeastOnce:
            route(packet.topic, packet.payload, packet.qos, packet.retain);
            send(connection, PubAck{packet.packet_id});
            break;
        case QoS::ExactlyOnce:
            // Forward on first receipt; duplicates before PUBREL only re-acknowledge.
            if (session.inbound_qos2.insert(packet.packet_id).second) {
                route(packet.topic, packet.payload, packet.qos, packet.retain);
            }
            send(connection, PubRec{packet.packet_id});
            break;
    }
}

void Broker::handle_subscribe(Session& session, const Subscribe& packet) {
    SubAck ack{packet.packet_id, {}};
    std::vector<std::pair<std::string, QoS>> granted;
    for (const auto& [filter, qos] : packet.filters) {
        if (!valid_topic_filter(filter)) {
            ack.return_codes.push_back(kSubscribeFailure);
            continue;
        }
        subscriptions_.add(filter, session.client_id, qos);
        ack.return_codes.push_back(static_cast<std::uint8_t>(qos));
        granted.emplace_back(filter, qos);
    }
    send(session.connection, ack);

    for (const auto& [filter, qos] : granted) {
        for (const auto& [topic, message] : retained_) {
            if (topic_matches(filter, topic)) {
                deliver(session, topic, message.payload, min_qos(message.qos, qos), true);
            }
        }
    }
}

void Broker::route(const std::string& topic, const Bytes& payload, QoS qos, bool retain) {
    if (retain) {
        if (payload.empty()) {
            retained_.erase(topic);
        } else {
            retained_.insert_or_assign(topic, RetainedMessage{payload, qos});
        }
    }
    for (const auto& [client_id, granted] : subscriptions_.match(topic)) {
        const auto it = sessions_.find(client_id);
        if (it == sessions_.end()) continue;
        deliver(it->second, topic, payload, min_qos(qos, granted), false);
    }
}

std::uint16_t Broker::allocate_packet_id(Session& session) {
    for (int attempts = 0; attempts < 65535; ++attempts) {
        const auto id = session.next_packet_id;
        session.next_packet_id = static_cast<std::uint16_t>(id == 65535 ? 1 : id + 1);
        if (!session.outbound.contains(id)) return id;
    }
    return 0;
}

void Broker::deliver(Session& session, const std::string& topic, const Bytes& payload, QoS qos,
                     bool retain) {
    Publish out{topic, payload, qos, retain, false, 0};
    if (qos != QoS::AtMostOnce) {
        out.packet_id = allocate_packet_id(session);
        if (out.packet_id == 0) return;  // 65535 messages in flight; drop
        session.outbound[out.packet_id] =
            Outbound{out, qos == QoS::AtLeastOnce ? Stage::AwaitPubAck : Stage::AwaitPubRec,
                     now_ + options_.retry_interval, 0};
    }
    send(session.connection, out);
}

void Broker::send(ConnectionId id, const Packet& packet) {
    if (std::holds_alternative<Publish>(packet)) ++stats_.messages_sent;
    send_(id, encode(packet));
}

void Broker::drop(ConnectionId id, bool publish_will) {
    const auto conn = connections_.find(id);
    if (conn == connections_.end()) return;
    std::optional<Will> will;
    if (conn->second.client_id) {
        const auto it = sessions_.find(*conn->second.client_id);
        if (it != sessions_.end() && it->second.connection == id) {
            if (publish_will) will = std::move(it->second.will);
            subscriptions_.remove_all(it->first);
            sessions_.erase(it);
        }
    }
    connections_.erase(conn);
    close_(id);
    if (will) {
        ++stats_.wills_published;
        route(will->topic, will->payload, will->qos, will->retain);
    }
}

void Broker::connection_lost(ConnectionId id, Millis now) {
    now_ = now;
    drop(id, true);
}

void Broker::on_timer(Millis now) {
    now_ = now;
    std::vector<ConnectionId> expired;

    for (auto& [client_id, session] : sessions_) {
        bool give_up = false;
        for (auto& [packet_id, out] : session.outbound) {
            if (out.deadline > now) continue;
            if (out.retries >= options_.max_retries) {
                give_up = true;
                break;
            }
            ++out.retries;
            ++stats_.retransmissions;
            out.deadline = now + options_.retry_interval;
            if (out.stage == Stage::AwaitPubComp) {
                send(session.connection, PubRel{packet_id});
            } else {
                out.publish.dup = true;
                send(session.connection, out.publish);
            }
        }
        if (give_up) expired.push_back(session.connection);
    }

    for (const auto& [id, conn] : connections_) {
        if (conn.keep_alive == 0) continue;
        const Millis limit{conn.keep_alive * 1500};
        if (now - conn.last_activity > limit) expired.push_back(id);
    }

    std::sort(expired.begin(), expired.end());
    expired.erase(std::unique(expired.begin(), expired.end()), expired.end());
    for (const auto id : expired) {
        ++stats_.sessions_expired;
        drop(id, true);
    }
}

std::optional<Millis> Broker::next_deadline() const {
    std::optional<Millis> next;
    const auto consider = [&](Millis t) {
        if (!next || t < *next) next = t;
    };
    for (const auto& [_, session] : sessions_) {
        for (const auto& [__, out] : session.outbound) consider(out.deadline);
    }
    for (const auto& [_, conn] : connections_) {
        if (conn.keep_alive > 0) consider(conn.last_activity + Millis{conn.keep_alive * 1500} + Millis{1});
    }
    return next;
}

}  // namespace vertisim::mqtt
