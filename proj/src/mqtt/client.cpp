#include "vertisim/mqtt/client.hpp"

namespace vertisim::mqtt {

Client::Client(ClientOptions options, SendFn send, ClockFn clock)
    : options_(std::move(options)), send_(std::move(send)), clock_(std::move(clock)) {}

void Client::send(const Packet& packet) {
    last_sent_ = clock_();
    send_(encode(packet));
}

void Client::connect() {
    Connect c;
    c.client_id = options_.client_id;
    c.clean_session = true;
    c.keep_alive = options_.keep_alive;
    c.will = options_.will;
    send(c);
}

void Client::disconnect() {
    send(Disconnect{});
    connected_ = false;
    outbound_.clear();
    inbound_qos2_.clear();
}

std::uint16_t Client::allocate_packet_id() {
    for (int attempts = 0; attempts < 65535; ++attempts) {
        const auto id = next_packet_id_;
        next_packet_id_ = static_cast<std::uint16_t>(id == 65535 ? 1 : id + 1);
        if (!outbound_.contains(id) && !pending_acks_.contains(id)) return id;
    }
    throw CodecError("no free packet identifier");
}

std::uint16_t Client::subscribe(std::vector<std::pair<std::string, QoS>> filters) {
    const auto id = allocate_packet_id();
    pending_acks_.insert(id);
    send(Subscribe{id, std::move(filters)});
    return id;
}

std::uint16_t Client::unsubscribe(std::vector<std::string> filters) {
    const auto id = allocate_packet_id();
    pending_acks_.insert(id);
    send(Unsubscribe{id, std::move(filters)});
    return id;
}

std::uint16_t Client::publish(std::string topic, Bytes payload, QoS qos, bool retain) {
    Publish p{std::move(topic), std::move(payload), qos, retain, false, 0};
    if (qos != QoS::AtMostOnce) {
        p.packet_id = allocate_packet_id();
        outbound_[p.packet_id] = Outbound{
            p, qos == QoS::AtLeastOnce ? Stage::AwaitPubAck : Stage::AwaitPubRec,
            clock_() + options_.retry_interval, 0};
    }
    send(p);
    return p.packet_id;
}

void Client::receive(std::span<const std::uint8_t> bytes) {
    if (failed_) return;
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
    while (!failed_) {
        auto result = decode(buffer_);
        if (std::holds_alternative<NeedMore>(result)) return;
        if (std::holds_alternative<ProtocolError>(result)) {
            failed_ = true;
            connected_ = false;
            return;
        }
        auto& decoded = std::get<Decoded>(result);
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(decoded.consumed));
        handle(std::move(decoded.packet));
    }
}

void Client::handle(Packet packet) {
    std::visit(
        [&](auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ConnAck>) {
                connack_code_ = p.return_code;
                connected_ = p.return_code == connack::kAccepted;
            } else if constexpr (std::is_same_v<T, Publish>) {
                Message m{p.topic, std::move(p.payload), p.qos, p.retain, p.dup};
                if (p.dup) ++stats_.duplicates_received;
                switch (p.qos) {
                    case QoS::AtMostOnce:
                        ++stats_.messages_received;
                        if (handler_) handler_(m);
                        break;
                    case QoS::AtLeastOnce:
                        ++stats_.messages_received;
                        if (handler_) handler_(m);
                        send(PubAck{p.packet_id});
                        break;
                    case QoS::ExactlyOnce:
                        if (inbound_qos2_.insert(p.packet_id).second) {
                            ++stats_.messages_received;
                            if (handler_) handler_(m);
                        }
                        send(PubRec{p.packet_id});
                        break;
                }
            } else if constexpr (std::is_same_v<T, PubAck>) {
                const auto it = outbound_.find(p.packet_id);
                if (it != outbound_.end() && it->second.stage == Stage::AwaitPubAck) outbound_.erase(it);
            } else if constexpr (std::is_same_v<T, PubRec>) {
                const auto it = outbound_.find(p.packet_id);
                if (it != outbound_.end() && it->second.stage != Stage::AwaitPubAck) {
                    it->second.stage = Stage::AwaitPubComp;
                    it->second.deadline = clock_() + options_.retry_interval;
                    it->second.retries = 0;
                }
                send(PubRel{p.packet_id});
            } else if constexpr (std::is_same_v<T, PubRel>) {
                inbound_qos2_.erase(p.packet_id);
                send(PubComp{p.packet_id});
            } else if constexpr (std::is_same_v<T, PubComp>) {
                const auto it = outbound_.find(p.packet_id);
                if (it != outbound_.end() && it->second.stage == Stage::AwaitPubComp) outbound_.erase(it);
            } else if constexpr (std::is_same_v<T, SubAck>) {
                pending_acks_.erase(p.packet_id);
                subacks_[p.packet_id] = p.return_codes;
            } else if constexpr (std::is_same_v<T, UnsubAck>) {
                pending_acks_.erase(p.packet_id);
            } else if constexpr (std::is_same_v<T, PingResp>) {
                ++pings_answered_;
            } else {
                // Client-to-server packet types arriving here are a protocol error.
                failed_ = true;
                connected_ = false;
            }
        },
        packet);
}

void Client::on_timer() {
    if (failed_) return;
    const auto now = clock_();
    for (auto& [id, out] : outbound_) {
        if (out.deadline > now) continue;
        if (out.retries >= options_.max_retries) {
            failed_ = true;
            connected_ = false;
            return;
        }
        ++out.retries;
        ++stats_.retransmissions;
        out.deadline = now + options_.retry_interval;
        if (out.stage == Stage::AwaitPubComp) {
            send(PubRel{id});
        } else {
            out.publish.dup = true;
            send(out.publish);
        }
    }
    if (options_.keep_alive > 0 && connected_ && now - last_sent_ >= Millis{options_.keep_alive * 1000}) {
        send(PingReq{});
    }
}

std::optional<Millis> Client::next_deadline() const {
    if (failed_) return std::nullopt;
    std::optional<Millis> next;
    for (const auto& [_, out] : outbound_) {
        if (!next || out.deadline < *next) next = out.deadline;
    }
    if (options_.keep_alive > 0 && connected_) {
        const auto ping = last_sent_ + Millis{options_.keep_alive * 1000};
        if (!next || ping < *next) next = ping;
    }
    return next;
}

}  // namespace vertisim::mqtt
