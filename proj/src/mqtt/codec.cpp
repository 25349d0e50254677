#include "vertisim/mqtt/codec.hpp"

#include <type_traits>

#include "vertisim/mqtt/topic.hpp"

namespace vertisim::mqtt {

std::string_view to_string(PacketType type) {
    switch (type) {
        case PacketType::Connect: return "CONNECT";
        case PacketType::ConnAck: return "CONNACK";
        case PacketType::Publish: return "PUBLISH";
        case PacketType::PubAck: return "PUBACK";
        case PacketType::PubRec: return "PUBREC";
        case PacketType::PubRel: return "PUBREL";
        case PacketType::PubComp: return "PUBCOMP";
        case PacketType::Subscribe: return "SUBSCRIBE";
        case PacketType::SubAck: return "SUBACK";
        case PacketType::Unsubscribe: return "UNSUBSCRIBE";
        case PacketType::UnsubAck: return "UNSUBACK";
        case PacketType::PingReq: return "PINGREQ";
        case PacketType::PingResp: return "PINGRESP";
        case PacketType::Disconnect: return "DISCONNECT";
    }
    return "UNKNOWN";
}

PacketType type_of(const Packet& packet) {
    return std::visit(
        [](const auto& p) -> PacketType {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Connect>) return PacketType::Connect;
            else if constexpr (std::is_same_v<T, ConnAck>) return PacketType::ConnAck;
            else if constexpr (std::is_same_v<T, Publish>) return PacketType::Publish;
            else if constexpr (std::is_same_v<T, PubAck>) return PacketType::PubAck;
            else if constexpr (std::is_same_v<T, PubRec>) return PacketType::PubRec;
            else if constexpr (std::is_same_v<T, PubRel>) return PacketType::PubRel;
            else if constexpr (std::is_same_v<T, PubComp>) return PacketType::PubComp;
            else if constexpr (std::is_same_v<T, Subscribe>) return PacketType::Subscribe;
            else if constexpr (std::is_same_v<T, SubAck>) return PacketType::SubAck;
            else if constexpr (std::is_same_v<T, Unsubscribe>) return PacketType::Unsubscribe;
            else if constexpr (std::is_same_v<T, UnsubAck>) return PacketType::UnsubAck;
            else if constexpr (std::is_same_v<T, PingReq>) return PacketType::PingReq;
            else if constexpr (std::is_same_v<T, PingResp>) return PacketType::PingResp;
            else return PacketType::Disconnect;
        },
        packet);
}

bool valid_mqtt_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (c == 0) return false;
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= s.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Overlong forms, surrogates, out of range.
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
            (extra == 3 && cp < 0x10000) || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            return false;
        }
        i += extra + 1;
    }
    return true;
}

namespace {

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
    void string(std::string_view s) {
        if (s.size() > UINT16_MAX) throw CodecError("string field longer than 65535 bytes");
        if (!valid_mqtt_utf8(s)) throw CodecError("string field is not valid UTF-8");
        u16(static_cast<std::uint16_t>(s.size()));
        out_.insert(out_.end(), s.begin(), s.end());
    }
    void binary(const Bytes& b) {
        if (b.size() > UINT16_MAX) throw CodecError("binary field longer than 65535 bytes");
        u16(static_cast<std::uint16_t>(b.size()));
        out_.insert(out_.end(), b.begin(), b.end());
    }
    void raw(const Bytes& b) { out_.insert(out_.end(), b.begin(), b.end()); }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

void require_id(std::uint16_t id, PacketType type) {
    if (id == 0) throw CodecError(std::string(to_string(type)) + " requires a non-zero packet id");
}

Bytes frame(PacketType type, std::uint8_t flags, Bytes body) {
    if (body.size() > kMaxRemainingLength) throw CodecError("packet body too large");
    Bytes out;
    out.reserve(body.size() + 5);
    out.push_back(static_cast<std::uint8_t>((static_cast<std::uint8_t>(type) << 4) | flags));
    encode_remaining_length(static_cast<std::uint32_t>(body.size()), out);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Bytes encode_body(const Connect& p, std::uint8_t& flags) {
    flags = 0;
    if (p.password && !p.username) throw CodecError("password without user name");
    Writer w;
    w.string("MQTT");
    w.u8(4);
    std::uint8_t cf = 0;
    if (p.username) cf |= 0x80;
    if (p.password) cf |= 0x40;
    if (p.will) {
        if (!valid_topic_name(p.will->topic)) throw CodecError("invalid will topic");
        cf |= 0x04;
        cf |= static_cast<std::uint8_t>(static_cast<std::uint8_t>(p.will->qos) << 3);
        if (p.will->retain) cf |= 0x20;
    }
    if (p.clean_session) cf |= 0x02;
    w.u8(cf);
    w.u16(p.keep_alive);
    w.string(p.client_id);
    if (p.will) {
        w.string(p.will->topic);
        w.binary(p.will->payload);
    }
    if (p.username) w.string(*p.username);
    if (p.password) w.binary(*p.password);
    return w.take();
}

Bytes encode_body(const ConnAck& p, std::uint8_t& flags) {
    flags = 0;
    Writer w;
    w.u8(p.session_present ? 1 : 0);
    w.u8(p.return_code);
    return w.take();
}

Bytes encode_body(const Publish& p, std::uint8_t& flags) {
    if (!valid_topic_name(p.topic)) throw CodecError("PUBLISH topic must be a valid name without wildcards");
    if (p.qos > QoS::ExactlyOnce) throw CodecError("invalid QoS");
    if (p.qos == QoS::AtMostOnce && (p.packet_id != 0 || p.dup)) {
        throw CodecError("QoS 0 PUBLISH carries neither packet id nor DUP");
    }
    flags = static_cast<std::uint8_t>((p.dup ? 0x08 : 0) | (static_cast<std::uint8_t>(p.qos) << 1) |
                                      (p.retain ? 0x01 : 0));
    Writer w;
    w.string(p.topic);
    if (p.qos != QoS::AtMostOnce) {
        require_id(p.packet_id, PacketType::Publish);
        w.u16(p.packet_id);
    }
    w.raw(p.payload);
    return w.take();
}

template <PacketType Kind>
Bytes encode_body(const IdOnly<Kind>& p, std::uint8_t& flags) {
    flags = Kind == PacketType::PubRel ? 0x02 : 0x00;
    require_id(p.packet_id, Kind);
    Writer w;
    w.u16(p.packet_id);
    return w.take();
}

Bytes encode_body(const Subscribe& p, std::uint8_t& flags) {
    flags = 0x02;
    require_id(p.packet_id, PacketType::Subscribe);
    if (p.filters.empty()) throw CodecError("SUBSCRIBE needs at least one filter");
    Writer w;
    w.u16(p.packet_id);
    for (const auto& [filter, qos] : p.filters) {
        if (qos > QoS::ExactlyOnce) throw CodecError("invalid requested QoS");
        w.string(filter);
        w.u8(static_cast<std::uint8_t>(qos));
    }
    return w.take();
}

Bytes encode_body(const SubAck& p, std::uint8_t& flags) {
    flags = 0;
    require_id(p.packet_id, PacketType::SubAck);
    if (p.return_codes.empty()) throw CodecError("SUBACK needs at least one return code");
    Writer w;
    w.u16(p.packet_id);
    for (auto rc : p.return_codes) {
        if (rc > 2 && rc != kSubscribeFailure) throw CodecError("invalid SUBACK return code");
        w.u8(rc);
    }
    return w.take();
}

Bytes encode_body(const Unsubscribe& p, std::uint8_t& flags) {
    flags = 0x02;
    require_id(p.packet_id, PacketType::Unsubscribe);
    if (p.filters.empty()) throw CodecError("UNSUBSCRIBE needs at least one filter");
    Writer w;
    w.u16(p.packet_id);
    for (const auto& f : p.filters) w.string(f);
    return w.take();
}

Bytes encode_body(const PingReq&, std::uint8_t& flags) { flags = 0; return {}; }
Bytes encode_body(const PingResp&, std::uint8_t& flags) { flags = 0; return {}; }
Bytes encode_body(const Disconnect&, std::uint8_t& flags) { flags = 0; return {}; }

// Reads a complete body; any overrun means the packet is malformed.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> body) : body_(body) {}

    bool ok() const { return ok_; }
    std::size_t remaining() const { return body_.size() - pos_; }

    std::uint8_t u8() {
        if (remaining() < 1) return fail<std::uint8_t>();
        return body_[pos_++];
    }
    std::uint16_t u16() {
        if (remaining() < 2) return fail<std::uint16_t>();
        const auto v = static_cast<std::uint16_t>((body_[pos_] << 8) | body_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::string string() {
        const auto n = u16();
        if (!ok_ || remaining() < n) return fail<std::string>();
        std::string s(reinterpret_cast<const char*>(body_.data() + pos_), n);
        pos_ += n;
        if (!valid_mqtt_utf8(s)) return fail<std::string>();
        return s;
    }
    Bytes binary() {
        const auto n = u16();
        if (!ok_ || remaining() < n) return fail<Bytes>();
        Bytes b(body_.begin() + static_cast<std::ptrdiff_t>(pos_),
                body_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return b;
    }
    Bytes rest() {
        Bytes b(body_.begin() + static_cast<std::ptrdiff_t>(pos_), body_.end());
        pos_ = body_.size();
        return b;
    }

private:
    template <typename T>
    T fail() {
        ok_ = false;
        pos_ = body_.size();
        return T{};
    }

    std::span<const std::uint8_t> body_;
    std::size_t pos_ = 0;
    bool ok_ = true;
};

ProtocolError malformed(PacketType type, std::string_view what) {
    return ProtocolError{std::string(to_string(type)) + ": " + std::string(what)};
}

std::variant<Packet, ProtocolError> decode_body(PacketType type, std::uint8_t flags,
                                                std::span<const std::uint8_t> body) {
    Reader r(body);
    const auto expect_flags = [&](std::uint8_t want) { return flags == want; };

    switch (type) {
        case PacketType::Connect: {
            if (!expect_flags(0)) return malformed(type, "reserved flags set");
            Connect p;
            const auto name = r.string();
            const auto level = r.u8();
            if (!r.ok() || name != "MQTT") return malformed(type, "bad protocol name");
            if (level != 4) return malformed(type, "unsupported protocol level");
            const auto cf = r.u8();
            p.keep_alive = r.u16();
            if (!r.ok()) return malformed(type, "truncated variable header");
            if (cf & 0x01) return malformed(type, "reserved connect flag set");
            p.clean_session = (cf & 0x02) != 0;
            const bool will_flag = (cf & 0x04) != 0;
            const auto will_qos = static_cast<std::uint8_t>((cf >> 3) & 0x03);
            const bool will_retain = (cf & 0x20) != 0;
            const bool has_password = (cf & 0x40) != 0;
            const bool has_user = (cf & 0x80) != 0;
            if (will_qos > 2) return malformed(type, "invalid will QoS");
            if (!will_flag && (will_qos != 0 || will_retain)) return malformed(type, "will bits without will flag");
            if (has_password && !has_user) return malformed(type, "password without user name");
            p.client_id = r.string();
            if (will_flag) {
                Will w;
                w.topic = r.string();
                w.payload = r.binary();
                w.qos = static_cast<QoS>(will_qos);
                w.retain = will_retain;
                if (r.ok() && !valid_topic_name(w.topic)) return malformed(type, "invalid will topic");
                p.will = std::move(w);
            }
            if (has_user) p.username = r.string();
            if (has_password) p.password = r.binary();
            if (!r.ok() || r.remaining() != 0) return malformed(type, "bad payload length");
            return Packet{std::move(p)};
        }
        case PacketType::ConnAck: {
            if (!expect_flags(0)) return malformed(type, "reserved flags set");
            ConnAck p;
            const auto ack_flags = r.u8();
            p.return_code = r.u8();
            if (!r.ok() || r.remaining() != 0) return malformed(type, "remaining length must be 2");
            if (ack_flags & 0xFE) return malformed(type, "reserved acknowledge flags set");
            p.session_present = (ack_flags & 0x01) != 0;
            return Packet{p};
        }
        case PacketType::Publish: {
            Publish p;
            p.dup = (flags & 0x08) != 0;
            const auto qos = static_cast<std::uint8_t>((flags >> 1) & 0x03);
            if (qos == 3) return malformed(type, "invalid QoS bits");
            p.qos = static_cast<QoS>(qos);
            p.retain = (flags & 0x01) != 0;
            if (p.qos == QoS::AtMostOnce && p.dup) return malformed(type, "DUP set on QoS 0");
            p.topic = r.string();
            if (!r.ok()) return malformed(type, "truncated topic");
            if (!valid_topic_name(p.topic)) return malformed(type, "topic name contains wildcards");
            if (p.qos != QoS::AtMostOnce) {
                p.packet_id = r.u16();
                if (!r.ok() || p.packet_id == 0) return malformed(type, "missing packet id");
            }
            p.payload = r.rest();
            return Packet{std::move(p)};
        }
        case PacketType::PubAck:
        case PacketType::PubRec:
        case PacketType::PubRel:
        case PacketType::PubComp:
        case PacketType::UnsubAck: {
            if (!expect_flags(type == PacketType::PubRel ? 0x02 : 0x00)) return malformed(type, "bad fixed-header flags");
            const auto id = r.u16();
            if (!r.ok() || r.remaining() != 0) return malformed(type, "remaining length must be 2");
            if (id == 0) return malformed(type, "zero packet id");
            switch (type) {
                case PacketType::PubAck: return Packet{PubAck{id}};
                case PacketType::PubRec: return Packet{PubRec{id}};
                case PacketType::PubRel: return Packet{PubRel{id}};
                case PacketType::PubComp: return Packet{PubComp{id}};
                default: return Packet{UnsubAck{id}};
            }
        }
        case PacketType::Subscribe: {
            if (!expect_flags(0x02)) return malformed(type, "bad fixed-header flags");
            Subscribe p;
            p.packet_id = r.u16();
            if (!r.ok() || p.packet_id == 0) return malformed(type, "missing packet id");
            while (r.ok() && r.remaining() > 0) {
                auto filter = r.string();
                const auto q = r.u8();
                if (!r.ok()) break;
                if (q > 2) return malformed(type, "invalid requested QoS");
                p.filters.emplace_back(std::move(filter), static_cast<QoS>(q));
            }
            if (!r.ok() || p.filters.empty()) return malformed(type, "bad filter list");
            return Packet{std::move(p)};
        }
        case PacketType::SubAck: {
            if (!expect_flags(0)) return malformed(type, "reserved flags set");
            SubAck p;
            p.packet_id = r.u16();
            if (!r.ok() || p.packet_id == 0) return malformed(type, "missing packet id");
            while (r.remaining() > 0) {
                const auto rc = r.u8();
                if (rc > 2 && rc != kSubscribeFailure) return malformed(type, "invalid return code");
                p.return_codes.push_back(rc);
            }
            if (p.return_codes.empty()) return malformed(type, "no return codes");
            return Packet{std::move(p)};
        }
        case PacketType::Unsubscribe: {
            if (!expect_flags(0x02)) return malformed(type, "bad fixed-header flags");
            Unsubscribe p;
            p.packet_id = r.u16();
            if (!r.ok() || p.packet_id == 0) return malformed(type, "missing packet id");
            while (r.ok() && r.remaining() > 0) p.filters.push_back(r.string());
            if (!r.ok() || p.filters.empty()) return malformed(type, "bad filter list");
            return Packet{std::move(p)};
        }
        case PacketType::PingReq:
        case PacketType::PingResp:
        case PacketType::Disconnect: {
            if (!expect_flags(0)) return malformed(type, "reserved flags set");
            if (!body.empty()) return malformed(type, "remaining length must be 0");
            if (type == PacketType::PingReq) return Packet{PingReq{}};
            if (type == PacketType::PingResp) return Packet{PingResp{}};
            return Packet{Disconnect{}};
        }
    }
    return ProtocolError{"unknown packet type"};
}

}  // namespace

void encode_remaining_length(std::uint32_t value, Bytes& out) {
    if (value > kMaxRemainingLength) throw CodecError("remaining length out of range");
    do {
        auto byte = static_cast<std::uint8_t>(value % 128);
        value /= 128;
        if (value > 0) byte |= 0x80;
        out.push_back(byte);
    } while (value > 0);
}

std::variant<RemainingLength, NeedMore, ProtocolError> decode_remaining_length(
    std::span<const std::uint8_t> bytes) {
    std::uint32_t value = 0;
    std::uint32_t multiplier = 1;
    for (std::size_t i = 0; i < 4; ++i) {
        if (i >= bytes.size()) return NeedMore{};
        const auto byte = bytes[i];
        value += static_cast<std::uint32_t>(byte & 0x7F) * multiplier;
        if ((byte & 0x80) == 0) {
            // Reject non-minimal encodings such as 0x80 0x00.
            if (i > 0 && byte == 0) return ProtocolError{"non-minimal remaining length"};
            return RemainingLength{value, i + 1};
        }
        multiplier *= 128;
    }
    return ProtocolError{"remaining length longer than 4 bytes"};
}

Bytes encode(const Packet& packet) {
    return std::visit(
        [&](const auto& p) {
            std::uint8_t flags = 0;
            Bytes body = encode_body(p, flags);
            auto out = frame(type_of(packet), flags, std::move(body));
            if (out.size() > kMaxPacketSize) throw CodecError("packet exceeds maximum packet size");
            return out;
        },
        packet);
}

DecodeResult decode(std::span<const std::uint8_t> bytes, std::size_t max_packet_size) {
    if (bytes.empty()) return NeedMore{};
    const auto type_nibble = static_cast<std::uint8_t>(bytes[0] >> 4);
    const auto flags = static_cast<std::uint8_t>(bytes[0] & 0x0F);
    if (type_nibble == 0 || type_nibble == 15) {
        return ProtocolError{"reserved packet type " + std::to_string(type_nibble)};
    }
    const auto type = static_cast<PacketType>(type_nibble);

    const auto rl = decode_remaining_length(bytes.subspan(1));
    if (std::holds_alternative<NeedMore>(rl)) return NeedMore{};
    if (const auto* err = std::get_if<ProtocolError>(&rl)) return *err;
    const auto [length, varint_len] = std::get<RemainingLength>(rl);

    const std::size_t total = 1 + varint_len + length;
    if (total > max_packet_size) return ProtocolError{"packet exceeds maximum packet size"};
    if (bytes.size() < total) return NeedMore{};

    auto body = decode_body(type, flags, bytes.subspan(1 + varint_len, length));
    if (auto* err = std::get_if<ProtocolError>(&body)) return std::move(*err);
    return Decoded{std::move(std::get<Packet>(body)), total};
}

}  // namespace vertisim::mqtt
