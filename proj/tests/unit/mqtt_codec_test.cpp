#include <random>

#include "doctest.h"
#include "vertisim/mqtt/codec.hpp"

using namespace vertisim::mqtt;

namespace {

Packet roundtrip(const Packet& p) {
    const auto bytes = encode(p);
    auto result = decode(bytes);
    REQUIRE(std::holds_alternative<Decoded>(result));
    CHECK(std::get<Decoded>(result).consumed == bytes.size());
    return std::get<Decoded>(result).packet;
}

bool is_protocol_error(const Bytes& b) { return std::holds_alternative<ProtocolError>(decode(b)); }

}  // namespace

TEST_CASE("PingReq encodes to C0 00 and decodes back") {
    CHECK(encode(PingReq{}) == Bytes{0xC0, 0x00});
    auto r = decode(Bytes{0xC0, 0x00});
    REQUIRE(std::holds_alternative<Decoded>(r));
    CHECK(std::holds_alternative<PingReq>(std::get<Decoded>(r).packet));
}

TEST_CASE("remaining length 321 is C1 02") {
    Bytes out;
    encode_remaining_length(321, out);
    CHECK(out == Bytes{0xC1, 0x02});
}

TEST_CASE("remaining length boundaries") {
    const std::vector<std::pair<std::uint32_t, Bytes>> table{
        {0, {0x00}},
        {127, {0x7F}},
        {128, {0x80, 0x01}},
        {16383, {0xFF, 0x7F}},
        {16384, {0x80, 0x80, 0x01}},
        {2097151, {0xFF, 0xFF, 0x7F}},
        {2097152, {0x80, 0x80, 0x80, 0x01}},
        {268435455, {0xFF, 0xFF, 0xFF, 0x7F}},
    };
    for (const auto& [value, bytes] : table) {
        Bytes out;
        encode_remaining_length(value, out);
        CHECK(out == bytes);
        auto r = decode_remaining_length(bytes);
        REQUIRE(std::holds_alternative<RemainingLength>(r));
        CHECK(std::get<RemainingLength>(r).value == value);
        CHECK(std::get<RemainingLength>(r).length == bytes.size());
    }
    Bytes out;
    CHECK_THROWS_AS(encode_remaining_length(268435456, out), CodecError);
}

TEST_CASE("remaining length codec is a bijection on sampled values") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::uint32_t> dist(0, kMaxRemainingLength);
    for (int i = 0; i < 20000; ++i) {
        const auto v = dist(rng);
        Bytes out;
        encode_remaining_length(v, out);
        auto r = decode_remaining_length(out);
        REQUIRE(std::holds_alternative<RemainingLength>(r));
        CHECK(std::get<RemainingLength>(r).value == v);
    }
}

TEST_CASE("malformed remaining length is a protocol error") {
    CHECK(is_protocol_error({0x30, 0xFF, 0xFF, 0xFF, 0xFF, 0x01}));
    // non-minimal: 0 encoded in two bytes
    CHECK(is_protocol_error({0xC0, 0x80, 0x00}));
}

TEST_CASE("reserved packet types and bad flags") {
    CHECK(is_protocol_error({0xF0, 0x00}));
    CHECK(is_protocol_error({0x00, 0x00}));
    CHECK(is_protocol_error({0xC1, 0x00}));  // PINGREQ with flags
    CHECK(is_protocol_error({0x80, 0x00}));  // SUBSCRIBE needs flags 0010
    // PUBLISH with QoS 3
    CHECK(is_protocol_error({0x36, 0x05, 0x00, 0x01, 'a', 0x00, 0x01}));
}

TEST_CASE("prefixes need more bytes") {
    const auto bytes = encode(Publish{"uspace/position/UAV1", Bytes(300, 'x'), QoS::AtLeastOnce, false, false, 9});
    for (std::size_t n = 0; n < bytes.size(); ++n) {
        CHECK(std::holds_alternative<NeedMore>(decode(std::span(bytes.data(), n))));
    }
}

TEST_CASE("publish round trips") {
    const Publish empty{"a", {}, QoS::AtMostOnce, false, false, 0};
    CHECK(roundtrip(empty) == Packet{empty});
    const Publish full{"vertidrome/VD1/padstatus", Bytes{1, 2, 3}, QoS::ExactlyOnce, true, true, 65535};
    CHECK(roundtrip(full) == Packet{full});
}

TEST_CASE("publish with wildcard topic cannot be encoded") {
    CHECK_THROWS_AS(encode(Publish{"a/+", {}, QoS::AtMostOnce, false, false, 0}), CodecError);
    CHECK_THROWS_AS(encode(Publish{"a", {}, QoS::AtLeastOnce, false, false, 0}), CodecError);
}

TEST_CASE("connect with will round trips and matches the 3.1.1 layout") {
    Connect c;
    c.client_id = "UAV1";
    c.keep_alive = 60;
    c.will = Will{"uspace/lost/UAV1", Bytes{'o', 'f', 'f'}, QoS::AtLeastOnce, true};
    c.username = "u";
    c.password = Bytes{'p'};
    CHECK(roundtrip(c) == Packet{c});

    Connect plain;
    plain.client_id = "c";
    const Bytes expected{0x10, 13,  0x00, 0x04, 'M', 'Q', 'T', 'T', 0x04,
                         0x02, 0x00, 0x00, 0x00, 0x01, 'c'};
    CHECK(encode(plain) == expected);
}

TEST_CASE("random packets round trip") {
    std::mt19937 rng(42);
    auto rand_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto rand_topic = [&] {
        std::string t;
        const int levels = rand_int(1, 4);
        for (int i = 0; i < levels; ++i) {
            if (i) t += '/';
            const int len = rand_int(0, 6);
            for (int j = 0; j < len; ++j) t += static_cast<char>('a' + rand_int(0, 25));
        }
        return t.empty() ? std::string("x") : t;
    };
    auto rand_id = [&] { return static_cast<std::uint16_t>(rand_int(1, 65535)); };
    auto rand_qos = [&] { return static_cast<QoS>(rand_int(0, 2)); };

    for (int i = 0; i < 5000; ++i) {
        Packet p;
        switch (rand_int(0, 13)) {
            case 0: {
                Connect c;
                c.client_id = rand_topic();
                c.keep_alive = static_cast<std::uint16_t>(rand_int(0, 65535));
                if (rand_int(0, 1)) c.will = Will{rand_topic(), Bytes(rand_int(0, 10), 7), rand_qos(), rand_int(0, 1) == 1};
                p = c;
                break;
            }
            case 1: p = ConnAck{rand_int(0, 1) == 1, static_cast<std::uint8_t>(rand_int(0, 5))}; break;
            case 2: {
                const auto q = rand_qos();
                p = Publish{rand_topic(), Bytes(rand_int(0, 200), static_cast<std::uint8_t>(rand_int(0, 255))), q,
                            rand_int(0, 1) == 1, q != QoS::AtMostOnce && rand_int(0, 1) == 1,
                            q == QoS::AtMostOnce ? std::uint16_t{0} : rand_id()};
                break;
            }
            case 3: p = PubAck{rand_id()}; break;
            case 4: p = PubRec{rand_id()}; break;
            case 5: p = PubRel{rand_id()}; break;
            case 6: p = PubComp{rand_id()}; break;
            case 7: {
                Subscribe s{rand_id(), {}};
                for (int k = rand_int(1, 4); k > 0; --k) s.filters.emplace_back(rand_topic(), rand_qos());
                p = s;
                break;
            }
            case 8: p = SubAck{rand_id(), {0x00, 0x01, 0x02, 0x80}}; break;
            case 9: p = Unsubscribe{rand_id(), {rand_topic(), rand_topic()}}; break;
            case 10: p = UnsubAck{rand_id()}; break;
            case 11: p = PingReq{}; break;
            case 12: p = PingResp{}; break;
            default: p = Disconnect{}; break;
        }
        CHECK(roundtrip(p) == p);
    }
}

TEST_CASE("streaming decode of concatenated packets") {
    Bytes stream;
    for (const Packet& p : std::vector<Packet>{PingReq{}, PubAck{5}, Publish{"t", {1}, QoS::AtMostOnce, false, false, 0}}) {
        const auto b = encode(p);
        stream.insert(stream.end(), b.begin(), b.end());
    }
    std::size_t offset = 0;
    int count = 0;
    while (offset < stream.size()) {
        auto r = decode(std::span(stream).subspan(offset));
        REQUIRE(std::holds_alternative<Decoded>(r));
        offset += std::get<Decoded>(r).consumed;
        ++count;
    }
    CHECK(count == 3);
}

TEST_CASE("oversize packets are rejected") {
    Bytes header{0x30};
    encode_remaining_length(kMaxPacketSize + 1, header);
    CHECK(is_protocol_error(header));
}

TEST_CASE("invalid utf8 in topic is rejected") {
    CHECK(is_protocol_error({0x30, 0x04, 0x00, 0x02, 0xC3, 0x28}));
    CHECK(valid_mqtt_utf8("Binnenalster/ü"));
    CHECK_FALSE(valid_mqtt_utf8(std::string("a\0b", 3)));
}
