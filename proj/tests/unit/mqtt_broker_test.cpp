#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "vertisim/mqtt/sim_network.hpp"

using namespace vertisim::mqtt;
using namespace std::chrono_literals;

namespace {

Bytes bytes_of(const std::string& s) { return Bytes(s.begin(), s.end()); }
std::string str(const Bytes& b) { return std::string(b.begin(), b.end()); }

struct Recorder {
    std::vector<Message> messages;
    void attach(Client& c) {
        c.set_message_handler([this](const Message& m) { messages.push_back(m); });
    }
};

Client& connected(SimNetwork& net, const std::string& id, std::optional<Will> will = std::nullopt) {
    ClientOptions o;
    o.client_id = id;
    o.will = std::move(will);
    auto& c = net.add_client(o);
    c.connect();
    net.advance_by(100ms);
    REQUIRE(c.connected());
    return c;
}

}  // namespace

TEST_CASE("qos0 publish with no connected subscriber is not stored") {
    SimNetwork net;
    auto& sub = connected(net, "sub");
    sub.subscribe("t", QoS::AtMostOnce);
    net.settle();
    net.drop_client(sub);
    auto& pub = connected(net, "pub");
    pub.publish("t", bytes_of("x"), QoS::AtMostOnce);
    net.settle();
    CHECK(net.broker().retained().empty());
    CHECK(net.broker().stats().messages_sent == 0);
}

TEST_CASE("delivery qos is the minimum of publish and granted qos") {
    SimNetwork net;
    auto& sub = connected(net, "sub");
    Recorder rec;
    rec.attach(sub);
    sub.subscribe("a/+", QoS::AtLeastOnce);
    auto& pub = connected(net, "pub");
    net.settle();
    pub.publish("a/b", bytes_of("two"), QoS::ExactlyOnce);
    pub.publish("a/b", bytes_of("zero"), QoS::AtMostOnce);
    net.settle();
    REQUIRE(rec.messages.size() == 2);
    CHECK(rec.messages[0].qos == QoS::AtLeastOnce);
    CHECK(rec.messages[1].qos == QoS::AtMostOnce);
    CHECK_FALSE(rec.messages[0].retain);
    CHECK(pub.inflight() == 0);
    CHECK(net.broker().inflight_count("sub") == 0);
}

TEST_CASE("overlapping subscriptions deliver once at the highest qos") {
    SimNetwork net;
    auto& sub = connected(net, "sub");
    Recorder rec;
    rec.attach(sub);
    sub.subscribe({{"#", QoS::AtMostOnce}, {"x/y", QoS::ExactlyOnce}});
    auto& pub = connected(net, "pub");
    net.settle();
    pub.publish("x/y", bytes_of("m"), QoS::ExactlyOnce);
    net.settle();
    REQUIRE(rec.messages.size() == 1);
    CHECK(rec.messages[0].qos == QoS::ExactlyOnce);
}

TEST_CASE("retained message is replayed to a new wildcard subscriber") {
    SimNetwork net;
    auto& pub = connected(net, "pub");
    pub.publish("vertidrome/VD1/padstatus", bytes_of("CLOSED"), QoS::AtLeastOnce, true);
    net.settle();
    CHECK(net.broker().retained().size() == 1);

    auto& late = connected(net, "late");
    Recorder rec;
    rec.attach(late);
    const auto id = late.subscribe("vertidrome/+/padstatus", QoS::AtLeastOnce);
    net.settle();
    REQUIRE(rec.messages.size() == 1);
    CHECK(rec.messages[0].retain);
    CHECK(str(rec.messages[0].payload) == "CLOSED");
    CHECK(late.suback_codes().at(id) == std::vector<std::uint8_t>{1});
}

TEST_CASE("one retained message per topic and empty payload clears it") {
    SimNetwork net;
    auto& pub = connected(net, "pub");
    pub.publish("s", bytes_of("one"), QoS::AtMostOnce, true);
    pub.publish("s", bytes_of("two"), QoS::AtMostOnce, true);
    net.settle();
    REQUIRE(net.broker().retained().size() == 1);
    CHECK(str(net.broker().retained().at("s").payload) == "two");
    pub.publish("s", {}, QoS::AtMostOnce, true);
    net.settle();
    CHECK(net.broker().retained().empty());

    auto& late = connected(net, "late");
    Recorder rec;
    rec.attach(late);
    late.subscribe("s", QoS::AtMostOnce);
    net.settle();
    CHECK(rec.messages.empty());
}

TEST_CASE("invalid filter gets a failure code and no replay") {
    SimNetwork net;
    auto& c = connected(net, "c");
    const auto id = c.subscribe({{"a/#/b", QoS::AtLeastOnce}, {"ok", QoS::ExactlyOnce}});
    net.settle();
    CHECK(c.suback_codes().at(id) == std::vector<std::uint8_t>{kSubscribeFailure, 2});
}

TEST_CASE("last will on abnormal disconnect") {
    SimNetwork net;
    auto& watcher = connected(net, "watcher");
    Recorder rec;
    rec.attach(watcher);
    watcher.subscribe("uspace/lost/+", QoS::AtLeastOnce);
    net.settle();

    SUBCASE("dropped link publishes the will") {
        auto& uav = connected(net, "UAV1", Will{"uspace/lost/UAV1", bytes_of("offline"), QoS::AtLeastOnce, false});
        net.drop_client(uav);
        net.settle();
        REQUIRE(rec.messages.size() == 1);
        CHECK(rec.messages[0].topic == "uspace/lost/UAV1");
        CHECK(str(rec.messages[0].payload) == "offline");
        CHECK_FALSE(net.broker().is_connected("UAV1"));
    }
    SUBCASE("clean disconnect suppresses the will") {
        auto& uav = connected(net, "UAV1", Will{"uspace/lost/UAV1", bytes_of("offline"), QoS::AtLeastOnce, false});
        uav.disconnect();
        net.settle();
        net.drop_client(uav);
        net.settle();
        CHECK(rec.messages.empty());
        CHECK(net.broker().inflight_count("UAV1") == 0);
    }
    SUBCASE("no will, no publish") {
        auto& uav = connected(net, "UAV1");
        net.drop_client(uav);
        net.settle();
        CHECK(rec.messages.empty());
    }
    SUBCASE("retained will is stored") {
        auto& uav = connected(net, "UAV1", Will{"uspace/lost/UAV1", bytes_of("gone"), QoS::AtMostOnce, true});
        net.drop_client(uav);
        net.settle();
        CHECK(net.broker().retained().count("uspace/lost/UAV1") == 1);
    }
}

TEST_CASE("publish before connect closes the connection") {
    SimNetwork net;
    ClientOptions o;
    o.client_id = "rude";
    auto& c = net.add_client(o);
    c.publish("t", bytes_of("x"), QoS::AtMostOnce);
    net.settle();
    CHECK_FALSE(net.attached(c));
    CHECK(net.broker().stats().protocol_errors == 1);
}

TEST_CASE("second connect with the same client id takes over the session") {
    SimNetwork net;
    auto& first = connected(net, "dup", Will{"w", bytes_of("old"), QoS::AtMostOnce, false});
    auto& watcher = connected(net, "watcher");
    Recorder rec;
    rec.attach(watcher);
    watcher.subscribe("w", QoS::AtMostOnce);
    net.settle();
    auto& second = connected(net, "dup");
    CHECK_FALSE(net.attached(first));
    CHECK(net.attached(second));
    CHECK(net.broker().session_count() == 2);
    CHECK(rec.messages.size() == 1);  // takeover counts as abnormal for the old link
}

TEST_CASE("malformed bytes are a protocol error and trigger the will") {
    std::map<ConnectionId, std::vector<Bytes>> sent;
    std::vector<ConnectionId> closed;
    Broker broker({}, [&](ConnectionId id, Bytes b) { sent[id].push_back(std::move(b)); },
                  [&](ConnectionId id) { closed.push_back(id); });
    auto feed = [&](ConnectionId id, const Packet& p) { broker.receive(id, encode(p), 0ms); };

    broker.open(1, 0ms);
    feed(1, Connect{"watcher", true, 0, std::nullopt, std::nullopt, std::nullopt});
    feed(1, Subscribe{1, {{"w", QoS::AtMostOnce}}});
    broker.open(2, 0ms);
    feed(2, Connect{"bad", true, 0, Will{"w", bytes_of("bye"), QoS::AtMostOnce, false}, std::nullopt, std::nullopt});
    sent.clear();

    const Bytes garbage{0xF0, 0x00};
    broker.receive(2, garbage, 0ms);
    CHECK(closed == std::vector<ConnectionId>{2});
    REQUIRE(sent[1].size() == 1);
    auto r = decode(sent[1][0]);
    REQUIRE(std::holds_alternative<Decoded>(r));
    CHECK(std::get<Publish>(std::get<Decoded>(r).packet).payload == bytes_of("bye"));

    SUBCASE("server-only packet from a client is rejected") {
        broker.open(3, 0ms);
        feed(3, Connect{"c3", true, 0, std::nullopt, std::nullopt, std::nullopt});
        feed(3, ConnAck{});
        CHECK(closed.back() == 3);
    }
    SUBCASE("second CONNECT on one connection is rejected") {
        broker.open(4, 0ms);
        feed(4, Connect{"c4", true, 0, std::nullopt, std::nullopt, std::nullopt});
        feed(4, Connect{"c4", true, 0, std::nullopt, std::nullopt, std::nullopt});
        CHECK(closed.back() == 4);
    }
    SUBCASE("empty client id with persistent session is refused") {
        broker.open(5, 0ms);
        sent.clear();
        feed(5, Connect{"", false, 0, std::nullopt, std::nullopt, std::nullopt});
        REQUIRE(sent[5].size() == 1);
        CHECK(std::get<ConnAck>(std::get<Decoded>(decode(sent[5][0])).packet).return_code ==
              connack::kIdentifierRejected);
        CHECK(closed.back() == 5);
    }
}

TEST_CASE("qos1 and qos0 arrive in publish order") {
    SimNetwork net{SimNetwork::Options{5ms, {}}};
    auto& sub = connected(net, "sub");
    Recorder rec;
    rec.attach(sub);
    sub.subscribe("o", QoS::AtLeastOnce);
    auto& pub = connected(net, "pub");
    net.settle();
    net.advance_by(10ms);
    for (int i = 0; i < 200; ++i) pub.publish("o", bytes_of(std::to_string(i)), i % 2 ? QoS::AtLeastOnce : QoS::AtMostOnce);
    net.advance_by(1s);
    REQUIRE(rec.messages.size() == 200);
    for (int i = 0; i < 200; ++i) CHECK(str(rec.messages[static_cast<std::size_t>(i)].payload) == std::to_string(i));
}

TEST_CASE("qos1 under drop-each-once gives at-least-once with dup retries") {
    SimNetwork net;
    auto& sub = connected(net, "sub");
    Recorder rec;
    rec.attach(sub);
    sub.subscribe("q1", QoS::AtLeastOnce);
    auto& pub = connected(net, "pub");
    net.settle();
    net.set_fault_injector(drop_each_once());
    for (int i = 0; i < 100; ++i) pub.publish("q1", bytes_of(std::to_string(i)), QoS::AtLeastOnce);
    net.advance_by(20s);
    std::set<std::string> distinct;
    bool dup_seen = false;
    for (const auto& m : rec.messages) {
        distinct.insert(str(m.payload));
        dup_seen = dup_seen || m.dup;
    }
    CHECK(distinct.size() == 100);
    CHECK(rec.messages.size() >= 100);
    CHECK(dup_seen);
    CHECK(pub.inflight() == 0);
    CHECK(net.broker().inflight_count("sub") == 0);
}

TEST_CASE("qos2 under drop-each-once delivers exactly once") {
    SimNetwork net;
    auto& sub = connected(net, "sub");
    Recorder rec;
    rec.attach(sub);
    sub.subscribe("q2", QoS::ExactlyOnce);
    auto& pub = connected(net, "pub");
    net.settle();
    net.set_fault_injector(drop_each_once());
    for (int i = 0; i < 100; ++i) pub.publish("q2", bytes_of(std::to_string(i)), QoS::ExactlyOnce);
    net.advance_by(20s);
    CHECK(rec.messages.size() == 100);
    CHECK(pub.inflight() == 0);
    CHECK(net.broker().inflight_count("sub") == 0);
    CHECK(net.broker().inflight_count("pub") == 0);
}

TEST_CASE("unacknowledged delivery is retried five times then the session is torn down") {
    SimNetwork net;
    auto& sub = connected(net, "sub", Will{"gone", bytes_of("sub"), QoS::AtMostOnce, true});
    sub.subscribe("t", QoS::AtLeastOnce);
    auto& pub = connected(net, "pub");
    net.settle();
    // Black-hole everything the subscriber sends.
    net.set_fault_injector([](Direction d, const std::string& c, std::span<const std::uint8_t>) {
        return d == Direction::ToBroker && c == "sub";
    });
    pub.publish("t", bytes_of("x"), QoS::AtLeastOnce);
    net.advance_by(5500ms);
    CHECK(net.broker().is_connected("sub"));
    CHECK(net.broker().stats().retransmissions == 5);
    net.advance_by(1s);
    CHECK_FALSE(net.broker().is_connected("sub"));
    CHECK(net.broker().retained().count("gone") == 1);
}

TEST_CASE("keepalive expiry closes silent connections") {
    SimNetwork net;
    ClientOptions o;
    o.client_id = "ka";
    o.keep_alive = 2;
    auto& c = net.add_client(o);
    c.connect();
    net.settle();
    // The client pings on its own and stays alive.
    net.advance_by(10s);
    CHECK(net.broker().is_connected("ka"));
    net.set_fault_injector([](Direction d, const std::string&, std::span<const std::uint8_t>) {
        return d == Direction::ToBroker;
    });
    net.advance_by(4s);
    CHECK_FALSE(net.broker().is_connected("ka"));
}

TEST_CASE("simulation is deterministic") {
    auto run = [] {
        SimNetwork net{SimNetwork::Options{3ms, {}}};
        auto& sub = connected(net, "sub");
        std::vector<std::string> log;
        sub.set_message_handler([&](const Message& m) {
            log.push_back(std::to_string(net.now().count()) + ":" + str(m.payload) + (m.dup ? "d" : ""));
        });
        sub.subscribe("#", QoS::ExactlyOnce);
        auto& a = connected(net, "a");
        auto& b = connected(net, "b");
        net.settle();
        net.set_fault_injector(drop_each_once());
        for (int i = 0; i < 50; ++i) {
            a.publish("x", bytes_of("a" + std::to_string(i)), static_cast<QoS>(i % 3));
            b.publish("y", bytes_of("b" + std::to_string(i)), static_cast<QoS>((i + 1) % 3));
            net.advance_by(7ms);
        }
        net.advance_by(10s);
        return log;
    };
    CHECK(run() == run());
}
