#include <string>

#include "doctest.h"
#include "vertisim/mqtt/tcp.hpp"

using namespace vertisim::mqtt;
using namespace std::chrono_literals;

namespace {
Bytes bytes_of(const std::string& s) { return Bytes(s.begin(), s.end()); }
}  // namespace

TEST_CASE("broker over tcp: publish, retained replay and will") {
    TcpBrokerServer server(0);
    server.start();
    const auto port = server.port();

    ClientOptions sub_opts;
    sub_opts.client_id = "sub";
    TcpClientLink sub("127.0.0.1", port, sub_opts);
    REQUIRE(sub.connect(2s));

    ClientOptions pub_opts;
    pub_opts.client_id = "pub";
    pub_opts.will = Will{"lost/pub", bytes_of("offline"), QoS::AtLeastOnce, false};
    auto pub = std::make_unique<TcpClientLink>("127.0.0.1", port, pub_opts);
    REQUIRE(pub->connect(2s));

    sub.with_client([](Client& c) { c.subscribe({{"data/#", QoS::ExactlyOnce}, {"lost/+", QoS::AtLeastOnce}}); });
    REQUIRE(sub.ping_and_wait(2s));

    pub->with_client([](Client& c) {
        c.publish("data/a", bytes_of("one"), QoS::AtLeastOnce);
        c.publish("data/b", bytes_of("two"), QoS::ExactlyOnce, true);
    });
    REQUIRE(pub->ping_and_wait(2s));
    REQUIRE(sub.wait_until([](const Client& c) { return c.stats().messages_received >= 2; }, 2s));
    auto msgs = sub.take_messages();
    REQUIRE(msgs.size() == 2);
    CHECK(msgs[0].payload == bytes_of("one"));
    CHECK(msgs[1].payload == bytes_of("two"));

    ClientOptions late_opts;
    late_opts.client_id = "late";
    TcpClientLink late("127.0.0.1", port, late_opts);
    REQUIRE(late.connect(2s));
    late.with_client([](Client& c) { c.subscribe("data/+", QoS::AtLeastOnce); });
    REQUIRE(late.wait_until([](const Client& c) { return c.stats().messages_received >= 1; }, 2s));
    auto replay = late.take_messages();
    REQUIRE(replay.size() == 1);
    CHECK(replay[0].retain);
    CHECK(replay[0].topic == "data/b");

    pub->close_abruptly();
    REQUIRE(sub.wait_until([](const Client& c) { return c.stats().messages_received >= 3; }, 2s));
    auto will = sub.take_messages();
    REQUIRE(will.size() == 1);
    CHECK(will[0].payload == bytes_of("offline"));
    pub.reset();

    sub.disconnect();
    late.disconnect();
    server.stop();
}
