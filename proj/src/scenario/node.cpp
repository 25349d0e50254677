#include "vertisim/scenario/node.hpp"

#include <algorithm>
#include <stdexcept>

#include "vertisim/messages/topics.hpp"

namespace vertisim::scenario {

namespace {

class SimLink final : public Link {
public:
    SimLink(mqtt::SimNetwork& network, mqtt::Client& client) : network_(network), client_(client) {
        client_.set_message_handler([this](const mqtt::Message& m) { inbox_.push_back(m); });
    }
    void subscribe(const std::string& filter, mqtt::QoS qos) override { client_.subscribe(filter, qos); }
    void publish(const std::string& topic, mqtt::Bytes payload, mqtt::QoS qos, bool retain) override {
        client_.publish(topic, std::move(payload), qos, retain);
    }
    std::vector<mqtt::Message> drain() override { return std::exchange(inbox_, {}); }
    void close() override {
        if (network_.attached(client_)) client_.disconnect();
    }

private:
    mqtt::SimNetwork& network_;
    mqtt::Client& client_;
    std::vector<mqtt::Message> inbox_;
};

}  // namespace

SimBus::SimBus(mqtt::SimNetwork::Options options) : network_(options) {}

std::unique_ptr<Link> SimBus::connect(const std::string& client_id, std::optional<mqtt::Will> will) {
    mqtt::ClientOptions options;
    options.client_id = client_id;
    options.will = std::move(will);
    auto& client = network_.add_client(options);
    client.connect();
    network_.settle();
    if (!client.connected()) throw std::runtime_error("in-process broker refused " + client_id);
    return std::make_unique<SimLink>(network_, client);
}

void SimBus::advance_to(SimTime t) {
    if (mqtt::Millis(t) > network_.now()) network_.advance_to(mqtt::Millis(t));
}

class TcpBus::TcpLink final : public Link {
public:
    TcpLink(TcpBus& bus, std::unique_ptr<mqtt::TcpClientLink> link) : bus_(bus), link_(std::move(link)) {}
    ~TcpLink() override {
        close();
        auto& links = bus_.links_;
        links.erase(std::remove(links.begin(), links.end(), this), links.end());
    }
    void subscribe(const std::string& filter, mqtt::QoS qos) override {
        link_->with_client([&](mqtt::Client& c) { return c.subscribe(filter, qos); });
        bus_.dirty_ = true;
    }
    void publish(const std::string& topic, mqtt::Bytes payload, mqtt::QoS qos, bool retain) override {
        link_->with_client([&](mqtt::Client& c) { return c.publish(topic, std::move(payload), qos, retain); });
        bus_.dirty_ = true;
    }
    // only what had arrived at the last barrier, as the in-process bus does
    std::vector<mqtt::Message> drain() override { return std::exchange(staged_, {}); }
    void stage() {
        for (auto& m : link_->take_messages()) staged_.push_back(std::move(m));
    }
    void close() override {
        if (link_->open()) link_->disconnect();
    }
    mqtt::TcpClientLink& raw() { return *link_; }

private:
    std::vector<mqtt::Message> staged_;
    TcpBus& bus_;
    std::unique_ptr<mqtt::TcpClientLink> link_;
};

TcpBus::TcpBus(std::string host, std::uint16_t port, std::chrono::milliseconds timeout)
    : host_(std::move(host)), port_(port), timeout_(timeout) {}

std::unique_ptr<Link> TcpBus::connect(const std::string& client_id, std::optional<mqtt::Will> will) {
    mqtt::ClientOptions options;
    options.client_id = client_id;
    options.will = std::move(will);
    auto raw = std::make_unique<mqtt::TcpClientLink>(host_, port_, options);
    if (!raw->connect(timeout_)) throw std::runtime_error("cannot connect " + client_id + " to " + describe());
    auto link = std::make_unique<TcpLink>(*this, std::move(raw));
    links_.push_back(link.get());
    return link;
}

void TcpBus::advance_to(SimTime) {
    for (auto* l : links_) l->raw().poll();
}

void TcpBus::flush() {
    if (dirty_) {
        dirty_ = false;
        // pass one: the broker has read every packet; pass two: its forwards have arrived
        for (int pass = 0; pass < 2; ++pass) {
            for (auto* l : links_) {
                if (l->raw().open() && !l->raw().ping_and_wait(timeout_))
                    throw std::runtime_error("broker at " + describe() + " stopped answering");
            }
        }
    }
    for (auto* l : links_) l->stage();
}

std::string TcpBus::describe() const { return host_ + ":" + std::to_string(port_); }

Node::Node(std::string sender, std::unique_ptr<Link> link) : sender_(std::move(sender)), link_(std::move(link)) {}

void Node::subscribe(const std::vector<std::string>& filters, mqtt::QoS qos) {
    for (const auto& f : filters) link_->subscribe(f, qos);
}

Envelope Node::stamp(const Outgoing& out, SimTime now) {
    Envelope env;
    env.type = out.type;
    env.sender = sender_;
    env.seq = ++seq_;
    env.sim_time = now;
    env.body = out.body;
    env.topic = topics::topic_for(env);
    return env;
}

void Node::send(const Outgoing& out, SimTime now) {
    const auto env = stamp(out, now);
    const auto delivery = topics::delivery_for(env.type);
    link_->publish(env.topic, serialize_bytes(env), static_cast<mqtt::QoS>(delivery.qos), delivery.retain);
}

void Node::send(const Outbox& outbox, SimTime now) {
    for (const auto& o : outbox) send(o, now);
}

std::vector<Envelope> Node::receive() {
    std::vector<Envelope> out;
    for (auto& m : link_->drain()) {
        try {
            auto env = parse(m.payload);
            env.topic = m.topic;
            out.push_back(std::move(env));
        } catch (const ParseError&) {
            ++parse_errors_;
        }
    }
    return out;
}

}  // namespace vertisim::scenario
