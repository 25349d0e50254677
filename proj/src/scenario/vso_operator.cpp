#include "vertisim/scenario/vso_operator.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <mutex>
#include <set>
#include <thread>

namespace vertisim::scenario {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = boost::asio::ip::tcp;
using nlohmann::json;

struct ScriptedOperator::Impl {
    std::string host;
    std::uint16_t port;
    boost::asio::io_context io;
    websocket::stream<tcp::socket> ws{io};
    beast::flat_buffer buffer;
    std::thread thread;
    json state = json::object();
    std::set<std::int64_t> acked, approved;
    std::int64_t next_id = 1;
    mutable std::mutex mutex;
    std::vector<json> results;
    ScriptedOperator* owner = nullptr;

    void send(const std::string& command, std::int64_t request_id) {
        const json msg{{"type", "command"}, {"id", next_id++}, {"command", command}, {"request_id", request_id}};
        beast::error_code ec;
        ws.write(boost::asio::buffer(msg.dump()), ec);
    }

    void act() {
        for (const auto& p : state.value("popups", json::array())) {
            const auto id = p.value("request_id", std::int64_t{0});
            if (acked.insert(id).second) {
                send("AcknowledgeRequest", id);
                ++owner->acknowledged_;
            }
        }
        for (const auto& a : state.value("approvals", json::array())) {
            const auto id = a.value("request_id", std::int64_t{0});
            if (approved.insert(id).second) {
                send("ApproveFlight", id);
                ++owner->approved_;
            }
        }
    }

    void on_event(const json& e) {
        ++owner->events_;
        const auto type = e.value("type", std::string{});
        if (type == "snapshot") {
            state = e.at("state");
        } else if (type == "update") {
            for (const auto& [panel, value] : e.at("panels").items()) state[panel] = value;
        } else if (type == "command_result") {
            std::lock_guard lock(mutex);
            results.push_back(e);
            return;
        }
        act();
    }

    void read() {
        ws.async_read(buffer, [this](beast::error_code ec, std::size_t) {
            if (ec) return;
            try {
                on_event(json::parse(beast::buffers_to_string(buffer.data())));
            } catch (const json::exception&) {
            }
            buffer.consume(buffer.size());
            read();
        });
    }
};

ScriptedOperator::ScriptedOperator(std::string host, std::uint16_t port) : impl_(std::make_unique<Impl>()) {
    impl_->host = std::move(host);
    impl_->port = port;
    impl_->owner = this;
}

ScriptedOperator::~ScriptedOperator() { stop(); }

void ScriptedOperator::start() {
    tcp::resolver resolver(impl_->io);
    boost::asio::connect(impl_->ws.next_layer(), resolver.resolve(impl_->host, std::to_string(impl_->port)));
    impl_->ws.handshake(impl_->host, "/");
    impl_->read();
    impl_->thread = std::thread([this] { impl_->io.run(); });
}

void ScriptedOperator::stop() {
    if (!impl_->thread.joinable()) return;
    boost::asio::post(impl_->io, [this] {
        beast::error_code ec;
        impl_->ws.next_layer().shutdown(tcp::socket::shutdown_both, ec);
        impl_->ws.next_layer().close(ec);
    });
    impl_->thread.join();
}

std::vector<json> ScriptedOperator::results() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->results;
}

}  // namespace vertisim::scenario
