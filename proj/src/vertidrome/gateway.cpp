#include "vertisim/vertidrome/gateway.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "vertisim/vertidrome/ui_state.hpp"

namespace vertisim::vertidrome {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

nlohmann::json VsoGateway::snapshot_event(std::uint64_t seq, const json& state) {
    return {{"type", "snapshot"}, {"seq", seq}, {"state", state}};
}

nlohmann::json VsoGateway::update_event(std::uint64_t seq, const json& before, const json& after) {
    json panels = json::object();
    for (const auto& p : changed_panels(before, after)) panels[p] = after.at(p);
    return {{"type", "update"}, {"seq", seq}, {"panels", panels}};
}

nlohmann::json VsoGateway::result_event(const json& id, const CommandResult& result) {
    return {{"type", "command_result"}, {"id", id}, {"ok", result.ok}, {"reason", result.reason}};
}

namespace {

class Session : public std::enable_shared_from_this<Session> {
public:
    using OnText = std::function<void(std::uint64_t, const std::string&)>;
    using OnClose = std::function<void(std::uint64_t)>;

    Session(tcp::socket socket, std::uint64_t id, OnText on_text, OnClose on_close)
        : ws_(std::move(socket)), id_(id), on_text_(std::move(on_text)), on_close_(std::move(on_close)) {}

    // Snapshot first; updates published during the handshake queue behind it.
    void run(std::string first_message) {
        queue_.push_back(std::move(first_message));
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept([self = shared_from_this()](beast::error_code ec) mutable {
            if (ec) return self->close();
            self->accepted_ = true;
            self->write();
            self->read();
        });
    }

    void send(std::string text) {
        queue_.push_back(std::move(text));
        if (accepted_ && queue_.size() == 1) write();
    }

    std::uint64_t id() const { return id_; }

private:
    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->close();
            self->on_text_(self->id_, beast::buffers_to_string(self->buffer_.data()));
            self->buffer_.consume(self->buffer_.size());
            self->read();
        });
    }

    void write() {
        ws_.text(true);
        ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->close();
            self->queue_.pop_front();
            if (!self->queue_.empty()) self->write();
        });
    }

    void close() {
        if (closed_) return;
        closed_ = true;
        on_close_(id_);
    }

    websocket::stream<beast::tcp_stream> ws_;
    std::uint64_t id_;
    OnText on_text_;
    OnClose on_close_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    bool accepted_ = false;
    bool closed_ = false;
};

}  // namespace

struct VsoGateway::Impl {
    Options options;
    asio::io_context io;
    tcp::acceptor acceptor{io};
    std::thread thread;
    std::map<std::uint64_t, std::shared_ptr<Session>> sessions;  // io thread only
    std::uint64_t next_session = 1;

    mutable std::mutex mutex;  // guards the fields below
    json state;                // last published
    std::uint64_t seq = 0;
    std::vector<GatewayCommand> commands;
    std::size_t session_count = 0;
    std::function<void(const json&)> recorder;

    void accept() {
        acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            const auto id = next_session++;
            auto session = std::make_shared<Session>(
                std::move(socket), id, [this](std::uint64_t sid, const std::string& text) { on_text(sid, text); },
                [this](std::uint64_t sid) {
                    sessions.erase(sid);
                    std::lock_guard lock(mutex);
                    session_count = sessions.size();
                });
            std::string first;
            {
                std::lock_guard lock(mutex);
                first = snapshot_event(seq, state.is_null() ? json::object() : state).dump();
            }
            sessions[id] = session;
            {
                std::lock_guard lock(mutex);
                session_count = sessions.size();
            }
            session->run(std::move(first));
            accept();
        });
    }

    void send_to(std::uint64_t sid, std::string text) {
        if (const auto it = sessions.find(sid); it != sessions.end()) it->second->send(std::move(text));
    }

    void on_text(std::uint64_t sid, const std::string& text) {
        json id = nullptr;
        try {
            const auto j = json::parse(text);
            if (j.contains("id")) id = j.at("id");
            if (j.value("type", "") != "command") throw CommandError("expected type \"command\"");
            auto cmd = parse_vso_command(j);
            std::lock_guard lock(mutex);
            commands.push_back({sid, id, std::move(cmd)});
        } catch (const std::exception& e) {
            send_to(sid, result_event(id, {false, e.what()}).dump());
        }
    }
};

VsoGateway::VsoGateway(Options options) : impl_(std::make_unique<Impl>()) { impl_->options = std::move(options); }

VsoGateway::~VsoGateway() { stop(); }

void VsoGateway::start() {
    auto& i = *impl_;
    const tcp::endpoint ep(asio::ip::make_address(i.options.bind), i.options.port);
    i.acceptor.open(ep.protocol());
    i.acceptor.set_option(asio::socket_base::reuse_address(true));
    i.acceptor.bind(ep);
    i.acceptor.listen();
    i.accept();
    i.thread = std::thread([this] { impl_->io.run(); });
}

void VsoGateway::stop() {
    auto& i = *impl_;
    if (!i.thread.joinable()) return;
    asio::post(i.io, [&i] {
        beast::error_code ec;
        i.acceptor.close(ec);
        i.sessions.clear();
        i.io.stop();
    });
    i.thread.join();
}

std::uint16_t VsoGateway::port() const { return impl_->acceptor.local_endpoint().port(); }

std::size_t VsoGateway::session_count() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->session_count;
}

void VsoGateway::set_recorder(std::function<void(const json&)> recorder) {
    std::lock_guard lock(impl_->mutex);
    impl_->recorder = std::move(recorder);
}

void VsoGateway::publish(const json& state) {
    auto& i = *impl_;
    json event;
    std::function<void(const json&)> recorder;
    {
        std::lock_guard lock(i.mutex);
        if (i.state.is_null()) {
            i.state = state;
            event = snapshot_event(i.seq, state);
        } else {
            if (changed_panels(i.state, state).empty()) return;
            event = update_event(++i.seq, i.state, state);
            i.state = state;
        }
        recorder = i.recorder;
    }
    if (recorder) recorder(event);
    if (event["type"] == "snapshot") return;  // new sessions get their own snapshot
    asio::post(i.io, [&i, text = event.dump()] {
        for (auto& [_, s] : i.sessions) s->send(text);
    });
}

std::vector<GatewayCommand> VsoGateway::take_commands() {
    std::lock_guard lock(impl_->mutex);
    return std::exchange(impl_->commands, {});
}

void VsoGateway::reply(const GatewayCommand& cmd, const CommandResult& result) {
    asio::post(impl_->io, [this, sid = cmd.session, text = result_event(cmd.id, result).dump()] {
        impl_->send_to(sid, text);
    });
}

}  // namespace vertisim::vertidrome
