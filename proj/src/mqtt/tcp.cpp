#include "vertisim/mqtt/tcp.hpp"

#include <array>
#include <deque>
#include <future>
#include <map>

#include <boost/asio.hpp>

namespace vertisim::mqtt {

namespace asio = boost::asio;
using asio::ip::tcp;

// ---------------------------------------------------------------- server

struct TcpBrokerServer::Impl {
    struct Conn {
        explicit Conn(tcp::socket s) : socket(std::move(s)) {}
        tcp::socket socket;
        std::array<std::uint8_t, 8192> read_buffer{};
        std::deque<Bytes> write_queue;
        bool closed = false;
    };

    asio::io_context io;
    tcp::acceptor acceptor;
    asio::steady_timer timer;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::map<ConnectionId, std::shared_ptr<Conn>> conns;
    ConnectionId next_id = 1;
    Broker broker;
    std::thread thread;
    std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;

    Impl(std::uint16_t port, BrokerOptions options, const std::string& bind_address)
        : acceptor(io),
          timer(io),
          broker(
              options, [this](ConnectionId id, Bytes bytes) { write(id, std::move(bytes)); },
              [this](ConnectionId id) { close(id); }) {
        const tcp::endpoint ep(asio::ip::make_address(bind_address), port);
        acceptor.open(ep.protocol());
        acceptor.set_option(tcp::acceptor::reuse_address(true));
        acceptor.bind(ep);
        acceptor.listen();
        accept();
    }

    Millis now() const {
        return std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - start);
    }

    void accept() {
        acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
            if (ec) return;  // acceptor closed
            socket.set_option(tcp::no_delay(true));
            const auto id = next_id++;
            auto conn = std::make_shared<Conn>(std::move(socket));
            conns[id] = conn;
            broker.open(id, now());
            read(id, conn);
            rearm();
            accept();
        });
    }

    void read(ConnectionId id, const std::shared_ptr<Conn>& conn) {
        conn->socket.async_read_some(asio::buffer(conn->read_buffer),
                                     [this, id, conn](boost::system::error_code ec, std::size_t n) {
                                         if (conn->closed) return;
                                         if (ec) {
                                             conn->closed = true;
                                             conns.erase(id);
                                             broker.connection_lost(id, now());
                                             rearm();
                                             return;
                                         }
                                         broker.receive(id, std::span(conn->read_buffer.data(), n), now());
                                         rearm();
                                         if (!conn->closed) read(id, conn);
                                     });
    }

    void write(ConnectionId id, Bytes bytes) {
        const auto it = conns.find(id);
        if (it == conns.end()) return;
        auto conn = it->second;
        conn->write_queue.push_back(std::move(bytes));
        if (conn->write_queue.size() == 1) flush(conn);
    }

    void flush(const std::shared_ptr<Conn>& conn) {
        asio::async_write(conn->socket, asio::buffer(conn->write_queue.front()),
                          [this, conn](boost::system::error_code ec, std::size_t) {
                              if (ec) return;  // reader notices the failure
                              conn->write_queue.pop_front();
                              if (!conn->write_queue.empty()) {
                                  flush(conn);
                              } else if (conn->closed) {
                                  boost::system::error_code ignored;
                                  conn->socket.shutdown(tcp::socket::shutdown_both, ignored);
                                  conn->socket.close(ignored);
                              }
                          });
    }

    void close(ConnectionId id) {
        const auto it = conns.find(id);
        if (it == conns.end()) return;
        auto conn = it->second;
        conns.erase(it);
        conn->closed = true;
        // Let queued bytes (e.g. a refusing CONNACK) drain before the socket goes.
        if (conn->write_queue.empty()) {
            boost::system::error_code ignored;
            conn->socket.shutdown(tcp::socket::shutdown_both, ignored);
            conn->socket.close(ignored);
        }
    }

    void rearm() {
        const auto deadline = broker.next_deadline();
        if (!deadline) {
            timer.cancel();
            return;
        }
        timer.expires_at(start + *deadline);
        timer.async_wait([this](boost::system::error_code ec) {
            if (ec) return;
            broker.on_timer(now());
            rearm();
        });
    }

    void shutdown() {
        boost::system::error_code ignored;
        acceptor.close(ignored);
        timer.cancel();
        for (auto& [_, conn] : conns) {
            conn->closed = true;
            conn->socket.close(ignored);
        }
        conns.clear();
        work.reset();
        io.stop();
    }
};

TcpBrokerServer::TcpBrokerServer(std::uint16_t port, BrokerOptions options, const std::string& bind_address)
    : impl_(std::make_unique<Impl>(port, options, bind_address)) {}

TcpBrokerServer::~TcpBrokerServer() { stop(); }

std::uint16_t TcpBrokerServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void TcpBrokerServer::start() {
    impl_->work.emplace(impl_->io.get_executor());
    impl_->thread = std::thread([this] { impl_->io.run(); });
}

void TcpBrokerServer::run() { impl_->io.run(); }

void TcpBrokerServer::stop() {
    if (!impl_) return;
    if (impl_->io.stopped()) {
        if (impl_->thread.joinable()) impl_->thread.join();
        return;
    }
    if (impl_->thread.joinable()) {
        asio::post(impl_->io, [this] { impl_->shutdown(); });
        impl_->thread.join();
    } else {
        impl_->shutdown();
    }
}

void TcpBrokerServer::inspect(const std::function<void(const Broker&)>& fn) {
    std::promise<void> done;
    asio::post(impl_->io, [&] {
        fn(impl_->broker);
        done.set_value();
    });
    done.get_future().wait();
}

// ---------------------------------------------------------------- client

struct TcpClientLink::Socket {
    asio::io_context io;
    tcp::socket socket{io};
    std::mutex write_mutex;
};

TcpClientLink::TcpClientLink(const std::string& host, std::uint16_t port, ClientOptions options)
    : socket_(std::make_unique<Socket>()), start_(std::chrono::steady_clock::now()) {
    tcp::resolver resolver(socket_->io);
    asio::connect(socket_->socket, resolver.resolve(host, std::to_string(port)));
    socket_->socket.set_option(tcp::no_delay(true));
    open_ = true;

    client_ = std::make_unique<Client>(
        std::move(options),
        [this](Bytes bytes) {
            std::lock_guard lock(socket_->write_mutex);
            boost::system::error_code ec;
            asio::write(socket_->socket, asio::buffer(bytes), ec);
            if (ec) open_ = false;
        },
        [this] { return elapsed(); });
    client_->set_message_handler([this](const Message& m) { inbox_.push_back(m); });
    reader_thread_ = std::thread([this] { reader(); });
}

TcpClientLink::~TcpClientLink() {
    close_abruptly();
    if (reader_thread_.joinable()) reader_thread_.join();
    boost::system::error_code ignored;
    socket_->socket.close(ignored);
}

Millis TcpClientLink::elapsed() const {
    return std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - start_);
}

void TcpClientLink::reader() {
    std::array<std::uint8_t, 8192> buffer{};
    while (true) {
        boost::system::error_code ec;
        const auto n = socket_->socket.read_some(asio::buffer(buffer), ec);
        std::lock_guard lock(mutex_);
        if (ec) {
            open_ = false;
            changed_.notify_all();
            return;
        }
        client_->receive(std::span(buffer.data(), n));
        changed_.notify_all();
    }
}

bool TcpClientLink::connect(std::chrono::milliseconds timeout) {
    with_client([](Client& c) { c.connect(); });
    return wait_until([](const Client& c) { return c.connack_code().has_value(); }, timeout) &&
           with_client([](Client& c) { return c.connected(); });
}

std::vector<Message> TcpClientLink::take_messages() {
    std::lock_guard lock(mutex_);
    std::vector<Message> out;
    out.swap(inbox_);
    return out;
}

bool TcpClientLink::wait_until(const std::function<bool(const Client&)>& pred,
                               std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    return changed_.wait_for(lock, timeout, [&] { return pred(*client_) || !open_.load(); }) &&
           pred(*client_);
}

bool TcpClientLink::ping_and_wait(std::chrono::milliseconds timeout) {
    const auto target = with_client([](Client& c) {
        c.ping();
        return c.pings_answered() + 1;
    });
    return wait_until([target](const Client& c) { return c.pings_answered() >= target; }, timeout);
}

void TcpClientLink::poll() {
    with_client([](Client& c) { c.on_timer(); });
}

void TcpClientLink::close_abruptly() {
    if (!socket_) return;
    std::lock_guard lock(socket_->write_mutex);
    // Shutdown wakes the reader; the descriptor is closed after it exits.
    boost::system::error_code ignored;
    socket_->socket.shutdown(tcp::socket::shutdown_both, ignored);
    open_ = false;
}

void TcpClientLink::disconnect() {
    with_client([](Client& c) { c.disconnect(); });
    close_abruptly();
}

}  // namespace vertisim::mqtt
