#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "vertisim/mqtt/broker.hpp"
#include "vertisim/mqtt/client.hpp"

namespace vertisim::mqtt {

/// Broker bound to a TCP listener. All broker state is touched only from the
/// server's io thread.
class TcpBrokerServer {
public:
    /// Port 0 binds an ephemeral port; see port().
    explicit TcpBrokerServer(std::uint16_t port, BrokerOptions options = {},
                             const std::string& bind_address = "127.0.0.1");
    ~TcpBrokerServer();
    TcpBrokerServer(const TcpBrokerServer&) = delete;
    TcpBrokerServer& operator=(const TcpBrokerServer&) = delete;

    std::uint16_t port() const;

    /// Runs the io loop on a background thread.
    void start();
    /// Runs the io loop on the calling thread until stop().
    void run();
    void stop();

    /// Executes `fn` on the io thread and waits for it.
    void inspect(const std::function<void(const Broker&)>& fn);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Client session over a blocking TCP socket with a reader thread. Thread safe:
/// every Client call is serialized by an internal mutex.
class TcpClientLink {
public:
    TcpClientLink(const std::string& host, std::uint16_t port, ClientOptions options);
    ~TcpClientLink();
    TcpClientLink(const TcpClientLink&) = delete;
    TcpClientLink& operator=(const TcpClientLink&) = delete;

    /// Sends CONNECT and waits for CONNACK. Returns false on timeout or refusal.
    bool connect(std::chrono::milliseconds timeout);

    /// Runs `fn` with exclusive access to the session.
    template <class F>
    auto with_client(F&& fn) {
        std::lock_guard lock(mutex_);
        return fn(*client_);
    }

    /// Messages received since the last call, in arrival order.
    std::vector<Message> take_messages();

    /// Waits until pred() (evaluated under the lock) holds.
    bool wait_until(const std::function<bool(const Client&)>& pred, std::chrono::milliseconds timeout);

    /// Round trip through the broker: returns once a PINGRESP sent after every
    /// packet issued so far has arrived.
    bool ping_and_wait(std::chrono::milliseconds timeout);

    /// Drives retransmissions; call periodically.
    void poll();

    /// Closes the socket without DISCONNECT.
    void close_abruptly();
    /// Sends DISCONNECT and closes.
    void disconnect();

    bool open() const { return open_.load(); }

private:
    void reader();
    Millis elapsed() const;

    struct Socket;
    std::unique_ptr<Socket> socket_;
    std::unique_ptr<Client> client_;
    mutable std::mutex mutex_;
    std::condition_variable changed_;
    std::vector<Message> inbox_;
    std::atomic<bool> open_{false};
    std::thread reader_thread_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace vertisim::mqtt
