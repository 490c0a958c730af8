#pragma once

// WebSocket transport for Session. Each accepted connection owns one Session
// and is serviced on its own strand, so messages of one connection are
// handled strictly in order while connections proceed concurrently.

#include <rehab/session.hpp>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <memory>
#include <string>
#include <thread>
#include <vector>

namespace rehab {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = boost::beast::websocket;
using tcp = boost::asio::ip::tcp;

inline constexpr const char* kDefaultBind = "127.0.0.1:8737";

class ServerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Splits "host:port". Port 0 asks the OS for a free port.
inline tcp::endpoint parse_bind(const std::string& bind) {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos) throw ServerError("BindFailure: expected host:port, got '" + bind + "'");
    boost::system::error_code ec;
    auto addr = net::ip::make_address(bind.substr(0, colon), ec);
    if (ec) throw ServerError("BindFailure: bad address '" + bind.substr(0, colon) + "'");
    int port = 0;
    try {
        port = std::stoi(bind.substr(colon + 1));
    } catch (const std::exception&) {
        throw ServerError("BindFailure: bad port in '" + bind + "'");
    }
    if (port < 0 || port > 65535) throw ServerError("BindFailure: port out of range");
    return {addr, static_cast<unsigned short>(port)};
}

namespace detail {

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket&& socket, const RunConfig& defaults, std::shared_ptr<SharedStore> store)
        : ws_(std::move(socket)), session_(defaults, std::move(store)) {}

    void run() {
        net::dispatch(ws_.get_executor(), beast::bind_front_handler(&Connection::on_run, shared_from_this()));
    }

private:
    void on_run() {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(beast::bind_front_handler(&Connection::on_accept, shared_from_this()));
    }

    void on_accept(beast::error_code ec) {
        if (ec) return;
        ws_.text(true);
        do_read();
    }

    void do_read() {
        ws_.async_read(buffer_, beast::bind_front_handler(&Connection::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) return;  // closed or failed; the connection dies with its last handler
        const std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        for (const auto& m : session_.handle_text(text)) queue_.push(m);
        maybe_write();
        do_read();
    }

    void maybe_write() {
        if (writing_ || queue_.empty()) return;
        writing_ = true;
        in_flight_ = queue_.pop();
        ws_.async_write(net::buffer(in_flight_), beast::bind_front_handler(&Connection::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        writing_ = false;
        if (ec) return;
        maybe_write();
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    Session session_;
    OutboundQueue queue_;
    std::string in_flight_;
    bool writing_ = false;
};

}  // namespace detail

class Server {
public:
    Server(const std::string& bind, RunConfig defaults, std::filesystem::path store_root, int threads = 2)
        : defaults_(std::move(defaults)),
          store_(std::make_shared<SharedStore>(std::move(store_root))),
          threads_(std::max(1, threads)),
          ioc_(threads_),
          acceptor_(net::make_strand(ioc_)) {
        const tcp::endpoint ep = parse_bind(bind);
        beast::error_code ec;
        acceptor_.open(ep.protocol(), ec);
        if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
        if (!ec) acceptor_.bind(ep, ec);
        if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
        if (ec) throw ServerError("BindFailure: " + bind + ": " + ec.message());
    }

    ~Server() { stop(); }

    unsigned short port() const { return acceptor_.local_endpoint().port(); }

    /// Serves on background threads until stop().
    void start() {
        do_accept();
        for (int i = 0; i < threads_; ++i) workers_.emplace_back([this] { ioc_.run(); });
    }

    /// Serves until SIGINT or SIGTERM.
    void run() {
        net::signal_set signals(ioc_, SIGINT, SIGTERM);
        signals.async_wait([this](beast::error_code, int) { ioc_.stop(); });
        start();
        for (auto& t : workers_) t.join();
        workers_.clear();
    }

    void stop() {
        if (stopped_.exchange(true)) return;
        ioc_.stop();
        for (auto& t : workers_) {
            if (t.joinable() && t.get_id() != std::this_thread::get_id()) t.join();
        }
        workers_.clear();
    }

private:
    void do_accept() {
        acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
            if (!ec) std::make_shared<detail::Connection>(std::move(socket), defaults_, store_)->run();
            if (!stopped_) do_accept();
        });
    }

    RunConfig defaults_;
    std::shared_ptr<SharedStore> store_;
    int threads_;
    net::io_context ioc_;
    tcp::acceptor acceptor_;
    std::vector<std::thread> workers_;
    std::atomic<bool> stopped_{false};
};

}  // namespace rehab
