#pragma once

// Blocking WebSocket client for driving a Server in tests.

#include <rehab/protocol.hpp>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace rehab::testing {

class WsClient {
public:
    explicit WsClient(unsigned short port) : ws_(ioc_) {
        boost::asio::ip::tcp::resolver resolver(ioc_);
        auto results = resolver.resolve("127.0.0.1", std::to_string(port));
        boost::asio::connect(ws_.next_layer(), results);
        ws_.handshake("127.0.0.1:" + std::to_string(port), "/");
        ws_.text(true);
    }

    ~WsClient() {
        boost::beast::error_code ec;
        ws_.close(boost::beast::websocket::close_code::normal, ec);
    }

    void send(const std::string& text) { ws_.write(boost::asio::buffer(text)); }
    void send(const ProtocolMessage& m) { send(encode(m)); }

    ProtocolMessage receive() {
        boost::beast::flat_buffer buf;
        ws_.read(buf);
        return decode(boost::beast::buffers_to_string(buf.data()));
    }

    /// Reads until a cmd_result arrives; returns everything read, result last.
    std::vector<ProtocolMessage> until_result() {
        std::vector<ProtocolMessage> out;
        do {
            out.push_back(receive());
        } while (!std::holds_alternative<CmdResultMsg>(out.back()));
        return out;
    }

private:
    boost::asio::io_context ioc_;
    boost::beast::websocket::stream<boost::asio::ip::tcp::socket> ws_;
};

/// Frame-file lines turned into inbound `frame` messages.
inline std::vector<std::string> frame_messages(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        j["type"] = "frame";
        out.push_back(j.dump());
    }
    return out;
}

inline std::vector<GameEvent> events_of(const std::vector<ProtocolMessage>& msgs) {
    std::vector<GameEvent> out;
    for (const auto& m : msgs) {
        if (auto* e = std::get_if<EventMsg>(&m)) out.push_back(e->event);
    }
    return out;
}

}  // namespace rehab::testing
