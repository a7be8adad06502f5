#include "tourscope/error.hpp"
#include "tourscope/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace tourscope {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct ProtocolClient::Impl {
    asio::io_context io;
    websocket::stream<tcp::socket> ws{io};
    beast::flat_buffer buffer;
};

ProtocolClient::ProtocolClient(const std::string& host, unsigned short port) : impl_(std::make_unique<Impl>()) {
    try {
        tcp::resolver resolver(impl_->io);
        const auto results = resolver.resolve(host, std::to_string(port));
        asio::connect(impl_->ws.next_layer(), results.begin(), results.end());
        impl_->ws.handshake(host + ":" + std::to_string(port), "/");
        impl_->ws.text(true);
    } catch (const boost::system::system_error& e) {
        throw Error(ErrorCode::IoError, std::string("cannot connect: ") + e.what());
    }
}

ProtocolClient::~ProtocolClient() {
    beast::error_code ignored;
    if (impl_->ws.is_open()) impl_->ws.close(websocket::close_code::normal, ignored);
}

void ProtocolClient::send(const Event& event) { send_text(serialize_event(event)); }

void ProtocolClient::send_text(const std::string& text) {
    try {
        impl_->ws.write(asio::buffer(text));
    } catch (const boost::system::system_error& e) {
        throw Error(ErrorCode::IoError, std::string("send failed: ") + e.what());
    }
}

std::string ProtocolClient::read() {
    try {
        impl_->buffer.consume(impl_->buffer.size());
        impl_->ws.read(impl_->buffer);
        return beast::buffers_to_string(impl_->buffer.data());
    } catch (const boost::system::system_error& e) {
        throw Error(ErrorCode::IoError, std::string("read failed: ") + e.what());
    }
}

void ProtocolClient::close() {
    beast::error_code ignored;
    if (impl_->ws.is_open()) impl_->ws.close(websocket::close_code::normal, ignored);
}

}  // namespace tourscope
