#include "tourscope/server.hpp"

#include "tourscope/error.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

namespace tourscope {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

std::string_view mime_type(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".html" || ext == ".htm") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    return "application/octet-stream";
}

}  // namespace

struct SessionServer::Impl {
    SessionConfig config;
    ServerOptions options;
    asio::io_context io;
    tcp::acceptor acceptor{io};
    std::function<void(const DonePayload&)> done_callback;
    mutable std::mutex payload_mutex;
    std::optional<DonePayload> payload;

    Impl(SessionConfig c, ServerOptions o) : config(std::move(c)), options(std::move(o)) {}

    void finished(const DonePayload& p) {
        {
            std::lock_guard lock(payload_mutex);
            payload = p;
        }
        if (done_callback) done_callback(p);
        if (options.stop_on_done) {
            // Let the done message flush before tearing the loop down.
            auto timer = std::make_shared<asio::steady_timer>(io, std::chrono::milliseconds(200));
            timer->async_wait([this, timer](beast::error_code) { io.stop(); });
        }
    }

    void accept();
};

namespace {

class WsConnection : public std::enable_shared_from_this<WsConnection> {
public:
    WsConnection(tcp::socket socket, SessionServer::Impl& server, Session session)
        : ws_(std::move(socket)), timer_(ws_.get_executor()), server_(server), session_(std::move(session)) {}

    void start(http::request<http::string_body> request) {
        ws_.text(true);
        ws_.async_accept(request, [self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->enqueue(self->session_.meta_message());
            self->schedule_tick();
            self->read();
        });
    }

private:
    void schedule_tick() {
        const auto period = std::chrono::duration<double>(1.0 / session_.config().frames_per_second);
        timer_.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(period));
        timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
            if (ec || self->closed_ || self->session_.state().done) return;
            if (self->pending_frames() <= self->server_.options.max_pending_frames) {
                if (auto frame = self->session_.tick()) self->enqueue(std::move(*frame));
            }
            self->schedule_tick();
        });
    }

    std::size_t pending_frames() const { return outbox_.size(); }

    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->closed_ = true;
                self->timer_.cancel();
                return;
            }
            const std::string text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            self->on_message(text);
            if (!self->session_.state().done) self->read();
        });
    }

    void on_message(const std::string& text) {
        try {
            const Event event = parse_event(text);
            for (auto& msg : session_.handle(event)) enqueue(std::move(msg));
            if (auto payload = session_.done_payload()) {
                timer_.cancel();
                close_after_flush_ = true;
                server_.finished(*payload);
            }
        } catch (const Error& e) {
            enqueue(error_message(to_string(e.code()), e.detail()));
        }
    }

    void enqueue(std::string message) {
        outbox_.push_back(std::move(message));
        if (!writing_) write_next();
    }

    void write_next() {
        if (outbox_.empty()) {
            writing_ = false;
            if (close_after_flush_ && !closed_) {
                closed_ = true;
                ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
            }
            return;
        }
        writing_ = true;
        ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->outbox_.pop_front();
            if (ec) {
                self->closed_ = true;
                self->timer_.cancel();
                self->outbox_.clear();
                self->writing_ = false;
                return;
            }
            self->write_next();
        });
    }

    websocket::stream<tcp::socket> ws_;
    asio::steady_timer timer_;
    beast::flat_buffer buffer_;
    SessionServer::Impl& server_;
    Session session_;
    std::deque<std::string> outbox_;
    bool writing_ = false;
    bool closed_ = false;
    bool close_after_flush_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
public:
    HttpConnection(tcp::socket socket, SessionServer::Impl& server) : socket_(std::move(socket)), server_(server) {}

    void start() {
        http::async_read(socket_, buffer_, request_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (!ec) self->dispatch();
        });
    }

private:
    void dispatch() {
        if (websocket::is_upgrade(request_)) {
            try {
                auto ws = std::make_shared<WsConnection>(std::move(socket_), server_, Session(server_.config));
                ws->start(std::move(request_));
            } catch (const std::exception& e) {
                std::cerr << "session setup failed: " << e.what() << '\n';
            }
            return;
        }
        serve_file();
    }

    void serve_file() {
        auto response = std::make_shared<http::response<http::string_body>>();
        response->version(request_.version());
        response->keep_alive(false);
        std::string target(request_.target());
        if (target.empty() || target == "/") target = "/index.html";
        const bool traversal = target.find("..") != std::string::npos;
        std::optional<std::string> body;
        std::filesystem::path path;
        if (server_.options.static_dir && !traversal && request_.method() == http::verb::get) {
            path = *server_.options.static_dir / target.substr(1);
            std::ifstream in(path, std::ios::binary);
            if (in) {
                std::ostringstream ss;
                ss << in.rdbuf();
                body = ss.str();
            }
        }
        if (body) {
            response->result(http::status::ok);
            response->set(http::field::content_type, std::string(mime_type(path)));
            response->body() = std::move(*body);
        } else {
            response->result(http::status::not_found);
            response->set(http::field::content_type, "text/plain");
            response->body() = "not found\n";
        }
        response->prepare_payload();
        http::async_write(socket_, *response, [self = shared_from_this(), response](beast::error_code, std::size_t) {
            beast::error_code ignored;
            self->socket_.shutdown(tcp::socket::shutdown_send, ignored);
        });
    }

    tcp::socket socket_;
    SessionServer::Impl& server_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> request_;
};

}  // namespace

void SessionServer::Impl::accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
        if (ec) return;
        std::make_shared<HttpConnection>(std::move(socket), *this)->start();
        accept();
    });
}

SessionServer::SessionServer(SessionConfig config, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(options))) {
    // Fail early on a bad config rather than per connection.
    Session probe(impl_->config);
    impl_->config = probe.config();
    beast::error_code ec;
    const auto address = asio::ip::make_address(impl_->options.address, ec);
    if (ec) throw Error(ErrorCode::IoError, "bad address '" + impl_->options.address + "'");
    const tcp::endpoint endpoint(address, impl_->options.port);
    impl_->acceptor.open(endpoint.protocol(), ec);
    if (!ec) impl_->acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) impl_->acceptor.bind(endpoint, ec);
    if (!ec) impl_->acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot listen on " + impl_->options.address + ":" +
                                            std::to_string(impl_->options.port) + ": " + ec.message());
    }
}

SessionServer::~SessionServer() = default;

unsigned short SessionServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void SessionServer::run() {
    impl_->accept();
    impl_->io.run();
}

void SessionServer::stop() {
    asio::post(impl_->io, [this] { impl_->io.stop(); });
}

void SessionServer::on_done(std::function<void(const DonePayload&)> callback) {
    impl_->done_callback = std::move(callback);
}

std::optional<DonePayload> SessionServer::final_payload() const {
    std::lock_guard lock(impl_->payload_mutex);
    return impl_->payload;
}

}  // namespace tourscope
