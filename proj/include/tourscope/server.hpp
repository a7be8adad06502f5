#pragma once

#include "tourscope/session.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace tourscope {

struct ServerOptions {
    std::string address = "127.0.0.1";
    unsigned short port = 9147;   ///< 0 picks a free port
    /// Static assets (the browser client) served over plain HTTP GET.
    std::optional<std::filesystem::path> static_dir;
    /// Stop accepting and return from run() after the first done payload.
    bool stop_on_done = true;
    /// Frames queued for a slow client beyond this are dropped.
    std::size_t max_pending_frames = 8;
};

/// Websocket front end. Every connection gets a fresh Session built from
/// the same config; each session is driven by a frame timer and its inbound
/// messages on one I/O thread, which serializes all mutations.
class SessionServer {
public:
    /// Binds immediately; throws IoError when the address is unavailable.
    SessionServer(SessionConfig config, ServerOptions options = {});
    ~SessionServer();
    SessionServer(const SessionServer&) = delete;
    SessionServer& operator=(const SessionServer&) = delete;

    unsigned short port() const;

    /// Blocks until stop() or, with stop_on_done, the first finished session.
    void run();
    /// Thread-safe.
    void stop();

    /// Called on the I/O thread when a session finishes.
    void on_done(std::function<void(const DonePayload&)> callback);
    std::optional<DonePayload> final_payload() const;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

/// Synchronous protocol client, used headless by tests and tooling.
class ProtocolClient {
public:
    ProtocolClient(const std::string& host, unsigned short port);
    ~ProtocolClient();
    ProtocolClient(const ProtocolClient&) = delete;
    ProtocolClient& operator=(const ProtocolClient&) = delete;

    void send(const Event& event);
    void send_text(const std::string& text);
    /// Blocks for the next server message.
    std::string read();
    void close();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace tourscope
