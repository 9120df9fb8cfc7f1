// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/transport.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace randlock::net {

struct DaemonConfig {
    std::string address = "127.0.0.1";
    std::uint16_t port = 0; ///< 0 picks a free port
    /// A player who has not decided by then loses the turn: the peer times
    /// out and both take their reclaim paths.
    Millis decision_timeout{60000};
    /// Static files (the browser client), served under "/".
    std::optional<std::filesystem::path> static_dir;
};

/// Local API server hosting live sessions.
///
///   POST /session                       SessionConfig JSON -> {"session_id", ...}
///   GET  /session/{id}/state?role=R     player-visible state (404 if unknown)
///   GET  /session/{id}/transcript       transcript once the session is over
///   GET  /schema                        envelope and message schema
///   WS   /session/{id}/events?role=R&from=N
///        server -> {"kind":"event"|"state"|"ack"|"error"|"outcome", ...}
///        client -> {"action":"choose","index":i} (1-based) | {"action":"reveal"}
///
/// All sessions run on one executor, one message at a time.
class Daemon {
public:
    explicit Daemon(DaemonConfig cfg);
    ~Daemon();
    Daemon(const Daemon&) = delete;
    Daemon& operator=(const Daemon&) = delete;

    /// Binds and starts serving on a background thread. Throws Error(PortInUse).
    void start();
    std::uint16_t port() const;
    /// Blocks until stop() is called from elsewhere.
    void wait();
    void stop();

    struct Impl; // internal

private:
    std::shared_ptr<Impl> impl_;
};

} // namespace randlock::net
