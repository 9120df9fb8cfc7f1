// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/transport.hpp>

#include <cstdint>
#include <memory>
#include <string>

namespace randlock::net {

/// Newline-delimited JSON envelopes over a TCP connection. A reader thread
/// queues incoming lines; a lost connection surfaces as PeerTimeout.
class TcpTransport final : public Transport {
public:
    struct Impl;
    explicit TcpTransport(std::unique_ptr<Impl> impl);
    ~TcpTransport() override;

    void send(const Envelope& env) override;
    Envelope recv(Millis deadline) override;
    std::optional<Envelope> poll() override;
    bool pending() const override;

    void close();

private:
    std::unique_ptr<Impl> impl_;
};

class TcpListener {
public:
    /// Binds `address:port` (port 0 picks a free one). Throws Error(PortInUse).
    explicit TcpListener(std::uint16_t port, const std::string& address = "127.0.0.1");
    ~TcpListener();

    std::uint16_t port() const;
    /// Waits for one peer. Throws Error(PeerTimeout) after `deadline`.
    std::unique_ptr<TcpTransport> accept(Millis deadline);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Retries refused connections until `deadline`, then throws Error(PeerTimeout).
std::unique_ptr<TcpTransport> tcp_connect(const std::string& host, std::uint16_t port, Millis deadline);

} // namespace randlock::net
