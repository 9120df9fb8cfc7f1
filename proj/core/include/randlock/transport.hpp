// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/envelope.hpp>

#include <chrono>
#include <memory>
#include <optional>
#include <utility>

namespace randlock::net {

using Millis = std::chrono::milliseconds;

/// Ordered, reliable, exactly-once stream of envelopes in each direction.
/// One producer and one consumer may use an endpoint concurrently.
class Transport {
public:
    virtual ~Transport() = default;

    virtual void send(const Envelope& env) = 0;
    /// Blocks until an envelope arrives; Error(PeerTimeout) once `deadline` passes.
    virtual Envelope recv(Millis deadline) = 0;
    /// Non-blocking receive of an envelope that is already deliverable.
    virtual std::optional<Envelope> poll() = 0;
    /// True while an envelope is queued toward this endpoint but not yet deliverable.
    virtual bool pending() const = 0;

    /// Session this endpoint accepts; empty until bound. Received envelopes
    /// with another id raise SessionUnknown.
    const std::string& session() const { return session_; }
    void bind(std::string session_id) { session_ = std::move(session_id); }

protected:
    /// Validates and binds on first use.
    void accept(const Envelope& env);

private:
    std::string session_;
};

/// In-process pair of connected endpoints with optional delivery latency.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_duplex(Millis latency = Millis(0));

} // namespace randlock::net
