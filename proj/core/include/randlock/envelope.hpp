// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/bytes.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

namespace randlock::net {

/// One protocol message on the wire. The payload travels as hex of its
/// canonical JSON dump so the digest covers exact bytes.
struct Envelope {
    std::string session_id; ///< 16 bytes, hex
    std::uint64_t step = 0;
    std::string sender;
    std::string type;
    std::string payload_hex;
    std::string digest; ///< SHA256 over the fields above, hex

    static Envelope make(std::string session_id, std::uint64_t step, std::string sender, std::string type,
                         const nlohmann::json& payload);

    Hash256 compute_digest() const;
    bool digest_ok() const;
    nlohmann::json payload() const;

    nlohmann::json to_json() const;
    /// Structural decode only; digest checking is separate.
    static Envelope from_json(const nlohmann::json& j);

    friend bool operator==(const Envelope&, const Envelope&) = default;
};

/// Canonical text form of a payload: sorted keys, no whitespace.
std::string canonical(const nlohmann::json& j);

/// Throws DigestMismatch, or SessionUnknown when `expected` is non-empty and differs.
void check_envelope(const Envelope& env, std::string_view expected_session);

std::string new_session_id(ByteView entropy);

} // namespace randlock::net
