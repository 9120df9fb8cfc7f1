// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/envelope.hpp>
#include <randlock/error.hpp>
#include <randlock/hash.hpp>
#include <randlock/json_fields.hpp>

namespace randlock::net {

using nlohmann::json;

std::string canonical(const json& j)
{
    return j.dump();
}

Envelope Envelope::make(std::string session_id, std::uint64_t step, std::string sender, std::string type,
                        const json& payload)
{
    Envelope e{std::move(session_id), step, std::move(sender), std::move(type), to_hex(as_bytes(canonical(payload))), {}};
    e.digest = to_hex(e.compute_digest());
    return e;
}

Hash256 Envelope::compute_digest() const
{
    ByteWriter w;
    w.blob(as_bytes(session_id)).u64(step).blob(as_bytes(sender)).blob(as_bytes(type)).blob(as_bytes(payload_hex));
    return crypto::sha256(w.bytes());
}

bool Envelope::digest_ok() const
{
    return digest == to_hex(compute_digest());
}

json Envelope::payload() const
{
    Bytes raw = from_hex(payload_hex);
    auto j = json::parse(raw.begin(), raw.end(), nullptr, false);
    if (j.is_discarded()) throw Error(Errc::Decode, "payload is not JSON");
    return j;
}

json Envelope::to_json() const
{
    return {{"session_id", session_id}, {"step", step},     {"sender", sender},
            {"type", type},             {"payload_hex", payload_hex}, {"digest", digest}};
}

Envelope Envelope::from_json(const json& j)
{
    using namespace jsonf;
    return {str_field(j, "session_id"), uint_field(j, "step"), str_field(j, "sender"),
            str_field(j, "type"),       str_field(j, "payload_hex"), str_field(j, "digest")};
}

void check_envelope(const Envelope& env, std::string_view expected_session)
{
    if (!env.digest_ok()) {
        throw Error(Errc::DigestMismatch, "envelope digest mismatch at step " + std::to_string(env.step));
    }
    if (!expected_session.empty() && env.session_id != expected_session) {
        throw Error(Errc::SessionUnknown, "unknown session " + env.session_id);
    }
}

std::string new_session_id(ByteView entropy)
{
    auto h = crypto::tagged_sha256("randlock/session", entropy);
    return to_hex(ByteView(h).first(16));
}

} // namespace randlock::net
