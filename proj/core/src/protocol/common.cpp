// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "flows.hpp"

#include <randlock/hash.hpp>

namespace randlock::protocol {

namespace detail {

PartyKeys derive_keys(const std::string& seed)
{
    return {crypto::keygen(seed + "/key"), crypto::keygen(seed + "/funding"), crypto::keygen(seed + "/refund")};
}

std::string funding_label(const std::string& session, Role owner)
{
    return "funding/" + session + "/" + std::string(role_name(owner));
}

proofs::Proof forged_proof(const proofs::Statement& stmt, const std::string& seed)
{
    proofs::Proof p;
    p.backend = proofs::IdealBackend::kTag;
    p.statement_digest = proofs::statement_digest(stmt);
    auto guess = crypto::tagged_sha256("randlock/forgery", as_bytes(seed));
    p.attestation.assign(guess.begin(), guess.end());
    return p;
}

Bytes context(const Party& p, std::string_view label)
{
    Bytes out = from_hex(p.session_id());
    out.insert(out.end(), label.begin(), label.end());
    return out;
}

std::vector<GroupPoint> points_from(const nlohmann::json& arr)
{
    if (!arr.is_array()) throw Error(Errc::ProtocolViolation, "expected a point list");
    std::vector<GroupPoint> out;
    for (const auto& v : arr) out.push_back(GroupPoint::from_hex(v.get<std::string>()));
    return out;
}

nlohmann::json points_json(const std::vector<GroupPoint>& pts)
{
    auto arr = nlohmann::json::array();
    for (const auto& p : pts) arr.push_back(p.to_hex());
    return arr;
}

} // namespace detail

LedgerState with_deposits(const SessionConfig& cfg, LedgerState base)
{
    const auto sid = cfg.resolved_session_id();
    const std::pair<Role, const std::string*> owners[] = {{Role::Challenger, &cfg.alice_seed},
                                                          {Role::Accepter, &cfg.bob_seed}};
    for (const auto& [role, seed] : owners) {
        auto cond = ledger::SpendCondition::p2pkh(crypto::hash_160(detail::derive_keys(*seed).fund.pk));
        base = ledger::mint(base, cfg.deposit_amount(), cond, detail::funding_label(sid, role)).first;
    }
    return base;
}

std::unique_ptr<Party> make_party(Role role, const SessionConfig& cfg, const LedgerState& initial)
{
    switch (cfg.flow) {
    case Flow::Thimbles: return detail::make_thimbles(role, cfg, initial);
    case Flow::OpRand: return detail::make_oprand(role, cfg, initial);
    case Flow::Covenant: return detail::make_covenant(role, cfg, initial);
    case Flow::Trace: break;
    }
    throw Error(Errc::BadConfig, "the trace flow has no interactive parties");
}

} // namespace randlock::protocol
