// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/protocol.hpp>

namespace randlock::protocol::detail {

struct PartyKeys {
    KeyPair key;    ///< protocol key (P_a / P_b)
    KeyPair fund;   ///< owns the deposit
    KeyPair refund; ///< receives payouts and refunds
};

PartyKeys derive_keys(const std::string& seed);

std::string funding_label(const std::string& session, Role owner);

/// What a cheating prover sends when no real proof exists: a well-formed
/// ideal proof with an attestation it cannot compute.
proofs::Proof forged_proof(const proofs::Statement& stmt, const std::string& seed);

Bytes context(const Party& p, std::string_view label);

std::unique_ptr<Party> make_thimbles(Role role, const SessionConfig& cfg, const LedgerState& initial);
std::unique_ptr<Party> make_oprand(Role role, const SessionConfig& cfg, const LedgerState& initial);
std::unique_ptr<Party> make_covenant(Role role, const SessionConfig& cfg, const LedgerState& initial);

std::vector<GroupPoint> points_from(const nlohmann::json& arr);
nlohmann::json points_json(const std::vector<GroupPoint>& pts);

} // namespace randlock::protocol::detail
