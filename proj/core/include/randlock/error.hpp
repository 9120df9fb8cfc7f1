// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace randlock {

enum class Errc {
    // group_and_hash
    IdentityPoint,
    ZeroKey,
    Decode,
    // ledger
    MissingUtxo,
    BadWitness,
    ValueOverflow,
    NegativeFee,
    Malformed,
    // commitments
    TooFew,
    DegenerateSum,
    // proofs
    RelationUnsatisfied,
    UnknownBackend,
    // protocol
    ProofRejected,
    FundingMissing,
    NotYetRevealed,
    CommitmentMismatch,
    RefusalToSign,
    Incomplete,
    ProtocolViolation,
    // statetrace
    DepthLimit,
    DegenerateState,
    InsufficientFunds,
    OutOfOrder,
    WrongBranch,
    // session_net
    PeerTimeout,
    DigestMismatch,
    SessionUnknown,
    PortInUse,
    BadConfig,
};

std::string_view errc_name(Errc code) noexcept;
std::optional<Errc> parse_errc(std::string_view name) noexcept;

/// Base exception for every library failure. The code is the stable part;
/// the message is for humans. `index()` carries the failing input index for
/// BadWitness and the protocol step for protocol aborts.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, std::optional<std::size_t> index = std::nullopt);

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    Errc code_;
    std::optional<std::size_t> index_;
};

} // namespace randlock
