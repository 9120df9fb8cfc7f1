// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/error.hpp>

namespace randlock {

std::string_view errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::IdentityPoint: return "IdentityPoint";
    case Errc::ZeroKey: return "ZeroKey";
    case Errc::Decode: return "Decode";
    case Errc::MissingUtxo: return "MissingUtxo";
    case Errc::BadWitness: return "BadWitness";
    case Errc::ValueOverflow: return "ValueOverflow";
    case Errc::NegativeFee: return "NegativeFee";
    case Errc::Malformed: return "Malformed";
    case Errc::TooFew: return "TooFew";
    case Errc::DegenerateSum: return "DegenerateSum";
    case Errc::RelationUnsatisfied: return "RelationUnsatisfied";
    case Errc::UnknownBackend: return "UnknownBackend";
    case Errc::ProofRejected: return "ProofRejected";
    case Errc::FundingMissing: return "FundingMissing";
    case Errc::NotYetRevealed: return "NotYetRevealed";
    case Errc::CommitmentMismatch: return "CommitmentMismatch";
    case Errc::RefusalToSign: return "RefusalToSign";
    case Errc::Incomplete: return "Incomplete";
    case Errc::ProtocolViolation: return "ProtocolViolation";
    case Errc::DepthLimit: return "DepthLimit";
    case Errc::DegenerateState: return "DegenerateState";
    case Errc::InsufficientFunds: return "InsufficientFunds";
    case Errc::OutOfOrder: return "OutOfOrder";
    case Errc::WrongBranch: return "WrongBranch";
    case Errc::PeerTimeout: return "PeerTimeout";
    case Errc::DigestMismatch: return "DigestMismatch";
    case Errc::SessionUnknown: return "SessionUnknown";
    case Errc::PortInUse: return "PortInUse";
    case Errc::BadConfig: return "BadConfig";
    }
    return "Unknown";
}

std::optional<Errc> parse_errc(std::string_view name) noexcept
{
    for (int i = 0; i <= static_cast<int>(Errc::BadConfig); ++i) {
        auto code = static_cast<Errc>(i);
        if (errc_name(code) == name) return code;
    }
    return std::nullopt;
}

Error::Error(Errc code, const std::string& what, std::optional<std::size_t> index)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), index_(index)
{
}

} // namespace randlock
