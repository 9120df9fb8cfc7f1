// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/bytes.hpp>
#include <randlock/keys.hpp>

#include <nlohmann/json.hpp>

#include <vector>

namespace randlock::commit {

using crypto::GroupPoint;
using crypto::Scalar;

/// Rank chain for one hidden value: A = a·G, h = hash_p(A), H = h·G.
struct CommitmentTriple {
    Scalar a;
    GroupPoint A;
    Scalar h;
    GroupPoint H;

    /// Recomputes the chain from `a`.
    bool consistent() const;
};

/// n >= 2 triples with pairwise distinct first-rank points. Holds secrets;
/// only `third_rank()` ever leaves the owning party.
class CommitmentSet {
public:
    const std::vector<CommitmentTriple>& triples() const { return triples_; }
    std::size_t size() const { return triples_.size(); }
    const CommitmentTriple& at(std::size_t index) const { return triples_.at(index); }

    std::vector<GroupPoint> first_rank() const;
    std::vector<GroupPoint> third_rank() const;

private:
    friend CommitmentSet gen_commitment_set(ByteView seed, std::size_t n);
    std::vector<CommitmentTriple> triples_;
};

/// Derives a_i from (seed, i). Throws Error(TooFew) for n < 2.
CommitmentSet gen_commitment_set(ByteView seed, std::size_t n);
inline CommitmentSet gen_commitment_set(std::string_view seed, std::size_t n)
{
    return gen_commitment_set(as_bytes(seed), n);
}

/// h = hash_p(compressed A). Throws Error(IdentityPoint).
Scalar rank2(const GroupPoint& A);
/// H = h·G (the identity for h = 0).
GroupPoint rank3(const Scalar& h);

struct AssembledKey {
    GroupPoint R;
    GroupPoint base;
    GroupPoint addend;
};

/// R = base + addend. Throws IdentityPoint for identity inputs and
/// DegenerateSum when the sum is the identity.
AssembledKey assemble(const GroupPoint& base, const GroupPoint& addend);

/// R - base.
GroupPoint recover(const GroupPoint& R, const GroupPoint& base);

/// rank3(rank2(A_x)) == H_y. Throws Error(IdentityPoint) for A_x = identity.
bool win_check(const GroupPoint& A_x, const GroupPoint& H_y);

/// (h + sk) mod order, the key controlling base + h·G. Throws Error(ZeroKey).
Scalar derive_spend_key(const Scalar& h, const Scalar& sk);

/// Wire form of the public part: {"H": [hex, ...]}.
nlohmann::json public_json(const CommitmentSet& set);
std::vector<GroupPoint> third_rank_from_json(const nlohmann::json& j);

} // namespace randlock::commit
