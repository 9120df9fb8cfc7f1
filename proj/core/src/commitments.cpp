// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/commitments.hpp>
#include <randlock/error.hpp>

#include <algorithm>

namespace randlock::commit {

namespace {
constexpr std::string_view kDeriveTag = "/commitment/";
}

bool CommitmentTriple::consistent() const
{
    return !a.is_zero() && A == GroupPoint::base_mul(a) && h == rank2(A) && H == rank3(h);
}

std::vector<GroupPoint> CommitmentSet::first_rank() const
{
    std::vector<GroupPoint> out;
    for (const auto& t : triples_) out.push_back(t.A);
    return out;
}

std::vector<GroupPoint> CommitmentSet::third_rank() const
{
    std::vector<GroupPoint> out;
    for (const auto& t : triples_) out.push_back(t.H);
    return out;
}

CommitmentSet gen_commitment_set(ByteView seed, std::size_t n)
{
    if (n < 2) throw Error(Errc::TooFew, "a commitment set needs at least two values");
    CommitmentSet set;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint32_t counter = 0;; ++counter) {
            ByteWriter w;
            w.raw(seed).str(kDeriveTag).u32(static_cast<std::uint32_t>(i)).u32(counter);
            Scalar a = crypto::hash_p(w.bytes());
            if (a.is_zero()) continue;
            GroupPoint A = GroupPoint::base_mul(a);
            bool duplicate = std::any_of(set.triples_.begin(), set.triples_.end(), [&](const auto& t) { return t.A == A; });
            if (duplicate) continue;
            Scalar h = rank2(A);
            set.triples_.push_back({a, A, h, rank3(h)});
            break;
        }
    }
    return set;
}

Scalar rank2(const GroupPoint& A)
{
    if (A.is_identity()) throw Error(Errc::IdentityPoint, "rank-2 commitment of the identity");
    return crypto::hash_p(A);
}

GroupPoint rank3(const Scalar& h)
{
    return GroupPoint::base_mul(h);
}

AssembledKey assemble(const GroupPoint& base, const GroupPoint& addend)
{
    if (base.is_identity() || addend.is_identity()) throw Error(Errc::IdentityPoint, "cannot assemble with the identity");
    GroupPoint R = base + addend;
    if (R.is_identity()) throw Error(Errc::DegenerateSum, "assembled key is the identity");
    return {R, base, addend};
}

GroupPoint recover(const GroupPoint& R, const GroupPoint& base)
{
    return R - base;
}

bool win_check(const GroupPoint& A_x, const GroupPoint& H_y)
{
    return rank3(rank2(A_x)) == H_y;
}

Scalar derive_spend_key(const Scalar& h, const Scalar& sk)
{
    Scalar k = h + sk;
    if (k.is_zero()) throw Error(Errc::ZeroKey, "derived spend key is zero");
    return k;
}

nlohmann::json public_json(const CommitmentSet& set)
{
    nlohmann::json list = nlohmann::json::array();
    for (const auto& H : set.third_rank()) list.push_back(H.to_hex());
    return {{"H", list}};
}

std::vector<GroupPoint> third_rank_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("H") || !j.at("H").is_array()) throw Error(Errc::Decode, "expected {\"H\": [...]}");
    std::vector<GroupPoint> out;
    for (const auto& h : j.at("H")) {
        if (!h.is_string()) throw Error(Errc::Decode, "H entries must be hex strings");
        out.push_back(GroupPoint::from_hex(h.get<std::string>()));
    }
    return out;
}

} // namespace randlock::commit
