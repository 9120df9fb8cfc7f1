// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "flows.hpp"

#include <randlock/json_fields.hpp>

namespace randlock::protocol::detail {

using crypto::hash_p;
using nlohmann::json;
using proofs::KeyCommitment;
using namespace jsonf;

namespace {

constexpr const char* kPokLabel = "oprand/pok";

Scalar digest_field(const json& p, const char* name)
{
    return Scalar::from_hex(str_field(p, name));
}

class Challenger final : public Party {
public:
    Challenger(const SessionConfig& cfg, const LedgerState& initial) : Party(Role::Challenger, cfg, initial) {}

    json visible_state() const override
    {
        json j = Party::visible_state();
        j["H"] = points_json(H_);
        if (choice_) j["my_choice"] = *choice_ + 1;
        return j;
    }

protected:
    std::vector<Message> on_start() override
    {
        key_ = crypto::keygen(cfg_.alice_seed + "/key");
        set_ = commit::gen_commitment_set(cfg_.alice_seed + "/set/" + session_id(), cfg_.n);
        H_ = set_.third_rank();
        if (cfg_.x) {
            choice_ = cfg_.x;
        } else if (cfg_.interactive_alice) {
            set_phase("choose");
            await_decision(Decision::Kind::Choose);
            return {};
        } else {
            choice_ = derive_choice(cfg_.alice_seed, "x");
        }
        return propose();
    }

    std::vector<Message> on_decision(const Decision& d) override
    {
        if (d.kind == Decision::Kind::Choose) {
            choice_ = d.index;
            return propose();
        }
        return {reveal()};
    }

    std::vector<Message> on_message(const std::string& type, const json& p) override
    {
        if (type == "choose" && phase() == "proposed") return on_choose(p);
        if (type == "verdict" && phase() == "revealed") return on_verdict(p);
        throw Error(Errc::ProtocolViolation, "unexpected '" + type + "' in phase " + phase());
    }

private:
    std::vector<Message> propose()
    {
        Scalar a = set_.at(*choice_).a;
        if (cfg_.cheat == Cheat::ChallengerBadAddr) a = commit::gen_commitment_set(cfg_.alice_seed + "/rogue", 2).at(0).a;
        R_c_ = key_.pk + GroupPoint::base_mul(a);
        auto commitment = KeyCommitment::digest(hash_p(R_c_));

        proofs::RaStatement stmt{H_, key_.pk, commitment};
        proofs::Proof pi_a;
        if (cfg_.cheat == Cheat::ChallengerBadAddr) {
            pi_a = forged_proof(stmt, cfg_.alice_seed);
        } else {
            proofs::RaWitness wit;
            for (const auto& t : set_.triples()) wit.a.push_back(t.a);
            wit.x = *choice_;
            pi_a = proofs::prove(stmt, wit, backend());
        }
        set_phase("proposed");
        return {Message{"commit",
                        {{"config", cfg_.public_json()},
                         {"P_c", key_.pk.to_hex()},
                         {"commitment", hash_p(R_c_).to_hex()}}},
                Message{"propose", {{"H", points_json(H_)}, {"pi_a", proof_entry(stmt, pi_a)}}}};
    }

    std::vector<Message> on_choose(const json& p)
    {
        commitment_a_ = digest_field(p, "commitment");
        proofs::RrStatement stmt{KeyCommitment::digest(commitment_a_), H_};
        if (!check_proof(field(p, "pi_r"), stmt)) throw Error(Errc::ProofRejected, "pi_r does not verify");
        if (cfg_.cheat == Cheat::ChallengerRefuseSign) {
            stall(Errc::RefusalToSign);
            return {};
        }
        if (cfg_.interactive_alice) {
            set_phase("reveal");
            await_decision(Decision::Kind::Reveal);
            return {};
        }
        return {reveal()};
    }

    Message reveal()
    {
        GroupPoint R = R_c_;
        if (cfg_.cheat == Cheat::ChallengerRevealMismatch) {
            R = key_.pk + set_.at((*choice_ + 1) % cfg_.n).A;
        }
        set_phase("revealed");
        return {"reveal", {{"R_c", R.to_hex()}}};
    }

    std::vector<Message> on_verdict(const json& p)
    {
        auto R_a = GroupPoint::from_hex(str_field(p, "R_a"));
        auto P_a = GroupPoint::from_hex(str_field(p, "P_a"));
        if (hash_p(R_a) != commitment_a_) throw Error(Errc::CommitmentMismatch, "R_a does not open the accepter's hash");
        if (!check_proof(field(p, "pok"), proofs::DLogStatement{P_a}, context(*this, kPokLabel))) {
            throw Error(Errc::ProofRejected, "accepter's key proof does not verify");
        }
        // Which H the accepter used is now public; recompute the outcome.
        const GroupPoint H_y = R_a - P_a;
        bool win = H_y == H_[*choice_];
        if (bool_field(p, "win") != win) throw Error(Errc::ProtocolViolation, "accepter misreported the outcome");
        verdict_ = win;
        set_phase("done");
        finish();
        return {};
    }

    KeyPair key_;
    commit::CommitmentSet set_;
    std::vector<GroupPoint> H_;
    GroupPoint R_c_;
    Scalar commitment_a_;
};

class Accepter final : public Party {
public:
    Accepter(const SessionConfig& cfg, const LedgerState& initial) : Party(Role::Accepter, cfg, initial) {}

    json visible_state() const override
    {
        json j = Party::visible_state();
        j["H"] = points_json(H_);
        if (choice_) j["my_choice"] = *choice_ + 1;
        return j;
    }

protected:
    std::vector<Message> on_start() override
    {
        key_ = crypto::keygen(cfg_.bob_seed + "/key");
        set_phase("waiting");
        return {};
    }

    std::vector<Message> on_decision(const Decision& d) override
    {
        choice_ = d.index;
        return {choose()};
    }

    std::vector<Message> on_message(const std::string& type, const json& p) override
    {
        if (type == "commit" && phase() == "waiting") {
            cfg_.adopt_public(field(p, "config"));
            P_c_ = GroupPoint::from_hex(str_field(p, "P_c"));
            commitment_c_ = digest_field(p, "commitment");
            set_phase("committed");
            return {};
        }
        if (type == "propose" && phase() == "committed") return on_propose(p);
        if (type == "reveal" && phase() == "chosen") return on_reveal(p);
        throw Error(Errc::ProtocolViolation, "unexpected '" + type + "' in phase " + phase());
    }

private:
    std::vector<Message> on_propose(const json& p)
    {
        H_ = points_from(field(p, "H"));
        if (H_.size() != cfg_.n) throw Error(Errc::ProtocolViolation, "commitment list has the wrong length");
        proofs::RaStatement stmt{H_, P_c_, KeyCommitment::digest(commitment_c_)};
        if (!check_proof(field(p, "pi_a"), stmt)) throw Error(Errc::ProofRejected, "pi_a does not verify");
        if (cfg_.y) {
            choice_ = cfg_.y;
        } else if (cfg_.interactive_bob) {
            set_phase("choose");
            await_decision(Decision::Kind::Choose);
            return {};
        } else {
            choice_ = derive_choice(cfg_.bob_seed, "y");
        }
        return {choose()};
    }

    Message choose()
    {
        R_a_ = key_.pk + H_[*choice_];
        if (cfg_.cheat == Cheat::AccepterBadAddr) R_a_ = R_a_ + GroupPoint::generator();
        proofs::RrStatement stmt{KeyCommitment::digest(hash_p(R_a_)), H_};
        Scalar signer = key_.sk;
        if (cfg_.cheat == Cheat::AccepterNoKey) signer = crypto::keygen(cfg_.bob_seed + "/not-my-key").sk;
        proofs::RrWitness wit{key_.pk, crypto::sig_gen(signer, stmt.addr_b.bytes()), *choice_};
        auto pi_r = proofs::holds_rr(stmt, wit) ? proofs::prove(stmt, wit, backend()) : forged_proof(stmt, cfg_.bob_seed);
        set_phase("chosen");
        return {"choose", {{"commitment", hash_p(R_a_).to_hex()}, {"pi_r", proof_entry(stmt, pi_r)}}};
    }

    std::vector<Message> on_reveal(const json& p)
    {
        auto R_c = GroupPoint::from_hex(str_field(p, "R_c"));
        if (hash_p(R_c) != commitment_c_) throw Error(Errc::CommitmentMismatch, "R_c does not open the published hash");
        GroupPoint A_x = commit::recover(R_c, P_c_);
        bool win = commit::win_check(A_x, H_[*choice_]);
        verdict_ = win;
        if (cfg_.cheat == Cheat::AccepterStall) {
            stall(Errc::RefusalToSign);
            return {};
        }
        auto ctx = context(*this, kPokLabel);
        auto pok = proofs::dlog_prove(key_.sk, key_.pk, ctx);
        set_phase("done");
        finish();
        return {Message{"verdict",
                        {{"win", win},
                         {"R_a", R_a_.to_hex()},
                         {"P_a", key_.pk.to_hex()},
                         {"pok", proof_entry(proofs::DLogStatement{key_.pk}, pok, ctx)}}}};
    }

    KeyPair key_;
    GroupPoint P_c_;
    Scalar commitment_c_;
    std::vector<GroupPoint> H_;
    GroupPoint R_a_;
};

} // namespace

std::unique_ptr<Party> make_oprand(Role role, const SessionConfig& cfg, const LedgerState& initial)
{
    if (role == Role::Challenger) return std::make_unique<Challenger>(cfg, initial);
    return std::make_unique<Accepter>(cfg, initial);
}

} // namespace randlock::protocol::detail
