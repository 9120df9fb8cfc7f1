// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "flows.hpp"

#include <randlock/json_fields.hpp>

namespace randlock::protocol::detail {

using crypto::Address;
using crypto::hash_160;
using ledger::OutPoint;
using ledger::SpendCondition;
using ledger::Witness;
using nlohmann::json;
using namespace jsonf;

namespace {

// TX2's single output: Bob's assembled address, or Alice after t1.
SpendCondition pot_condition(const Address& addr_b, const GroupPoint& P_a, std::uint64_t t1)
{
    return SpendCondition::any_of(
        {SpendCondition::p2pkh(addr_b), SpendCondition::time_locked(SpendCondition::p2pk(P_a), t1)});
}

class Alice final : public Party {
public:
    Alice(const SessionConfig& cfg, const LedgerState& initial) : Party(Role::Challenger, cfg, initial) {}

    json visible_state() const override
    {
        json j = Party::visible_state();
        j["H"] = points_json(H_);
        if (!tx1_.outputs.empty()) j["addr_a"] = addr_a_.to_hex();
        if (addr_b_) j["addr_b"] = addr_b_->to_hex();
        if (choice_) j["my_choice"] = *choice_ + 1;
        return j;
    }

protected:
    std::vector<Message> on_start() override
    {
        keys_ = derive_keys(cfg_.alice_seed);
        set_ = commit::gen_commitment_set(cfg_.alice_seed + "/set/" + session_id(), cfg_.n);
        H_ = set_.third_rank();
        fund_op_ = ensure_funding(keys_.fund.pk, Role::Challenger, cfg_.deposit_amount());
        if (cfg_.x) {
            choice_ = cfg_.x;
        } else if (cfg_.interactive_alice) {
            set_phase("choose");
            await_decision(Decision::Kind::Choose);
            return {};
        } else {
            choice_ = derive_choice(cfg_.alice_seed, "x");
        }
        return {offer()};
    }

    std::vector<Message> on_decision(const Decision& d) override
    {
        if (d.kind == Decision::Kind::Choose) {
            choice_ = d.index;
            return {offer()};
        }
        return {broadcast()};
    }

    std::vector<Message> on_message(const std::string& type, const json& p) override
    {
        if (type == "accept" && phase() == "offered") return on_accept(p);
        if (type == "settle" && phase() == "revealed") {
            apply(ledger::transaction_from_json(field(p, "tx")));
            verdict_ = true;
            set_phase("settled");
            finish();
            return {};
        }
        if (type == "concede" && phase() == "revealed") {
            verdict_ = false;
            auto tx = reclaim_pot();
            set_phase("reclaimed");
            finish();
            return {Message{"reclaim", {{"height", ledger_.height()}, {"tx", ledger::to_json(tx)}}}};
        }
        throw Error(Errc::ProtocolViolation, "unexpected '" + type + "' in phase " + phase());
    }

    void reclaim() override
    {
        if (!keys_.fund.sk.is_zero()) sweep(fund_op_, keys_.fund, hash_160(keys_.refund.pk));
        if (tx2_.inputs.size() && ledger_.find({ledger::txid(tx2_), 0})) {
            reclaim_pot();
        } else if (tx1_.inputs.size()) {
            sweep({ledger::txid(tx1_), 0}, crypto::keypair_from_secret(addr_sk_), hash_160(keys_.refund.pk));
        }
    }

private:
    Message offer()
    {
        const auto x = *choice_;
        Scalar a_used = set_.at(x).a;
        if (cfg_.cheat == Cheat::ChallengerBadAddr) {
            a_used = commit::gen_commitment_set(cfg_.alice_seed + "/rogue", 2).at(0).a;
        }
        addr_sk_ = keys_.key.sk + a_used;
        addr_a_ = hash_160(keys_.key.pk + GroupPoint::base_mul(a_used));

        proofs::RaStatement stmt{H_, keys_.key.pk, proofs::KeyCommitment::address(addr_a_)};
        proofs::Proof pi_a;
        if (cfg_.cheat == Cheat::ChallengerBadAddr) {
            pi_a = forged_proof(stmt, cfg_.alice_seed);
        } else {
            proofs::RaWitness wit;
            for (const auto& t : set_.triples()) wit.a.push_back(t.a);
            wit.x = x;
            pi_a = proofs::prove(stmt, wit, backend());
        }

        tx1_ = {};
        tx1_.inputs.push_back({fund_op_, {}});
        tx1_.outputs.push_back({cfg_.deposit_amount(), SpendCondition::p2pkh(addr_a_)});
        set_phase("offered");
        return {"offer",
                {{"config", cfg_.public_json()},
                 {"P_a", keys_.key.pk.to_hex()},
                 {"H", points_json(H_)},
                 {"addr_a", addr_a_.to_hex()},
                 {"pi_a", proof_entry(stmt, pi_a)},
                 {"tx1", ledger::to_json(tx1_)},
                 {"funding", funding_json(fund_op_)}}};
    }

    std::vector<Message> on_accept(const json& p)
    {
        auto addr_b = Address::from_hex(str_field(p, "addr_b"));
        proofs::RrStatement stmt{proofs::KeyCommitment::address(addr_b), H_};
        if (!check_proof(field(p, "pi_r"), stmt)) throw Error(Errc::ProofRejected, "pi_r does not verify");
        import_funding(field(p, "funding"));
        OutPoint bob_op{from_hex_array(str_field(field(p, "funding"), "txid")), 0};

        auto tx2 = ledger::transaction_from_json(field(p, "tx2"));
        const auto cond = pot_condition(addr_b, keys_.key.pk, cfg_.t1);
        bool shape = tx2.inputs.size() == 2 && tx2.inputs[0].outpoint == OutPoint{ledger::txid(tx1_), 0} &&
                     tx2.inputs[1].outpoint == bob_op && tx2.outputs.size() == 1 &&
                     tx2.outputs[0].amount == 2 * cfg_.deposit_amount() && tx2.outputs[0].cond == cond;
        if (!shape) throw Error(Errc::ProtocolViolation, "TX2 does not pay the agreed pot");
        auto bob_utxo = ledger_.find(bob_op);
        if (!bob_utxo || bob_utxo->amount != cfg_.deposit_amount() ||
            !ledger::check_condition(bob_utxo->cond, tx2.inputs[1].witness, ledger::sighash(tx2), ledger_.height())) {
            throw Error(Errc::ProtocolViolation, "Bob's TX2 input is not signed for his deposit");
        }
        tx2_ = tx2;
        addr_b_ = addr_b;

        if (cfg_.cheat == Cheat::ChallengerRefuseSign) {
            stall(Errc::RefusalToSign);
            return {};
        }
        if (cfg_.interactive_alice) {
            set_phase("reveal");
            await_decision(Decision::Kind::Reveal);
            return {};
        }
        return {broadcast()};
    }

    Message broadcast()
    {
        tx1_.inputs[0].witness = ledger::sign_input(keys_.fund, tx1_);
        apply(tx1_);

        // Completing TX2 reveals P_a + A_x, which is what lets Bob settle.
        Scalar sk = addr_sk_;
        if (cfg_.cheat == Cheat::ChallengerRevealMismatch) sk = keys_.key.sk + set_.at((*choice_ + 1) % cfg_.n).a;
        auto kp = crypto::keypair_from_secret(sk);
        tx2_.inputs[0].witness = ledger::sign_input(kp, tx2_);
        if (cfg_.cheat != Cheat::ChallengerRevealMismatch) apply(tx2_);
        set_phase("revealed");
        return {"broadcast", {{"tx1", ledger::to_json(tx1_)}, {"tx2", ledger::to_json(tx2_)}}};
    }

    Transaction reclaim_pot()
    {
        advance_to(cfg_.t1);
        const OutPoint pot{ledger::txid(tx2_), 0};
        auto utxo = ledger_.find(pot);
        if (!utxo) throw Error(Errc::MissingUtxo, "pot already spent");
        Transaction tx;
        tx.inputs.push_back({pot, {}});
        tx.outputs.push_back({utxo->amount, SpendCondition::p2pkh(hash_160(keys_.refund.pk))});
        tx.inputs[0].witness = Witness::branch(1, ledger::sign_input(keys_.key, tx));
        apply(tx);
        timelock_reclaimed_ = true;
        return tx;
    }

    static Hash256 from_hex_array(const std::string& hex) { return array_from_hex<32>(hex); }

    PartyKeys keys_;
    commit::CommitmentSet set_;
    std::vector<GroupPoint> H_;
    OutPoint fund_op_;
    Scalar addr_sk_;
    Address addr_a_;
    std::optional<Address> addr_b_;
    Transaction tx1_;
    Transaction tx2_;
};

class Bob final : public Party {
public:
    Bob(const SessionConfig& cfg, const LedgerState& initial) : Party(Role::Accepter, cfg, initial) {}

    json visible_state() const override
    {
        json j = Party::visible_state();
        j["H"] = points_json(H_);
        if (addr_a_) j["addr_a"] = addr_a_->to_hex();
        if (addr_b_) j["addr_b"] = addr_b_->to_hex();
        if (choice_) j["my_choice"] = *choice_ + 1;
        return j;
    }

protected:
    std::vector<Message> on_start() override
    {
        keys_ = derive_keys(cfg_.bob_seed);
        set_phase("waiting");
        return {};
    }

    std::vector<Message> on_decision(const Decision& d) override
    {
        choice_ = d.index;
        return {accept()};
    }

    std::vector<Message> on_message(const std::string& type, const json& p) override
    {
        if (type == "offer" && phase() == "waiting") return on_offer(p);
        if (type == "broadcast" && phase() == "accepted") return on_broadcast(p);
        if (type == "reclaim" && phase() == "conceded") {
            advance_to(uint_field(p, "height"));
            apply(ledger::transaction_from_json(field(p, "tx")));
            set_phase("done");
            finish();
            return {};
        }
        throw Error(Errc::ProtocolViolation, "unexpected '" + type + "' in phase " + phase());
    }

    void reclaim() override
    {
        if (!fund_op_) fund_op_ = find_funding(keys_.fund.pk, Role::Accepter, cfg_.deposit_amount());
        if (fund_op_) sweep(*fund_op_, keys_.fund, hash_160(keys_.refund.pk));
    }

private:
    std::vector<Message> on_offer(const json& p)
    {
        cfg_.adopt_public(field(p, "config"));
        P_a_ = GroupPoint::from_hex(str_field(p, "P_a"));
        H_ = points_from(field(p, "H"));
        addr_a_ = Address::from_hex(str_field(p, "addr_a"));
        if (H_.size() != cfg_.n) throw Error(Errc::ProtocolViolation, "commitment list has the wrong length");
        proofs::RaStatement stmt{H_, P_a_, proofs::KeyCommitment::address(*addr_a_)};
        if (!check_proof(field(p, "pi_a"), stmt)) throw Error(Errc::ProofRejected, "pi_a does not verify");

        import_funding(field(p, "funding"));
        tx1_ = ledger::transaction_from_json(field(p, "tx1"));
        const OutPoint alice_op{array_from_hex<32>(str_field(field(p, "funding"), "txid")), 0};
        bool shape = tx1_.inputs.size() == 1 && tx1_.inputs[0].outpoint == alice_op && tx1_.outputs.size() == 1 &&
                     tx1_.outputs[0].amount == cfg_.deposit_amount() &&
                     tx1_.outputs[0].cond == SpendCondition::p2pkh(*addr_a_);
        if (!shape) throw Error(Errc::ProtocolViolation, "TX1 does not lock Alice's deposit to addr_a");
        fund_op_ = ensure_funding(keys_.fund.pk, Role::Accepter, cfg_.deposit_amount());

        if (cfg_.y) {
            choice_ = cfg_.y;
        } else if (cfg_.interactive_bob) {
            set_phase("choose");
            await_decision(Decision::Kind::Choose);
            return {};
        } else {
            choice_ = derive_choice(cfg_.bob_seed, "y");
        }
        return {accept()};
    }

    Message accept()
    {
        const auto y = *choice_;
        GroupPoint R_b = keys_.key.pk + H_[y];
        if (cfg_.cheat == Cheat::AccepterBadAddr) R_b = R_b + GroupPoint::generator();
        addr_b_ = hash_160(R_b);

        proofs::RrStatement stmt{proofs::KeyCommitment::address(*addr_b_), H_};
        Scalar signer = keys_.key.sk;
        if (cfg_.cheat == Cheat::AccepterNoKey) signer = crypto::keygen(cfg_.bob_seed + "/not-my-key").sk;
        auto sigma = crypto::sig_gen(signer, stmt.addr_b.bytes());
        proofs::Proof pi_r;
        proofs::RrWitness wit{keys_.key.pk, sigma, y};
        if (proofs::holds_rr(stmt, wit)) {
            pi_r = proofs::prove(stmt, wit, backend());
        } else {
            pi_r = forged_proof(stmt, cfg_.bob_seed);
        }

        tx2_ = {};
        tx2_.inputs.push_back({{ledger::txid(tx1_), 0}, {}});
        tx2_.inputs.push_back({*fund_op_, {}});
        tx2_.outputs.push_back({2 * cfg_.deposit_amount(), pot_condition(*addr_b_, P_a_, cfg_.t1)});
        tx2_.inputs[1].witness = ledger::sign_input(keys_.fund, tx2_);
        set_phase("accepted");
        return {"accept",
                {{"addr_b", addr_b_->to_hex()},
                 {"pi_r", proof_entry(stmt, pi_r)},
                 {"tx2", ledger::to_json(tx2_)},
                 {"funding", funding_json(*fund_op_)}}};
    }

    std::vector<Message> on_broadcast(const json& p)
    {
        auto tx1 = ledger::transaction_from_json(field(p, "tx1"));
        auto tx2 = ledger::transaction_from_json(field(p, "tx2"));
        if (ledger::txid(tx1) != ledger::txid(tx1_) || ledger::txid(tx2) != ledger::txid(tx2_)) {
            throw Error(Errc::ProtocolViolation, "broadcast transactions differ from the agreed ones");
        }
        apply(tx1);
        try {
            apply(tx2);
        } catch (const Error& e) {
            if (e.code() == Errc::BadWitness && e.index() == std::optional<std::size_t>(0)) {
                throw Error(Errc::CommitmentMismatch, "revealed key does not open addr_a");
            }
            throw;
        }

        // Settlement: recover A_x from the reveal and test it against H_y.
        auto R = tx2.inputs[0].witness.revealed_key();
        if (!R) throw Error(Errc::ProtocolViolation, "TX2 input 0 reveals no key");
        GroupPoint A_x = commit::recover(*R, P_a_);
        bool win = commit::win_check(A_x, H_[*choice_]);
        verdict_ = win;
        if (cfg_.cheat == Cheat::AccepterStall) {
            stall(Errc::RefusalToSign);
            return {};
        }
        if (!win) {
            set_phase("conceded");
            return {Message{"concede", json::object()}};
        }
        auto kp = crypto::keypair_from_secret(commit::derive_spend_key(crypto::hash_p(A_x), keys_.key.sk));
        if (hash_160(kp.pk) != *addr_b_) throw Error(Errc::ProtocolViolation, "derived key does not match addr_b");
        Transaction tx3;
        tx3.inputs.push_back({{ledger::txid(tx2_), 0}, {}});
        tx3.outputs.push_back({2 * cfg_.deposit_amount(), SpendCondition::p2pkh(hash_160(keys_.refund.pk))});
        tx3.inputs[0].witness = Witness::branch(0, ledger::sign_input(kp, tx3));
        apply(tx3);
        set_phase("settled");
        finish();
        return {Message{"settle", {{"tx", ledger::to_json(tx3)}}}};
    }

    PartyKeys keys_;
    GroupPoint P_a_;
    std::vector<GroupPoint> H_;
    std::optional<Address> addr_a_;
    std::optional<Address> addr_b_;
    std::optional<OutPoint> fund_op_;
    Transaction tx1_;
    Transaction tx2_;
};

} // namespace

std::unique_ptr<Party> make_thimbles(Role role, const SessionConfig& cfg, const LedgerState& initial)
{
    if (role == Role::Challenger) return std::make_unique<Alice>(cfg, initial);
    return std::make_unique<Bob>(cfg, initial);
}

} // namespace randlock::protocol::detail
