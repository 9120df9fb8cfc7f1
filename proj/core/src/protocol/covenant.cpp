// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "flows.hpp"

#include <randlock/json_fields.hpp>

namespace randlock::protocol {

using crypto::Address;
using crypto::hash_160;
using crypto::hash_p;
using ledger::OutPoint;
using ledger::SpendCondition;
using ledger::Witness;
using nlohmann::json;
using namespace jsonf;

namespace {

constexpr const char* kPokLabel = "covenant/pok";

// addr, or addr with a refund branch after `height`.
SpendCondition output_condition(const Address& addr, bool timelocked, const Address& refund, std::uint64_t height)
{
    if (!timelocked) return SpendCondition::p2pkh(addr);
    return SpendCondition::any_of(
        {SpendCondition::p2pkh(addr), SpendCondition::time_locked(SpendCondition::p2pkh(refund), height)});
}

Witness wrap(bool timelocked, Witness w)
{
    return timelocked ? Witness::branch(0, std::move(w)) : w;
}

Transaction pay_all(const OutPoint& op, ledger::Amount amount, const Address& to)
{
    Transaction tx;
    tx.inputs.push_back({op, {}});
    tx.outputs.push_back({amount, SpendCondition::p2pkh(to)});
    return tx;
}

} // namespace

SpendResult covenant_spend_alice(const CovenantAliceState& state, const LedgerState& ledger)
{
    const OutPoint op{state.tx1, 0};
    auto utxo = ledger.find(op);
    if (!utxo) throw Error(Errc::MissingUtxo, "TX1 output 1 is not spendable");
    auto tx = pay_all(op, utxo->amount, state.refund);
    tx.inputs[0].witness = wrap(state.timelocked, ledger::sign_input(state.key, tx));
    return {ledger::apply_transaction(ledger, tx), tx, state.key.pk};
}

SpendResult covenant_spend_bob(const CovenantBobState& state, const LedgerState& ledger)
{
    const auto* tx2 = ledger.spender({state.tx1, 0});
    if (!tx2) throw Error(Errc::NotYetRevealed, "Alice has not spent TX1 output 1");
    std::optional<GroupPoint> P_a;
    for (const auto& in : tx2->inputs) {
        if (in.outpoint == OutPoint{state.tx1, 0}) P_a = in.witness.revealed_key();
    }
    if (!P_a) throw Error(Errc::NotYetRevealed, "TX2 reveals no key");
    if (hash_p(*P_a) * GroupPoint::generator() != state.C) {
        throw Error(Errc::CommitmentMismatch, "revealed key does not match C");
    }
    auto kp = crypto::keypair_from_secret(commit::derive_spend_key(hash_p(*P_a), state.key.sk));

    const OutPoint op{state.tx1, 1};
    auto utxo = ledger.find(op);
    if (!utxo) throw Error(Errc::MissingUtxo, "TX1 output 2 is not spendable");
    auto tx = pay_all(op, utxo->amount, state.refund);
    tx.inputs[0].witness = wrap(state.timelocked, ledger::sign_input(kp, tx));
    return {ledger::apply_transaction(ledger, tx), tx, *P_a};
}

namespace detail {
namespace {

class CovenantAlice final : public Party {
public:
    CovenantAlice(const SessionConfig& cfg, const LedgerState& initial) : Party(Role::Challenger, cfg, initial) {}

    const CovenantAliceState& spend_state() const { return state_; }

    json visible_state() const override
    {
        json j = Party::visible_state();
        if (addr_b_) j["addr_b"] = addr_b_->to_hex();
        return j;
    }

protected:
    std::vector<Message> on_start() override
    {
        keys_ = derive_keys(cfg_.alice_seed);
        state_.key = keys_.key;
        state_.refund = hash_160(keys_.refund.pk);
        state_.timelocked = cfg_.timelocked;
        fund_op_ = ensure_funding(keys_.fund.pk, Role::Challenger, cfg_.deposit_amount());

        const Address addr_a = hash_160(keys_.key.pk);
        C_ = hash_p(keys_.key.pk) * GroupPoint::generator();
        proofs::RcStatement stmt{addr_a, C_};
        auto pi_c = cfg_.cheat == Cheat::ChallengerBadAddr
                        ? forged_proof(stmt, cfg_.alice_seed)
                        : proofs::prove(stmt, proofs::RcWitness{keys_.key.pk}, backend());
        set_phase("setup-sent");
        return {Message{"setup",
                        {{"config", cfg_.public_json()},
                         {"addr_a", addr_a.to_hex()},
                         {"C", C_.to_hex()},
                         {"pi_c", proof_entry(stmt, pi_c)},
                         {"refund", state_.refund.to_hex()},
                         {"funding", funding_json(fund_op_)}}}};
    }

    std::vector<Message> on_message(const std::string& type, const json& p) override
    {
        if (type == "fund" && phase() == "setup-sent") return on_fund(p);
        if (type == "spend" && phase() == "spent") {
            apply(ledger::transaction_from_json(field(p, "tx")));
            set_phase("done");
            finish();
            return {};
        }
        throw Error(Errc::ProtocolViolation, "unexpected '" + type + "' in phase " + phase());
    }

    void reclaim() override
    {
        sweep(fund_op_, keys_.fund, state_.refund);
        if (tx1_.inputs.empty() || !ledger_.find({state_.tx1, 0})) return;
        if (cfg_.timelocked) {
            // Refund branch, without revealing P_a.
            advance_to(cfg_.t1);
            auto tx = pay_all({state_.tx1, 0}, cfg_.deposit_amount(), state_.refund);
            tx.inputs[0].witness = Witness::branch(1, ledger::sign_input(keys_.refund, tx));
            apply(tx);
            timelock_reclaimed_ = true;
        } else {
            apply(covenant_spend_alice(state_, ledger_).tx);
        }
    }

private:
    std::vector<Message> on_fund(const json& p)
    {
        auto P_b = GroupPoint::from_hex(str_field(p, "P_b"));
        if (!check_proof(field(p, "pok"), proofs::DLogStatement{P_b}, context(*this, kPokLabel))) {
            throw Error(Errc::ProofRejected, "Bob's key proof does not verify");
        }
        auto addr_b = Address::from_hex(str_field(p, "addr_b"));
        if (hash_160(P_b + C_) != addr_b) throw Error(Errc::ProofRejected, "addr_b is not bound to C");
        auto refund_b = Address::from_hex(str_field(p, "refund"));
        import_funding(field(p, "funding"));
        const OutPoint bob_op{array_from_hex<32>(str_field(field(p, "funding"), "txid")), 0};

        auto tx1 = ledger::transaction_from_json(field(p, "tx1"));
        const auto d = cfg_.deposit_amount();
        const auto cond_a = output_condition(hash_160(keys_.key.pk), cfg_.timelocked, state_.refund, cfg_.t1);
        const auto cond_b = output_condition(addr_b, cfg_.timelocked, refund_b, cfg_.t2_height());
        bool shape = tx1.inputs.size() == 2 && tx1.inputs[0].outpoint == fund_op_ && tx1.inputs[1].outpoint == bob_op &&
                     tx1.outputs.size() == 2 && tx1.outputs[0] == ledger::TxOutput{d, cond_a} &&
                     tx1.outputs[1] == ledger::TxOutput{d, cond_b};
        if (!shape) throw Error(Errc::ProtocolViolation, "TX1 does not match the covenant");
        auto bob_utxo = ledger_.find(bob_op);
        if (!bob_utxo ||
            !ledger::check_condition(bob_utxo->cond, tx1.inputs[1].witness, ledger::sighash(tx1), ledger_.height())) {
            throw Error(Errc::ProtocolViolation, "Bob's TX1 input is not signed");
        }
        addr_b_ = addr_b;
        if (cfg_.cheat == Cheat::ChallengerRefuseSign) {
            stall(Errc::RefusalToSign);
            return {};
        }

        tx1.inputs[0].witness = ledger::sign_input(keys_.fund, tx1);
        apply(tx1);
        tx1_ = tx1;
        state_.tx1 = ledger::txid(tx1);
        std::vector<Message> out{Message{"cosigned", {{"tx1", ledger::to_json(tx1)}}}};
        if (!cfg_.covenant_spends) {
            set_phase("done");
            finish();
            return out;
        }

        Transaction tx2;
        if (cfg_.cheat == Cheat::ChallengerRevealMismatch) {
            // Spends with a key other than the one C commits to; the ledger refuses it.
            tx2 = pay_all({state_.tx1, 0}, d, state_.refund);
            tx2.inputs[0].witness = wrap(cfg_.timelocked, ledger::sign_input(keys_.refund, tx2));
        } else {
            tx2 = covenant_spend_alice(state_, ledger_).tx;
            apply(tx2);
        }
        out.push_back(Message{"spend", {{"tx", ledger::to_json(tx2)}}});
        set_phase("spent");
        return out;
    }

    PartyKeys keys_;
    CovenantAliceState state_;
    OutPoint fund_op_;
    GroupPoint C_;
    std::optional<Address> addr_b_;
    Transaction tx1_;
};

class CovenantBob final : public Party {
public:
    CovenantBob(const SessionConfig& cfg, const LedgerState& initial) : Party(Role::Accepter, cfg, initial) {}

    const CovenantBobState& spend_state() const { return state_; }

    json visible_state() const override
    {
        json j = Party::visible_state();
        if (addr_a_) j["addr_a"] = addr_a_->to_hex();
        if (addr_b_) j["addr_b"] = addr_b_->to_hex();
        return j;
    }

protected:
    std::vector<Message> on_start() override
    {
        keys_ = derive_keys(cfg_.bob_seed);
        state_.key = keys_.key;
        state_.refund = hash_160(keys_.refund.pk);
        set_phase("waiting");
        return {};
    }

    std::vector<Message> on_message(const std::string& type, const json& p) override
    {
        if (type == "setup" && phase() == "waiting") return on_setup(p);
        if (type == "cosigned" && phase() == "funded") return on_cosigned(p);
        if (type == "spend" && phase() == "locked") return on_spend(p);
        throw Error(Errc::ProtocolViolation, "unexpected '" + type + "' in phase " + phase());
    }

    void reclaim() override
    {
        if (!fund_op_) fund_op_ = find_funding(keys_.fund.pk, Role::Accepter, cfg_.deposit_amount());
        if (fund_op_) sweep(*fund_op_, keys_.fund, state_.refund);
        if (!tx1_ || !ledger_.find({state_.tx1, 1})) return;
        if (ledger_.spender({state_.tx1, 0})) {
            apply(covenant_spend_bob(state_, ledger_).tx);
        } else if (cfg_.timelocked) {
            advance_to(cfg_.t2_height());
            auto tx = pay_all({state_.tx1, 1}, cfg_.deposit_amount(), state_.refund);
            tx.inputs[0].witness = Witness::branch(1, ledger::sign_input(keys_.refund, tx));
            apply(tx);
            timelock_reclaimed_ = true;
        }
        // Without the refund branch Bob's output waits for Alice's reveal.
    }

private:
    std::vector<Message> on_setup(const json& p)
    {
        cfg_.adopt_public(field(p, "config"));
        state_.timelocked = cfg_.timelocked;
        auto addr_a = Address::from_hex(str_field(p, "addr_a"));
        state_.C = GroupPoint::from_hex(str_field(p, "C"));
        if (!check_proof(field(p, "pi_c"), proofs::RcStatement{addr_a, state_.C})) {
            throw Error(Errc::ProofRejected, "pi_c does not verify");
        }
        auto refund_a = Address::from_hex(str_field(p, "refund"));
        import_funding(field(p, "funding"));
        const OutPoint alice_op{array_from_hex<32>(str_field(field(p, "funding"), "txid")), 0};
        fund_op_ = ensure_funding(keys_.fund.pk, Role::Accepter, cfg_.deposit_amount());

        GroupPoint R_b = keys_.key.pk + state_.C;
        if (cfg_.cheat == Cheat::AccepterBadAddr) R_b = R_b + GroupPoint::generator();
        addr_a_ = addr_a;
        addr_b_ = hash_160(R_b);

        const auto d = cfg_.deposit_amount();
        Transaction tx1;
        tx1.inputs.push_back({alice_op, {}});
        tx1.inputs.push_back({*fund_op_, {}});
        tx1.outputs.push_back({d, output_condition(addr_a, cfg_.timelocked, refund_a, cfg_.t1)});
        tx1.outputs.push_back({d, output_condition(*addr_b_, cfg_.timelocked, state_.refund, cfg_.t2_height())});
        tx1.inputs[1].witness = ledger::sign_input(keys_.fund, tx1);
        tx1_ = tx1;
        state_.tx1 = ledger::txid(tx1);

        auto ctx = context(*this, kPokLabel);
        proofs::Proof pok;
        if (cfg_.cheat == Cheat::AccepterNoKey) {
            // Someone else's transcript relabelled as a proof for P_b.
            auto other = crypto::keygen(cfg_.bob_seed + "/not-my-key");
            pok = proofs::dlog_prove(other.sk, other.pk, ctx);
            pok.statement_digest = proofs::statement_digest(proofs::DLogStatement{keys_.key.pk});
        } else {
            pok = proofs::dlog_prove(keys_.key.sk, keys_.key.pk, ctx);
        }
        set_phase("funded");
        return {Message{"fund",
                        {{"P_b", keys_.key.pk.to_hex()},
                         {"pok", proof_entry(proofs::DLogStatement{keys_.key.pk}, pok, ctx)},
                         {"addr_b", addr_b_->to_hex()},
                         {"tx1", ledger::to_json(tx1)},
                         {"funding", funding_json(*fund_op_)},
                         {"refund", state_.refund.to_hex()}}}};
    }

    std::vector<Message> on_cosigned(const json& p)
    {
        auto tx1 = ledger::transaction_from_json(field(p, "tx1"));
        if (ledger::txid(tx1) != state_.tx1) throw Error(Errc::ProtocolViolation, "co-signed TX1 differs");
        apply(tx1);
        if (!cfg_.covenant_spends) {
            set_phase("done");
            finish();
            return {};
        }
        if (cfg_.cheat == Cheat::AccepterStall) {
            stall(Errc::RefusalToSign);
            return {};
        }
        set_phase("locked");
        return {};
    }

    std::vector<Message> on_spend(const json& p)
    {
        try {
            apply(ledger::transaction_from_json(field(p, "tx")));
        } catch (const Error& e) {
            if (e.code() == Errc::BadWitness) throw Error(Errc::CommitmentMismatch, "TX2 does not open addr_a");
            throw;
        }
        auto res = covenant_spend_bob(state_, ledger_);
        apply(res.tx);
        set_phase("done");
        finish();
        return {Message{"spend", {{"tx", ledger::to_json(res.tx)}}}};
    }

    PartyKeys keys_;
    CovenantBobState state_;
    std::optional<OutPoint> fund_op_;
    std::optional<Transaction> tx1_;
    std::optional<Address> addr_a_;
    std::optional<Address> addr_b_;
};

} // namespace

std::unique_ptr<Party> make_covenant(Role role, const SessionConfig& cfg, const LedgerState& initial)
{
    if (role == Role::Challenger) return std::make_unique<CovenantAlice>(cfg, initial);
    return std::make_unique<CovenantBob>(cfg, initial);
}

const CovenantAliceState* alice_state_of(const Party& p)
{
    auto* a = dynamic_cast<const CovenantAlice*>(&p);
    return a ? &a->spend_state() : nullptr;
}

const CovenantBobState* bob_state_of(const Party& p)
{
    auto* b = dynamic_cast<const CovenantBob*>(&p);
    return b ? &b->spend_state() : nullptr;
}

} // namespace detail

const CovenantAliceState* covenant_alice_state(const Party& p)
{
    return detail::alice_state_of(p);
}

const CovenantBobState* covenant_bob_state(const Party& p)
{
    return detail::bob_state_of(p);
}

} // namespace randlock::protocol
