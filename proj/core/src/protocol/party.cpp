// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/hash.hpp>
#include <randlock/json_fields.hpp>
#include <randlock/protocol.hpp>

#include "flows.hpp"

#include <algorithm>

namespace randlock::protocol {

using ledger::OutPoint;
using ledger::SpendCondition;
using nlohmann::json;

Party::Party(Role role, SessionConfig cfg, LedgerState initial)
    : cfg_(std::move(cfg)), ledger_(std::move(initial)), role_(role)
{
}

template <class F> std::vector<Message> Party::guarded(F&& fn)
{
    try {
        return fn();
    } catch (const Error& e) {
        return abort_locally(e.code(), e.what());
    }
}

std::vector<Message> Party::abort_locally(Errc code, const std::string& reason)
{
    abort_ = AbortInfo{code, role_, last_step_, reason};
    awaiting_ = false;
    try {
        reclaim();
    } catch (const Error& e) {
        abort_->reason += " (reclaim failed: " + std::string(e.what()) + ")";
    }
    set_phase("aborted");
    finish();
    return {Message{"abort", {{"code", errc_name(code)}, {"reason", reason}}}};
}

std::vector<Message> Party::start()
{
    if (session_id_.empty()) session_id_ = cfg_.resolved_session_id();
    return guarded([&] { return on_start(); });
}

std::vector<Message> Party::handle(const net::Envelope& env)
{
    last_step_ = std::max(last_step_, env.step);
    if (finished_) return {};
    if (session_id_.empty()) session_id_ = env.session_id;
    if (env.type == "abort") {
        json p = env.payload();
        auto code = parse_errc(p.value("code", "")).value_or(Errc::ProtocolViolation);
        abort_ = AbortInfo{code, peer_of(role_), env.step, p.value("reason", "")};
        awaiting_ = false;
        try {
            reclaim();
        } catch (const Error& e) {
            abort_->reason += " (reclaim failed: " + std::string(e.what()) + ")";
        }
        set_phase("aborted");
        finish();
        return {};
    }
    if (stall_code_) return {};
    return guarded([&] {
        json payload = env.payload();
        check_schema(env.type, payload);
        return on_message(env.type, payload);
    });
}

std::vector<Message> Party::timeout()
{
    if (finished_) return {};
    return abort_locally(stall_code_.value_or(Errc::PeerTimeout),
                         stall_code_ ? "party went silent" : "peer did not respond before the deadline");
}

std::vector<Message> Party::fail(Errc code, const std::string& reason)
{
    if (finished_) return {};
    return abort_locally(code, reason);
}

std::vector<Message> Party::decide(const Decision& d)
{
    if (finished_ || !awaiting_ || d.kind != expected_) {
        throw Error(Errc::OutOfOrder, "decision not expected in phase '" + phase_ + "'");
    }
    if (d.kind == Decision::Kind::Choose && d.index >= cfg_.n) throw Error(Errc::BadConfig, "choice out of range");
    awaiting_ = false;
    return guarded([&] { return on_decision(d); });
}

std::vector<Message> Party::on_decision(const Decision&)
{
    throw Error(Errc::OutOfOrder, "this party takes no decisions");
}

net::Envelope Party::seal(const Message& m)
{
    return net::Envelope::make(session_id_, ++last_step_, std::string(role_name(role_)), m.type, m.payload);
}

std::vector<json> Party::take_ledger_events()
{
    return std::exchange(events_, {});
}

json Party::visible_state() const
{
    json j{{"role", role_name(role_)},
           {"phase", phase_},
           {"n", cfg_.n},
           {"finished", finished_},
           {"awaiting_decision", awaiting_},
           {"height", ledger_.height()}};
    j["verdict"] = verdict_ ? json(*verdict_ ? "accepter-won" : "challenger-won") : json(nullptr);
    j["abort"] = abort_ ? abort_->to_json() : json(nullptr);
    return j;
}

// ---- ledger helpers ----

void Party::apply(const Transaction& tx)
{
    ledger_ = ledger::apply_transaction(ledger_, tx);
    events_.push_back({{"kind", "ledger"},
                       {"party", role_name(role_)},
                       {"op", "apply"},
                       {"txid", to_hex(ledger::txid(tx))},
                       {"tx", ledger::to_json(tx)}});
}

void Party::advance_to(std::uint64_t height)
{
    if (height <= ledger_.height()) return;
    ledger_ = ledger::advance_height(ledger_, height - ledger_.height());
    events_.push_back({{"kind", "ledger"}, {"party", role_name(role_)}, {"op", "advance"}, {"height", height}});
}

namespace {

const ledger::Mint* find_mint(const LedgerState& state, const Hash256& txid)
{
    for (const auto& m : state.mints()) {
        if (m.txid == txid) return &m;
    }
    return nullptr;
}

} // namespace

OutPoint Party::ensure_funding(const GroupPoint& pk, Role owner, Amount amount)
{
    auto cond = SpendCondition::p2pkh(crypto::hash_160(pk));
    auto label = detail::funding_label(session_id_, owner);
    OutPoint op{ledger::mint_txid(amount, cond, label), 0};
    if (ledger_.find(op)) return op;
    if (find_mint(ledger_, op.txid)) throw Error(Errc::FundingMissing, "deposit output already spent");
    if (!cfg_.auto_fund) throw Error(Errc::FundingMissing, "no deposit output for " + std::string(role_name(owner)));
    ledger_ = ledger::mint(ledger_, amount, cond, label).first;
    events_.push_back({{"kind", "ledger"},
                       {"party", role_name(role_)},
                       {"op", "mint"},
                       {"txid", to_hex(op.txid)},
                       {"amount", amount},
                       {"cond", ledger::to_json(cond)},
                       {"label", label}});
    return op;
}

std::optional<OutPoint> Party::find_funding(const GroupPoint& pk, Role owner, Amount amount) const
{
    auto cond = SpendCondition::p2pkh(crypto::hash_160(pk));
    OutPoint op{ledger::mint_txid(amount, cond, detail::funding_label(session_id_, owner)), 0};
    if (ledger_.find(op)) return op;
    return std::nullopt;
}

json Party::funding_json(const OutPoint& op) const
{
    const auto* m = find_mint(ledger_, op.txid);
    if (!m) throw Error(Errc::FundingMissing, "deposit was not minted");
    return {{"txid", to_hex(op.txid)}, {"amount", m->amount}, {"cond", ledger::to_json(m->cond)}, {"label", m->label}};
}

void Party::import_funding(const json& funding)
{
    using namespace jsonf;
    auto amount = uint_field(funding, "amount");
    auto cond = ledger::condition_from_json(field(funding, "cond"));
    auto label = str_field(funding, "label");
    auto txid = ledger::mint_txid(amount, cond, label);
    if (to_hex(txid) != str_field(funding, "txid")) throw Error(Errc::ProtocolViolation, "funding txid mismatch");
    if (ledger_.find({txid, 0})) return;
    if (find_mint(ledger_, txid)) throw Error(Errc::FundingMissing, "peer deposit already spent");
    if (!cfg_.auto_fund) throw Error(Errc::FundingMissing, "peer deposit not on this ledger");
    ledger_ = ledger::mint(ledger_, amount, cond, label).first;
    events_.push_back({{"kind", "ledger"},
                       {"party", role_name(role_)},
                       {"op", "mint"},
                       {"txid", to_hex(txid)},
                       {"amount", amount},
                       {"cond", ledger::to_json(cond)},
                       {"label", label}});
}

void Party::sweep(const OutPoint& op, const KeyPair& key, const crypto::Address& to)
{
    auto utxo = ledger_.find(op);
    if (!utxo) return;
    Transaction tx;
    tx.inputs.push_back({op, {}});
    tx.outputs.push_back({utxo->amount, SpendCondition::p2pkh(to)});
    tx.inputs[0].witness = ledger::sign_input(key, tx);
    apply(tx);
}

// ---- proofs ----

Bytes Party::session_bytes() const
{
    return from_hex(session_id_);
}

proofs::ProofBackend& Party::backend()
{
    if (!backend_) backend_ = proofs::make_backend(cfg_.backend, session_bytes());
    return *backend_;
}

json Party::proof_entry(const proofs::Statement& stmt, const proofs::Proof& proof, const Bytes& context) const
{
    return {{"statement", proofs::to_json(stmt)}, {"proof", proof.to_hex()}, {"context", to_hex(context)}};
}

bool Party::check_proof(const json& entry, const proofs::Statement& expected, const Bytes& context)
{
    using namespace jsonf;
    auto stmt = proofs::statement_from_json(field(entry, "statement"));
    if (proofs::statement_digest(stmt) != proofs::statement_digest(expected)) return false;
    if (hex_field(entry, "context") != context) return false;
    auto proof = proofs::Proof::from_hex(str_field(entry, "proof"));
    if (proof.backend == proofs::SchnorrBackend::kTag) return proofs::SchnorrBackend(context).verify(expected, proof);
    return proofs::verify(expected, proof, backend());
}

std::size_t Party::derive_choice(const std::string& seed, const char* label) const
{
    ByteWriter w;
    w.blob(as_bytes(seed)).blob(as_bytes(label)).blob(as_bytes(session_id_));
    auto h = crypto::tagged_sha256("randlock/choice", w.bytes());
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | h[i];
    return static_cast<std::size_t>(v % cfg_.n);
}

} // namespace randlock::protocol
