// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/error.hpp>
#include <randlock/hash.hpp>
#include <randlock/json_fields.hpp>
#include <randlock/ledger.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace randlock::ledger {

using nlohmann::json;

namespace {

enum CondTag : std::uint8_t { kTagP2PKH = 1, kTagP2PK = 2, kTagHashLock = 3, kTagTimeLocked = 4, kTagAnyOf = 5 };

constexpr std::uint8_t kEmptyWitness = 0x00;
constexpr std::string_view kTxMagic = "RLTX";
constexpr std::string_view kSighashTag = "randlock/sighash";
constexpr std::string_view kMintTag = "randlock/mint";

bool add_overflows(Amount a, Amount b, Amount& out)
{
    return __builtin_add_overflow(a, b, &out);
}

} // namespace

// ---- SpendCondition ----

SpendCondition SpendCondition::p2pkh(const Address& addr)
{
    SpendCondition c;
    c.kind_ = Kind::P2PKH;
    c.addr_ = addr;
    return c;
}

SpendCondition SpendCondition::p2pk(const GroupPoint& pk)
{
    SpendCondition c;
    c.kind_ = Kind::P2PK;
    c.pk_ = pk;
    return c;
}

SpendCondition SpendCondition::hash_lock(const Scalar& h, SpendCondition inner)
{
    SpendCondition c;
    c.kind_ = Kind::HashLock;
    c.h_ = h;
    c.children_.push_back(std::move(inner));
    return c;
}

SpendCondition SpendCondition::time_locked(SpendCondition inner, std::uint64_t height)
{
    SpendCondition c;
    c.kind_ = Kind::TimeLocked;
    c.height_ = height;
    c.children_.push_back(std::move(inner));
    return c;
}

SpendCondition SpendCondition::any_of(std::vector<SpendCondition> branches)
{
    SpendCondition c;
    c.kind_ = Kind::AnyOf;
    c.children_ = std::move(branches);
    return c;
}

std::size_t SpendCondition::depth() const
{
    std::size_t d = 0;
    for (const auto& child : children_) d = std::max(d, child.depth());
    return d + 1;
}

bool SpendCondition::well_formed() const
{
    if (depth() > kMaxDepth) return false;
    if (kind_ == Kind::AnyOf && children_.size() < 2) return false;
    if ((kind_ == Kind::HashLock || kind_ == Kind::TimeLocked) && children_.size() != 1) return false;
    if (kind_ == Kind::P2PK && pk_.is_identity()) return false;
    return std::all_of(children_.begin(), children_.end(), [](const auto& c) { return c.well_formed(); });
}

void SpendCondition::serialize(ByteWriter& w) const
{
    switch (kind_) {
    case Kind::P2PKH:
        w.u8(kTagP2PKH).raw(addr_.digest());
        break;
    case Kind::P2PK:
        w.u8(kTagP2PK).raw(pk_.compress());
        break;
    case Kind::HashLock:
        w.u8(kTagHashLock).raw(h_.to_bytes());
        inner().serialize(w);
        break;
    case Kind::TimeLocked:
        w.u8(kTagTimeLocked).u64(height_);
        inner().serialize(w);
        break;
    case Kind::AnyOf:
        w.u8(kTagAnyOf).varint(children_.size());
        for (const auto& b : children_) b.serialize(w);
        break;
    }
}

// ---- Witness ----

Witness Witness::key_sig(const GroupPoint& pk, const Signature& sig)
{
    Witness w;
    w.kind_ = Kind::KeySig;
    w.pk_ = pk;
    w.sig_ = sig;
    return w;
}

Witness Witness::hash_preimage(Bytes preimage, Witness inner)
{
    Witness w;
    w.kind_ = Kind::HashPreimage;
    w.preimage_ = std::move(preimage);
    w.children_.push_back(std::move(inner));
    return w;
}

Witness Witness::branch(std::size_t index, Witness inner)
{
    Witness w;
    w.kind_ = Kind::Branch;
    w.index_ = index;
    w.children_.push_back(std::move(inner));
    return w;
}

std::optional<GroupPoint> Witness::revealed_key() const
{
    switch (kind_) {
    case Kind::KeySig: return pk_;
    case Kind::HashPreimage:
    case Kind::Branch: return children_.empty() ? std::nullopt : children_[0].revealed_key();
    case Kind::Empty: return std::nullopt;
    }
    return std::nullopt;
}

// ---- digests ----

Bytes serialize_stripped(const Transaction& tx)
{
    ByteWriter w;
    w.str(kTxMagic).u8(static_cast<std::uint8_t>(kFormatVersion));
    w.varint(tx.inputs.size());
    for (const auto& in : tx.inputs) w.raw(in.outpoint.txid).u32(in.outpoint.vout).u8(kEmptyWitness);
    w.varint(tx.outputs.size());
    for (const auto& out : tx.outputs) {
        w.u64(out.amount);
        out.cond.serialize(w);
    }
    return std::move(w).bytes();
}

Hash256 txid(const Transaction& tx)
{
    return crypto::sha256(serialize_stripped(tx));
}

Hash256 sighash(const Transaction& tx)
{
    return crypto::tagged_sha256(kSighashTag, serialize_stripped(tx));
}

Witness sign_input(const crypto::KeyPair& key, const Transaction& tx)
{
    return Witness::key_sig(key.pk, crypto::sig_gen(key, sighash(tx)));
}

bool check_condition(const SpendCondition& cond, const Witness& witness, const Hash256& msg, std::uint64_t height)
{
    using K = SpendCondition::Kind;
    switch (cond.kind()) {
    case K::P2PKH:
        if (witness.kind() != Witness::Kind::KeySig || witness.key().is_identity()) return false;
        return crypto::hash_160(witness.key()) == cond.address() && crypto::sig_ver(witness.key(), msg, witness.signature());
    case K::P2PK:
        if (witness.kind() != Witness::Kind::KeySig) return false;
        return witness.key() == cond.key() && crypto::sig_ver(witness.key(), msg, witness.signature());
    case K::HashLock:
        if (witness.kind() != Witness::Kind::HashPreimage) return false;
        if (crypto::hash_p(witness.preimage()) != cond.digest()) return false;
        return check_condition(cond.inner(), witness.inner(), msg, height);
    case K::TimeLocked:
        return height >= cond.lock_height() && check_condition(cond.inner(), witness, msg, height);
    case K::AnyOf:
        if (witness.kind() != Witness::Kind::Branch || witness.branch_index() >= cond.branches().size()) return false;
        return check_condition(cond.branches()[witness.branch_index()], witness.inner(), msg, height);
    }
    return false;
}

// ---- LedgerState ----

std::optional<Utxo> LedgerState::find(const OutPoint& op) const
{
    auto it = utxos_.find(op);
    if (it == utxos_.end()) return std::nullopt;
    return it->second;
}

const Transaction* LedgerState::transaction(const Hash256& id) const
{
    auto it = txs_.find(id);
    return it == txs_.end() ? nullptr : &it->second;
}

const Transaction* LedgerState::spender(const OutPoint& op) const
{
    auto it = spent_by_.find(op);
    return it == spent_by_.end() ? nullptr : transaction(it->second);
}

Amount LedgerState::total_value() const
{
    Amount total = 0;
    for (const auto& [op, u] : utxos_) total += u.amount;
    return total;
}

Hash256 mint_txid(Amount amount, const SpendCondition& cond, const std::string& label)
{
    ByteWriter w;
    w.u64(amount);
    cond.serialize(w);
    w.str(label);
    return crypto::tagged_sha256(kMintTag, w.bytes());
}

std::pair<LedgerState, OutPoint> mint(const LedgerState& state, Amount amount, const SpendCondition& cond,
                                      const std::string& label)
{
    if (!cond.well_formed()) throw Error(Errc::Malformed, "mint condition is malformed");
    OutPoint op{mint_txid(amount, cond, label), 0};
    if (std::find(state.log_.begin(), state.log_.end(), op.txid) != state.log_.end()) return {state, op};
    LedgerState next = state;
    next.utxos_.emplace(op, Utxo{amount, cond});
    next.log_.push_back(op.txid);
    next.mints_.push_back(Mint{op.txid, amount, cond, label});
    return {std::move(next), op};
}

Amount fee(const LedgerState& state, const Transaction& tx)
{
    Amount in = 0;
    Amount out = 0;
    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        auto u = state.find(tx.inputs[i].outpoint);
        if (!u) throw Error(Errc::MissingUtxo, "input spends an unknown outpoint", i);
        if (add_overflows(in, u->amount, in)) throw Error(Errc::ValueOverflow, "input total overflows");
    }
    for (const auto& o : tx.outputs) {
        if (add_overflows(out, o.amount, out)) throw Error(Errc::ValueOverflow, "output total overflows");
    }
    if (out > in) throw Error(Errc::NegativeFee, "outputs exceed inputs");
    return in - out;
}

LedgerState apply_transaction(const LedgerState& state, const Transaction& tx)
{
    if (tx.inputs.empty() || tx.outputs.empty()) throw Error(Errc::Malformed, "transaction needs inputs and outputs");
    std::set<OutPoint> seen;
    for (const auto& in : tx.inputs) {
        if (!seen.insert(in.outpoint).second) throw Error(Errc::Malformed, "duplicate outpoint");
    }
    for (const auto& out : tx.outputs) {
        if (!out.cond.well_formed()) throw Error(Errc::Malformed, "output condition is malformed");
    }

    fee(state, tx); // MissingUtxo / ValueOverflow / NegativeFee

    const Hash256 msg = sighash(tx);
    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        const auto& utxo = state.utxos_.at(tx.inputs[i].outpoint);
        if (!check_condition(utxo.cond, tx.inputs[i].witness, msg, state.height_)) {
            throw Error(Errc::BadWitness, "input " + std::to_string(i) + " does not satisfy its condition", i);
        }
    }

    const Hash256 id = txid(tx);
    LedgerState next = state;
    for (const auto& in : tx.inputs) {
        next.utxos_.erase(in.outpoint);
        next.spent_by_[in.outpoint] = id;
    }
    for (std::uint32_t i = 0; i < tx.outputs.size(); ++i) {
        next.utxos_[OutPoint{id, i}] = Utxo{tx.outputs[i].amount, tx.outputs[i].cond};
    }
    next.log_.push_back(id);
    next.txs_[id] = tx;
    return next;
}

LedgerState advance_height(const LedgerState& state, std::uint64_t n)
{
    LedgerState next = state;
    next.height_ += n;
    return next;
}

// ---- JSON ----

json to_json(const SpendCondition& cond)
{
    using K = SpendCondition::Kind;
    switch (cond.kind()) {
    case K::P2PKH: return {{"type", "p2pkh"}, {"addr", cond.address().to_hex()}};
    case K::P2PK: return {{"type", "p2pk"}, {"pk", cond.key().to_hex()}};
    case K::HashLock: return {{"type", "hashlock"}, {"h", cond.digest().to_hex()}, {"inner", to_json(cond.inner())}};
    case K::TimeLocked:
        return {{"type", "timelocked"}, {"height", cond.lock_height()}, {"inner", to_json(cond.inner())}};
    case K::AnyOf: {
        json branches = json::array();
        for (const auto& b : cond.branches()) branches.push_back(to_json(b));
        return {{"type", "anyof"}, {"branches", branches}};
    }
    }
    return {};
}

json to_json(const Witness& witness)
{
    using K = Witness::Kind;
    switch (witness.kind()) {
    case K::Empty: return {{"type", "empty"}};
    case K::KeySig: return {{"type", "keysig"}, {"pk", witness.key().to_hex()}, {"sig", witness.signature().to_hex()}};
    case K::HashPreimage:
        return {{"type", "preimage"}, {"preimage", to_hex(witness.preimage())}, {"inner", to_json(witness.inner())}};
    case K::Branch: return {{"type", "branch"}, {"index", witness.branch_index()}, {"inner", to_json(witness.inner())}};
    }
    return {};
}

json to_json(const Transaction& tx)
{
    json inputs = json::array();
    for (const auto& in : tx.inputs) {
        inputs.push_back({{"txid", to_hex(in.outpoint.txid)}, {"vout", in.outpoint.vout}, {"witness", to_json(in.witness)}});
    }
    json outputs = json::array();
    for (const auto& out : tx.outputs) outputs.push_back({{"amount", out.amount}, {"cond", to_json(out.cond)}});
    return {{"v", kFormatVersion}, {"txid", to_hex(txid(tx))}, {"inputs", inputs}, {"outputs", outputs}};
}

namespace {

using jsonf::field;
using jsonf::str_field;
using jsonf::uint_field;

void check_version(const json& j)
{
    if (uint_field(j, "v") != static_cast<std::uint64_t>(kFormatVersion)) {
        throw Error(Errc::Decode, "unsupported format version");
    }
}

} // namespace

SpendCondition condition_from_json(const json& j)
{
    auto type = str_field(j, "type");
    if (type == "p2pkh") return SpendCondition::p2pkh(Address::from_hex(str_field(j, "addr")));
    if (type == "p2pk") return SpendCondition::p2pk(GroupPoint::from_hex(str_field(j, "pk")));
    if (type == "hashlock") {
        return SpendCondition::hash_lock(Scalar::from_hex(str_field(j, "h")), condition_from_json(field(j, "inner")));
    }
    if (type == "timelocked") {
        return SpendCondition::time_locked(condition_from_json(field(j, "inner")), uint_field(j, "height"));
    }
    if (type == "anyof") {
        std::vector<SpendCondition> branches;
        for (const auto& b : field(j, "branches")) branches.push_back(condition_from_json(b));
        return SpendCondition::any_of(std::move(branches));
    }
    throw Error(Errc::Decode, "unknown condition type '" + type + "'");
}

Witness witness_from_json(const json& j)
{
    auto type = str_field(j, "type");
    if (type == "empty") return {};
    if (type == "keysig") {
        return Witness::key_sig(GroupPoint::from_hex(str_field(j, "pk")), Signature::from_hex(str_field(j, "sig")));
    }
    if (type == "preimage") return Witness::hash_preimage(from_hex(str_field(j, "preimage")), witness_from_json(field(j, "inner")));
    if (type == "branch") return Witness::branch(uint_field(j, "index"), witness_from_json(field(j, "inner")));
    throw Error(Errc::Decode, "unknown witness type '" + type + "'");
}

Transaction transaction_from_json(const json& j)
{
    check_version(j);
    Transaction tx;
    for (const auto& in : field(j, "inputs")) {
        auto vout = uint_field(in, "vout");
        if (vout > 0xffffffffULL) throw Error(Errc::Decode, "vout out of range");
        tx.inputs.push_back({OutPoint{array_from_hex<32>(str_field(in, "txid")), static_cast<std::uint32_t>(vout)},
                             witness_from_json(field(in, "witness"))});
    }
    for (const auto& out : field(j, "outputs")) {
        tx.outputs.push_back({uint_field(out, "amount"), condition_from_json(field(out, "cond"))});
    }
    if (j.contains("txid") && str_field(j, "txid") != to_hex(txid(tx))) {
        throw Error(Errc::Decode, "txid field does not match transaction contents");
    }
    return tx;
}

json to_json(const LedgerState& state)
{
    json mints = json::array();
    for (const auto& m : state.mints()) {
        mints.push_back({{"txid", to_hex(m.txid)}, {"amount", m.amount}, {"cond", to_json(m.cond)}, {"label", m.label}});
    }
    json txs = json::array();
    json log = json::array();
    for (const auto& id : state.log()) {
        log.push_back(to_hex(id));
        if (const auto* tx = state.transaction(id)) txs.push_back(to_json(*tx));
    }
    json utxos = json::array();
    for (const auto& [op, u] : state.utxos()) {
        utxos.push_back({{"txid", to_hex(op.txid)}, {"vout", op.vout}, {"amount", u.amount}, {"cond", to_json(u.cond)}});
    }
    return {{"v", kFormatVersion}, {"height", state.height()}, {"mints", mints},
            {"transactions", txs}, {"log", log}, {"utxos", utxos}};
}

LedgerState ledger_from_json(const json& j)
{
    check_version(j);
    LedgerState s;
    s.height_ = uint_field(j, "height");
    for (const auto& m : field(j, "mints")) {
        Mint rec{array_from_hex<32>(str_field(m, "txid")), uint_field(m, "amount"), condition_from_json(field(m, "cond")),
                 str_field(m, "label")};
        if (rec.txid != mint_txid(rec.amount, rec.cond, rec.label)) throw Error(Errc::Decode, "mint txid mismatch");
        s.mints_.push_back(std::move(rec));
    }
    for (const auto& t : field(j, "transactions")) {
        Transaction tx = transaction_from_json(t);
        Hash256 id = txid(tx);
        for (const auto& in : tx.inputs) s.spent_by_[in.outpoint] = id;
        s.txs_[id] = std::move(tx);
    }
    for (const auto& id : field(j, "log")) {
        if (!id.is_string()) throw Error(Errc::Decode, "log entries must be strings");
        s.log_.push_back(array_from_hex<32>(id.get<std::string>()));
    }
    for (const auto& u : field(j, "utxos")) {
        auto vout = uint_field(u, "vout");
        if (vout > 0xffffffffULL) throw Error(Errc::Decode, "vout out of range");
        OutPoint op{array_from_hex<32>(str_field(u, "txid")), static_cast<std::uint32_t>(vout)};
        s.utxos_[op] = Utxo{uint_field(u, "amount"), condition_from_json(field(u, "cond"))};
    }
    return s;
}

std::string render(const SpendCondition& cond)
{
    using K = SpendCondition::Kind;
    switch (cond.kind()) {
    case K::P2PKH: return "addr:" + cond.address().to_hex();
    case K::P2PK: return "pk:" + cond.key().to_hex();
    case K::HashLock: return render(cond.inner()) + " + hashlock(" + cond.digest().to_hex().substr(0, 16) + "..)";
    case K::TimeLocked: return render(cond.inner()) + " + t" + std::to_string(cond.lock_height());
    case K::AnyOf: {
        std::string out = "(";
        for (std::size_t i = 0; i < cond.branches().size(); ++i) {
            if (i) out += " OR ";
            out += render(cond.branches()[i]);
        }
        return out + ")";
    }
    }
    return {};
}

std::string render(const LedgerState& state)
{
    std::ostringstream os;
    os << "height " << state.height() << ", " << state.log().size() << " accepted, " << state.utxos().size()
       << " unspent, total " << state.total_value() << " sat\n";
    for (const auto& id : state.log()) {
        const auto* tx = state.transaction(id);
        os << "  tx " << to_hex(id).substr(0, 16) << "..";
        if (!tx) {
            os << " (mint)\n";
            continue;
        }
        os << " " << tx->inputs.size() << " in / " << tx->outputs.size() << " out\n";
        for (const auto& in : tx->inputs) {
            os << "    <- " << to_hex(in.outpoint.txid).substr(0, 16) << ".., " << display_index(in.outpoint.vout) << "\n";
        }
    }
    os << "unspent:\n";
    for (const auto& [op, u] : state.utxos()) {
        os << "  " << to_hex(op.txid).substr(0, 16) << ".., " << display_index(op.vout) << "  " << u.amount << " sat  "
           << render(u.cond) << "\n";
    }
    return os.str();
}

} // namespace randlock::ledger
