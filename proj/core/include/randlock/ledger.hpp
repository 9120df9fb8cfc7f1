// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/bytes.hpp>
#include <randlock/keys.hpp>

#include <nlohmann/json.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace randlock::ledger {

using crypto::Address;
using crypto::GroupPoint;
using crypto::Scalar;
using crypto::Signature;

using Amount = std::uint64_t;
inline constexpr Amount kCoin = 100'000'000;

/// Serialization version written into every JSON artifact.
inline constexpr int kFormatVersion = 1;

/// Reference to a transaction output. `vout` is 0-based; transcripts and the
/// CLI show it 1-based.
struct OutPoint {
    Hash256 txid{};
    std::uint32_t vout = 0;

    friend bool operator==(const OutPoint&, const OutPoint&) = default;
    friend auto operator<=>(const OutPoint&, const OutPoint&) = default;
};

inline std::uint32_t display_index(std::uint32_t vout) { return vout + 1; }

/// Locking condition of an output. A small closed tree:
/// P2PKH | P2PK | HashLock(h, inner) | TimeLocked(inner, height) | AnyOf(branches).
class SpendCondition {
public:
    enum class Kind { P2PKH, P2PK, HashLock, TimeLocked, AnyOf };

    static constexpr std::size_t kMaxDepth = 4;

    static SpendCondition p2pkh(const Address& addr);
    static SpendCondition p2pk(const GroupPoint& pk);
    static SpendCondition hash_lock(const Scalar& h, SpendCondition inner);
    static SpendCondition time_locked(SpendCondition inner, std::uint64_t height);
    static SpendCondition any_of(std::vector<SpendCondition> branches);

    Kind kind() const { return kind_; }
    const Address& address() const { return addr_; }
    const GroupPoint& key() const { return pk_; }
    const Scalar& digest() const { return h_; }
    std::uint64_t lock_height() const { return height_; }
    const SpendCondition& inner() const { return children_.at(0); }
    const std::vector<SpendCondition>& branches() const { return children_; }

    std::size_t depth() const;
    /// AnyOf has >= 2 branches everywhere and depth <= kMaxDepth.
    bool well_formed() const;

    void serialize(ByteWriter& w) const;

    friend bool operator==(const SpendCondition&, const SpendCondition&) = default;

private:
    SpendCondition() = default;

    Kind kind_ = Kind::P2PKH;
    Address addr_;
    GroupPoint pk_;
    Scalar h_;
    std::uint64_t height_ = 0;
    std::vector<SpendCondition> children_;
};

/// Spending proof for an input; mirrors the condition it satisfies.
class Witness {
public:
    enum class Kind { Empty, KeySig, HashPreimage, Branch };

    Witness() = default; ///< Empty

    static Witness key_sig(const GroupPoint& pk, const Signature& sig);
    static Witness hash_preimage(Bytes preimage, Witness inner);
    static Witness branch(std::size_t index, Witness inner);

    Kind kind() const { return kind_; }
    const GroupPoint& key() const { return pk_; }
    const Signature& signature() const { return sig_; }
    const Bytes& preimage() const { return preimage_; }
    std::size_t branch_index() const { return index_; }
    const Witness& inner() const { return children_.at(0); }

    /// First KeySig found walking through Branch/HashPreimage wrappers.
    std::optional<GroupPoint> revealed_key() const;

    friend bool operator==(const Witness&, const Witness&) = default;

private:
    Kind kind_ = Kind::Empty;
    GroupPoint pk_;
    Signature sig_;
    Bytes preimage_;
    std::size_t index_ = 0;
    std::vector<Witness> children_;
};

struct TxInput {
    OutPoint outpoint;
    Witness witness;

    friend bool operator==(const TxInput&, const TxInput&) = default;
};

struct TxOutput {
    Amount amount = 0;
    SpendCondition cond = SpendCondition::p2pkh({});

    friend bool operator==(const TxOutput&, const TxOutput&) = default;
};

struct Transaction {
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Canonical binary encoding with every witness replaced by the empty marker.
Bytes serialize_stripped(const Transaction& tx);

/// SHA256 of the witness-stripped encoding.
Hash256 txid(const Transaction& tx);
/// Message signed by every input: tagged digest over outpoints and outputs,
/// witnesses excluded.
Hash256 sighash(const Transaction& tx);

/// KeySig witness signing the transaction's sighash with `key`.
Witness sign_input(const crypto::KeyPair& key, const Transaction& tx);

/// Evaluates `cond` against `witness` for signature message `msg` at `height`.
/// Never throws; every failure is `false`.
bool check_condition(const SpendCondition& cond, const Witness& witness, const Hash256& msg, std::uint64_t height);

struct Utxo {
    Amount amount = 0;
    SpendCondition cond = SpendCondition::p2pkh({});

    friend bool operator==(const Utxo&, const Utxo&) = default;
};

/// Funding created out of thin air: the ledger's genesis outputs.
struct Mint {
    Hash256 txid{};
    Amount amount = 0;
    SpendCondition cond = SpendCondition::p2pkh({});
    std::string label;

    friend bool operator==(const Mint&, const Mint&) = default;
};

/// Value-semantic UTXO set with a block-height clock and an append-only log.
class LedgerState {
public:
    const std::map<OutPoint, Utxo>& utxos() const { return utxos_; }
    std::uint64_t height() const { return height_; }
    const std::vector<Hash256>& log() const { return log_; }
    const std::vector<Mint>& mints() const { return mints_; }

    std::optional<Utxo> find(const OutPoint& op) const;
    const Transaction* transaction(const Hash256& id) const;
    /// Accepted transaction that spent `op`, if any.
    const Transaction* spender(const OutPoint& op) const;
    Amount total_value() const;

    friend bool operator==(const LedgerState&, const LedgerState&) = default;

private:
    friend LedgerState apply_transaction(const LedgerState&, const Transaction&);
    friend LedgerState advance_height(const LedgerState&, std::uint64_t);
    friend std::pair<LedgerState, OutPoint> mint(const LedgerState&, Amount, const SpendCondition&, const std::string&);
    friend LedgerState ledger_from_json(const nlohmann::json&);

    std::map<OutPoint, Utxo> utxos_;
    std::uint64_t height_ = 0;
    std::vector<Hash256> log_;
    std::vector<Mint> mints_;
    std::map<Hash256, Transaction> txs_;
    std::map<OutPoint, Hash256> spent_by_;
};

/// Txid assigned to a mint of (amount, cond, label); deterministic so that two
/// replicas minting the same funding agree.
Hash256 mint_txid(Amount amount, const SpendCondition& cond, const std::string& label);

/// Adds a single-output genesis record. Minting an already-present record is
/// a no-op returning the existing outpoint.
std::pair<LedgerState, OutPoint> mint(const LedgerState& state, Amount amount, const SpendCondition& cond,
                                      const std::string& label);

/// All-or-nothing acceptance. Throws Error with MissingUtxo, BadWitness
/// (index = input), ValueOverflow, NegativeFee, or Malformed.
LedgerState apply_transaction(const LedgerState& state, const Transaction& tx);

LedgerState advance_height(const LedgerState& state, std::uint64_t n);

/// Fee the transaction would pay against `state` (inputs minus outputs).
Amount fee(const LedgerState& state, const Transaction& tx);

// ---- canonical JSON ----

nlohmann::json to_json(const SpendCondition& cond);
nlohmann::json to_json(const Witness& witness);
nlohmann::json to_json(const Transaction& tx);
nlohmann::json to_json(const LedgerState& state);

SpendCondition condition_from_json(const nlohmann::json& j);
Witness witness_from_json(const nlohmann::json& j);
/// Rejects a `txid` field that does not match the parsed transaction.
Transaction transaction_from_json(const nlohmann::json& j);
LedgerState ledger_from_json(const nlohmann::json& j);

/// Human-readable rendering used by `randlock ledger inspect`.
std::string render(const LedgerState& state);
std::string render(const SpendCondition& cond);

} // namespace randlock::ledger
