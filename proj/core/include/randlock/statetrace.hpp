// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/keys.hpp>
#include <randlock/ledger.hpp>
#include <randlock/transition.hpp>

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace randlock::trace {

using crypto::Address;
using crypto::GroupPoint;

inline constexpr std::size_t kMaxDepth = 8;
inline constexpr std::size_t kMaxLeaves = 4096;

/// Paths are strings over '1'..'k'; the root has the empty path (printed "0").
struct TraceNode {
    std::string path;
    GroupPoint point;
    Address address;
    /// Secret: state reached at this node.
    Scalar state;
    /// Secret: point = P_a + offset·G.
    Scalar offset;
};

class TraceTree {
public:
    std::size_t depth() const { return layers_.size() - 1; }
    std::size_t arity() const { return fns_.size(); }
    const GroupPoint& P_a() const { return P_a_; }
    const std::vector<TransitionFn>& fns() const { return fns_; }
    const Scalar& s() const { return layers_[0][0].state; }

    const std::vector<TraceNode>& layer(std::size_t l) const { return layers_.at(l); }
    const TraceNode& root() const { return layers_[0][0]; }
    /// Throws Error(WrongBranch) for a path that is not in the tree.
    const TraceNode& node(std::string_view path) const;
    std::size_t node_count() const;

    std::vector<std::vector<Address>> addresses() const;

private:
    friend TraceTree build_tree(const GroupPoint&, const Scalar&, const std::vector<TransitionFn>&, std::size_t);
    GroupPoint P_a_;
    std::vector<TransitionFn> fns_;
    std::vector<std::vector<TraceNode>> layers_;
};

/// Errors: DepthLimit, DegenerateState (two siblings at the same point), BadConfig.
TraceTree build_tree(const GroupPoint& P_a, const Scalar& s, const std::vector<TransitionFn>& fns, std::size_t depth);

/// Human path "1,2,1" (or "121") to the internal form.
std::string parse_path(std::string_view text, std::size_t arity);
std::string display_path(std::string_view path);

struct TraceOptions {
    ledger::Amount per_output = ledger::kCoin;
    /// Plain P2PKH at layer 0 instead of the hashlock, keeping s hidden.
    bool defer_state = false;
};

struct TraceTx {
    ledger::Transaction tx;
    Hash256 txid{};
    bool defer_state = false;
};

ledger::SpendCondition layer_condition(const TraceTree& tree, std::size_t layer, bool defer_state);

/// Spends `funding` (owned by `funder`) into depth+1 layered outputs; any
/// excess over the outputs is left as fee. Throws InsufficientFunds.
TraceTx build_trace_tx(const TraceTree& tree, const ledger::OutPoint& funding_op, const ledger::Utxo& funding,
                       const crypto::KeyPair& funder, const TraceOptions& opts = {});

/// Spends the output of layer |path| through the branch for `path`, paying
/// to hash_160(P_a). Errors: OutOfOrder, WrongBranch.
ledger::LedgerState reveal_step(const TraceTree& tree, const Scalar& sk_a, std::string_view path,
                                const TraceTx& ttx, const ledger::LedgerState& state);

/// What an outside verifier sees: node points and addresses, no state.
struct PublicCommitments {
    GroupPoint P_a;
    std::vector<TransitionFn> fns;
    std::vector<std::vector<GroupPoint>> points;
    std::vector<std::vector<Address>> addrs;
    std::optional<Scalar> state_lock;

    nlohmann::json to_json() const;
    static PublicCommitments from_json(const nlohmann::json& j);
};

PublicCommitments public_commitments(const TraceTree& tree, bool defer_state);

struct TraceTranscript {
    ledger::Transaction trace_tx;
    std::vector<ledger::Transaction> spends;

    nlohmann::json to_json() const;
    static TraceTranscript from_json(const nlohmann::json& j);
};

/// Collects the trace tx and its layer spends, in layer order, from a ledger.
TraceTranscript collect_transcript(const TraceTx& ttx, const ledger::LedgerState& state);

/// Checks the commitments chain-bind to P_a without knowing s, the trace tx
/// matches them, and every spend uses the committed point for a path that
/// extends the previous one. When layer 0 opens s, also checks P_0 = P_a + sG.
bool verify_trace(const TraceTranscript& transcript, const PublicCommitments& pub);

} // namespace randlock::trace
