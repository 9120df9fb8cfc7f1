// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/error.hpp>
#include <randlock/json_fields.hpp>
#include <randlock/statetrace.hpp>

#include <limits>
#include <set>

namespace randlock::trace {

using ledger::OutPoint;
using ledger::SpendCondition;
using ledger::Transaction;
using ledger::Witness;
using nlohmann::json;

namespace {

constexpr std::size_t kMaxArity = 9;

std::size_t index_in_layer(std::string_view path, std::size_t k)
{
    std::size_t idx = 0;
    for (char c : path) idx = idx * k + static_cast<std::size_t>(c - '1');
    return idx;
}

std::string path_of(std::size_t idx, std::size_t layer, std::size_t k)
{
    std::string p(layer, '1');
    for (std::size_t i = layer; i-- > 0;) {
        p[i] = static_cast<char>('1' + idx % k);
        idx /= k;
    }
    return p;
}

Scalar state_lock_of(const Scalar& s)
{
    auto b = s.to_bytes();
    return crypto::hash_p(ByteView(b));
}

SpendCondition layer_condition_from(const std::vector<Address>& addrs, std::size_t layer,
                                    const std::optional<Scalar>& lock)
{
    if (layer == 0) {
        auto base = SpendCondition::p2pkh(addrs.at(0));
        return lock ? SpendCondition::hash_lock(*lock, base) : base;
    }
    std::vector<SpendCondition> branches;
    branches.reserve(addrs.size());
    for (const auto& a : addrs) branches.push_back(SpendCondition::p2pkh(a));
    return SpendCondition::any_of(std::move(branches));
}

} // namespace

// ---- tree ----

const TraceNode& TraceTree::node(std::string_view path) const
{
    if (path.size() >= layers_.size()) throw Error(Errc::WrongBranch, "path longer than the tree");
    for (char c : path) {
        if (c < '1' || static_cast<std::size_t>(c - '1') >= arity()) throw Error(Errc::WrongBranch, "bad path digit");
    }
    return layers_[path.size()][index_in_layer(path, arity())];
}

std::size_t TraceTree::node_count() const
{
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.size();
    return n;
}

std::vector<std::vector<Address>> TraceTree::addresses() const
{
    std::vector<std::vector<Address>> out;
    for (const auto& l : layers_) {
        auto& row = out.emplace_back();
        for (const auto& n : l) row.push_back(n.address);
    }
    return out;
}

TraceTree build_tree(const GroupPoint& P_a, const Scalar& s, const std::vector<TransitionFn>& fns, std::size_t depth)
{
    if (depth < 1 || depth > kMaxDepth) throw Error(Errc::DepthLimit, "depth must be in [1, 8]");
    const std::size_t k = fns.size();
    if (k < 2 || k > kMaxArity) throw Error(Errc::BadConfig, "need between 2 and 9 transition functions");
    std::size_t leaves = 1;
    for (std::size_t i = 0; i < depth; ++i) {
        leaves *= k;
        if (leaves > kMaxLeaves) throw Error(Errc::DepthLimit, "tree would exceed 4096 leaves");
    }
    if (P_a.is_identity()) throw Error(Errc::IdentityPoint, "P_a is the identity");

    auto make = [&](std::string path, const Scalar& state, const Scalar& offset) {
        TraceNode n{std::move(path), P_a + GroupPoint::base_mul(offset), {}, state, offset};
        if (n.point.is_identity()) throw Error(Errc::DegenerateState, "node point is the identity");
        n.address = crypto::hash_160(n.point);
        return n;
    };

    TraceTree t;
    t.P_a_ = P_a;
    t.fns_ = fns;
    t.layers_.push_back({make("", s, s)});
    for (std::size_t l = 0; l < depth; ++l) {
        std::vector<TraceNode> next;
        next.reserve(t.layers_[l].size() * k);
        for (const auto& parent : t.layers_[l]) {
            const Scalar link = crypto::hash_p(parent.point);
            std::set<ByteArray<33>> siblings;
            for (std::size_t j = 0; j < k; ++j) {
                Scalar state = fns[j](parent.state);
                auto child = make(parent.path + static_cast<char>('1' + j), state, link + state);
                if (!siblings.insert(child.point.compress()).second) {
                    throw Error(Errc::DegenerateState, "siblings under '" + display_path(parent.path) + "' collide");
                }
                next.push_back(std::move(child));
            }
        }
        t.layers_.push_back(std::move(next));
    }
    return t;
}

std::string parse_path(std::string_view text, std::size_t arity)
{
    if (text == "0") return {};
    std::string out;
    for (char c : text) {
        if (c == ',' || c == ' ') continue;
        if (c < '1' || static_cast<std::size_t>(c - '1') >= arity) {
            throw Error(Errc::WrongBranch, "path step '" + std::string(1, c) + "' is not a transition id");
        }
        out.push_back(c);
    }
    return out;
}

std::string display_path(std::string_view path)
{
    return path.empty() ? "0" : std::string(path);
}

// ---- transaction ----

SpendCondition layer_condition(const TraceTree& tree, std::size_t layer, bool defer_state)
{
    std::vector<Address> addrs;
    for (const auto& n : tree.layer(layer)) addrs.push_back(n.address);
    std::optional<Scalar> lock;
    if (!defer_state) lock = state_lock_of(tree.s());
    return layer_condition_from(addrs, layer, lock);
}

TraceTx build_trace_tx(const TraceTree& tree, const OutPoint& funding_op, const ledger::Utxo& funding,
                       const crypto::KeyPair& funder, const TraceOptions& opts)
{
    const std::size_t outputs = tree.depth() + 1;
    if (opts.per_output == 0) throw Error(Errc::BadConfig, "per-output amount must be positive");
    if (funding.amount / outputs < opts.per_output) {
        throw Error(Errc::InsufficientFunds, "funding does not cover " + std::to_string(outputs) + " outputs");
    }
    TraceTx out;
    out.defer_state = opts.defer_state;
    out.tx.inputs.push_back({funding_op, {}});
    for (std::size_t l = 0; l < outputs; ++l) {
        out.tx.outputs.push_back({opts.per_output, layer_condition(tree, l, opts.defer_state)});
    }
    out.tx.inputs[0].witness = ledger::sign_input(funder, out.tx);
    out.txid = ledger::txid(out.tx);
    return out;
}

ledger::LedgerState reveal_step(const TraceTree& tree, const Scalar& sk_a, std::string_view path, const TraceTx& ttx,
                                const ledger::LedgerState& state)
{
    const TraceNode& node = tree.node(path);
    const auto layer = static_cast<std::uint32_t>(path.size());
    if (!state.transaction(ttx.txid)) throw Error(Errc::MissingUtxo, "trace transaction is not on the ledger");

    const OutPoint op{ttx.txid, layer};
    if (state.spender(op)) throw Error(Errc::OutOfOrder, "layer " + std::to_string(layer) + " already revealed");
    if (layer > 0) {
        const Transaction* prev = state.spender(OutPoint{ttx.txid, layer - 1});
        if (!prev) throw Error(Errc::OutOfOrder, "layer " + std::to_string(layer - 1) + " not revealed yet");
        std::optional<GroupPoint> key;
        for (const auto& in : prev->inputs) {
            if (in.outpoint == OutPoint{ttx.txid, layer - 1}) key = in.witness.revealed_key();
        }
        if (!key || *key != tree.node(path.substr(0, layer - 1)).point) {
            throw Error(Errc::WrongBranch, "path " + display_path(path) + " does not extend the revealed trace");
        }
    }
    auto utxo = state.find(op);
    if (!utxo) throw Error(Errc::MissingUtxo, "trace output missing");

    auto kp = crypto::keypair_from_secret(sk_a + node.offset);
    if (kp.pk != node.point) throw Error(Errc::BadWitness, "secret key does not open this tree", 0);

    Transaction tx;
    tx.inputs.push_back({op, {}});
    tx.outputs.push_back({utxo->amount, SpendCondition::p2pkh(crypto::hash_160(tree.P_a()))});
    Witness w = ledger::sign_input(kp, tx);
    if (layer == 0) {
        if (!ttx.defer_state) {
            auto sb = tree.s().to_bytes();
            w = Witness::hash_preimage(Bytes(sb.begin(), sb.end()), w);
        }
    } else {
        w = Witness::branch(index_in_layer(path, tree.arity()), w);
    }
    tx.inputs[0].witness = std::move(w);
    return ledger::apply_transaction(state, tx);
}

// ---- public view ----

json PublicCommitments::to_json() const
{
    json fj = json::array();
    for (const auto& f : fns) fj.push_back(f.spec());
    json layers = json::array();
    for (std::size_t l = 0; l < points.size(); ++l) {
        json row = json::array();
        for (std::size_t i = 0; i < points[l].size(); ++i) {
            row.push_back({{"path", display_path(path_of(i, l, fns.size()))},
                           {"point", points[l][i].to_hex()},
                           {"addr", addrs[l][i].to_hex()}});
        }
        layers.push_back(row);
    }
    return {{"v", 1},
            {"P_a", P_a.to_hex()},
            {"fns", fj},
            {"layers", layers},
            {"state_lock", state_lock ? json(state_lock->to_hex()) : json(nullptr)}};
}

PublicCommitments PublicCommitments::from_json(const json& j)
{
    using namespace jsonf;
    if (uint_field(j, "v") != 1) throw Error(Errc::Decode, "unsupported commitments version");
    PublicCommitments pc;
    pc.P_a = GroupPoint::from_hex(str_field(j, "P_a"));
    for (const auto& f : array_field(j, "fns")) {
        if (!f.is_string()) throw Error(Errc::Decode, "transition specs must be strings");
        pc.fns.push_back(TransitionFn::parse(f.get<std::string>()));
    }
    for (const auto& row : array_field(j, "layers")) {
        if (!row.is_array()) throw Error(Errc::Decode, "layers must be arrays");
        const std::size_t l = pc.points.size();
        auto& pts = pc.points.emplace_back();
        auto& ads = pc.addrs.emplace_back();
        for (const auto& n : row) {
            if (str_field(n, "path") != display_path(path_of(pts.size(), l, pc.fns.size()))) {
                throw Error(Errc::Decode, "node path does not match its position");
            }
            pts.push_back(GroupPoint::from_hex(str_field(n, "point")));
            ads.push_back(Address::from_hex(str_field(n, "addr")));
        }
    }
    const auto& lock = field(j, "state_lock");
    if (!lock.is_null()) pc.state_lock = Scalar::from_hex(lock.get<std::string>());
    return pc;
}

PublicCommitments public_commitments(const TraceTree& tree, bool defer_state)
{
    PublicCommitments pc;
    pc.P_a = tree.P_a();
    pc.fns = tree.fns();
    for (std::size_t l = 0; l <= tree.depth(); ++l) {
        auto& pts = pc.points.emplace_back();
        auto& ads = pc.addrs.emplace_back();
        for (const auto& n : tree.layer(l)) {
            pts.push_back(n.point);
            ads.push_back(n.address);
        }
    }
    if (!defer_state) pc.state_lock = state_lock_of(tree.s());
    return pc;
}

json TraceTranscript::to_json() const
{
    json sp = json::array();
    for (const auto& t : spends) sp.push_back(ledger::to_json(t));
    return {{"v", 1}, {"trace_tx", ledger::to_json(trace_tx)}, {"spends", sp}};
}

TraceTranscript TraceTranscript::from_json(const json& j)
{
    using namespace jsonf;
    if (uint_field(j, "v") != 1) throw Error(Errc::Decode, "unsupported trace transcript version");
    TraceTranscript t;
    t.trace_tx = ledger::transaction_from_json(field(j, "trace_tx"));
    for (const auto& s : array_field(j, "spends")) t.spends.push_back(ledger::transaction_from_json(s));
    return t;
}

TraceTranscript collect_transcript(const TraceTx& ttx, const ledger::LedgerState& state)
{
    TraceTranscript t;
    t.trace_tx = ttx.tx;
    for (std::uint32_t l = 0; l < ttx.tx.outputs.size(); ++l) {
        const Transaction* s = state.spender(OutPoint{ttx.txid, l});
        if (!s) break;
        t.spends.push_back(*s);
    }
    return t;
}

namespace {

bool commitments_consistent(const PublicCommitments& pub)
{
    const std::size_t k = pub.fns.size();
    if (k < 2 || k > kMaxArity || pub.points.size() < 2 || pub.points.size() != pub.addrs.size()) return false;
    if (pub.P_a.is_identity()) return false;
    std::size_t width = 1;
    for (std::size_t l = 0; l < pub.points.size(); ++l) {
        if (pub.points[l].size() != width || pub.addrs[l].size() != width) return false;
        for (std::size_t i = 0; i < width; ++i) {
            if (pub.points[l][i].is_identity() || crypto::hash_160(pub.points[l][i]) != pub.addrs[l][i]) return false;
        }
        width *= k;
    }
    // State points S = state·G, tracked without knowing the state itself.
    std::vector<GroupPoint> S{pub.points[0][0] - pub.P_a};
    for (std::size_t l = 1; l < pub.points.size(); ++l) {
        std::vector<GroupPoint> next;
        next.reserve(S.size() * k);
        for (std::size_t p = 0; p < S.size(); ++p) {
            const GroupPoint link = GroupPoint::base_mul(crypto::hash_p(pub.points[l - 1][p]));
            for (std::size_t j = 0; j < k; ++j) {
                GroupPoint child_state = pub.fns[j].mul * S[p] + GroupPoint::base_mul(pub.fns[j].add);
                if (pub.points[l][p * k + j] != pub.P_a + link + child_state) return false;
                next.push_back(child_state);
            }
        }
        S = std::move(next);
    }
    return true;
}

} // namespace

bool verify_trace(const TraceTranscript& transcript, const PublicCommitments& pub)
{
    try {
        if (!commitments_consistent(pub)) return false;
        const std::size_t layers = pub.points.size();
        const std::size_t k = pub.fns.size();
        const auto& ttx = transcript.trace_tx;
        if (ttx.outputs.size() < layers || transcript.spends.size() > layers) return false;
        for (std::size_t l = 0; l < layers; ++l) {
            if (ttx.outputs[l].cond != layer_condition_from(pub.addrs[l], l, pub.state_lock)) return false;
        }
        // The funding inputs must carry valid signatures over the trace tx.
        const Hash256 ttx_msg = ledger::sighash(ttx);
        for (const auto& in : ttx.inputs) {
            const auto& w = in.witness;
            if (w.kind() != Witness::Kind::KeySig ||
                !ledger::check_condition(SpendCondition::p2pk(w.key()), w, ttx_msg, 0)) {
                return false;
            }
        }
        const Hash256 tid = ledger::txid(ttx);
        std::size_t prev_idx = 0;
        for (std::size_t l = 0; l < transcript.spends.size(); ++l) {
            const auto& spend = transcript.spends[l];
            const OutPoint op{tid, static_cast<std::uint32_t>(l)};
            const ledger::TxInput* in = nullptr;
            for (const auto& candidate : spend.inputs) {
                if (candidate.outpoint == op) in = &candidate;
            }
            if (!in) return false;
            if (!ledger::check_condition(ttx.outputs[l].cond, in->witness, ledger::sighash(spend),
                                         std::numeric_limits<std::uint64_t>::max())) {
                return false;
            }
            auto key = in->witness.revealed_key();
            if (l == 0) {
                if (!key || *key != pub.points[0][0]) return false;
                if (pub.state_lock) {
                    Scalar s = Scalar::from_bytes(in->witness.preimage());
                    if (pub.P_a + GroupPoint::base_mul(s) != pub.points[0][0]) return false;
                }
                continue;
            }
            if (in->witness.kind() != Witness::Kind::Branch) return false;
            const std::size_t idx = in->witness.branch_index();
            if (idx / k != prev_idx || !key || *key != pub.points[l][idx]) return false;
            prev_idx = idx;
        }
        return true;
    } catch (const Error&) {
        return false;
    }
}

} // namespace randlock::trace
