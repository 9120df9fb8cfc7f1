// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cli.hpp"

#include <randlock/statetrace.hpp>

#include <iostream>
#include <memory>

namespace randlock::cli {

using nlohmann::json;
using namespace protocol;
using crypto::hash_160;
using crypto::keygen;

namespace {

// ---- ledger ----

int run_inspect(const std::string& path, const std::string& party, bool as_json)
{
    json j = read_json(path);
    LedgerState state;
    if (j.contains("events")) {
        auto t = Transcript::from_json(j);
        if (party.empty()) {
            state = merge_ledger(t.initial, t.events);
        } else {
            std::vector<json> mine;
            for (const auto& e : t.events) {
                if (e.value("kind", "") == "ledger" && e.value("party", "") == party) mine.push_back(e);
            }
            state = merge_ledger(t.initial, mine);
        }
    } else {
        if (!party.empty()) throw UsageError("--party needs a transcript");
        state = ledger::ledger_from_json(j.contains("ledger") ? j["ledger"] : j);
    }
    if (as_json) {
        std::cout << ledger::to_json(state).dump(2) << "\n";
    } else {
        std::cout << ledger::render(state);
    }
    return kOk;
}

// ---- trace ----

struct TraceParams {
    std::string seed = "randlock";
    std::size_t depth = 3;
    std::string state;
    std::string f1 = "inc";
    std::string f2 = "dbl";
    bool defer_state = false;
};

struct TraceSetup {
    crypto::KeyPair alice;
    trace::TraceTree tree;
    trace::TraceTx ttx;
};

trace::Scalar initial_state(const TraceParams& p)
{
    if (p.state.empty()) return crypto::hash_p(as_bytes(p.seed + "/trace/state"));
    std::uint64_t v = 0;
    try {
        std::size_t used = 0;
        v = std::stoull(p.state, &used);
        if (used != p.state.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
        return trace::Scalar::from_hex(p.state);
    }
    return trace::Scalar::from_u64(v);
}

// Keys and funding are derived from the seed, so `spend` can rebuild the
// tree from the saved parameters.
TraceSetup setup_trace(const TraceParams& p, ledger::LedgerState* fresh)
{
    auto alice = keygen(p.seed + "/trace");
    auto funder = keygen(p.seed + "/trace/funding");
    std::vector<trace::TransitionFn> fns{trace::TransitionFn::parse(p.f1), trace::TransitionFn::parse(p.f2)};
    auto tree = trace::build_tree(alice.pk, initial_state(p), fns, p.depth);
    auto cond = ledger::SpendCondition::p2pkh(hash_160(funder.pk));
    auto [st, op] = ledger::mint({}, (p.depth + 1) * ledger::kCoin, cond, "trace-funding/" + p.seed);
    auto ttx = trace::build_trace_tx(tree, op, *st.find(op), funder, {ledger::kCoin, p.defer_state});
    if (fresh) *fresh = ledger::apply_transaction(st, ttx.tx);
    return {alice, std::move(tree), std::move(ttx)};
}

json params_json(const TraceParams& p)
{
    return {{"seed", p.seed}, {"depth", p.depth}, {"state", p.state}, {"f1", p.f1}, {"f2", p.f2},
            {"defer_state", p.defer_state}};
}

TraceParams params_from(const json& j)
{
    TraceParams p;
    p.seed = j.at("seed").get<std::string>();
    p.depth = j.at("depth").get<std::size_t>();
    p.state = j.at("state").get<std::string>();
    p.f1 = j.at("f1").get<std::string>();
    p.f2 = j.at("f2").get<std::string>();
    p.defer_state = j.at("defer_state").get<bool>();
    return p;
}

int run_trace_build(const TraceParams& p, const std::string& out, const std::string& pub_out)
{
    LedgerState state;
    auto s = setup_trace(p, &state);
    // The private file keeps the parameters, not s itself; s is re-derived.
    write_json(out, {{"kind", "trace-state"}, {"params", params_json(p)}, {"ledger", ledger::to_json(state)}});
    if (!pub_out.empty()) write_json(pub_out, trace::public_commitments(s.tree, p.defer_state).to_json());
    std::cout << "trace tree: depth " << s.tree.depth() << ", " << s.tree.node_count() << " nodes\n"
              << "trace tx " << to_hex(s.ttx.txid) << " with " << s.ttx.tx.outputs.size() << " layer outputs\n"
              << "layer 0 " << (p.defer_state ? "is plain P2PKH (state stays hidden)" : "hashlocks the state") << "\n";
    return kOk;
}

int run_trace_spend(const std::string& file, const std::string& path_text, const std::string& transcript)
{
    json j = read_json(file);
    if (j.value("kind", "") != "trace-state") throw UsageError(file + " is not a trace state file");
    auto p = params_from(j.at("params"));
    auto s = setup_trace(p, nullptr);
    auto state = ledger::ledger_from_json(j.at("ledger"));
    const auto path = trace::parse_path(path_text, s.tree.arity());
    if (path.size() > s.tree.depth()) throw Error(Errc::WrongBranch, "path is deeper than the tree");
    // Layers already spent pin the walk; a new path must agree with them.
    const std::string walked = j.value("walked", "");
    const bool started = j.contains("walked");
    const auto& longer = walked.size() > path.size() ? walked : path;
    const auto& shorter = walked.size() > path.size() ? path : walked;
    if (started && longer.compare(0, shorter.size(), shorter) != 0) {
        throw Error(Errc::WrongBranch, "layers already spent along " + trace::display_path(walked));
    }

    for (std::size_t l = 0; l <= path.size(); ++l) {
        const ledger::OutPoint layer{s.ttx.txid, static_cast<std::uint32_t>(l)};
        if (state.spender(layer)) continue;
        state = trace::reveal_step(s.tree, s.alice.sk, path.substr(0, l), s.ttx, state);
        std::cout << "spent layer " << l << " via path " << trace::display_path(path.substr(0, l)) << "\n";
    }
    if (!started || path.size() > walked.size()) j["walked"] = path;
    j["ledger"] = ledger::to_json(state);
    write_json(file, j);
    if (!transcript.empty()) write_json(transcript, trace::collect_transcript(s.ttx, state).to_json());
    return kOk;
}

int run_trace_verify(const std::string& pub_path, const std::string& transcript_path)
{
    bool ok = false;
    try {
        auto pub = trace::PublicCommitments::from_json(read_json(pub_path));
        auto t = trace::TraceTranscript::from_json(read_json(transcript_path));
        ok = trace::verify_trace(t, pub);
    } catch (const Error& e) {
        std::cout << "unreadable input: " << e.what() << "\n";
    }
    std::cout << (ok ? "ok: trace binds to the published commitments" : "verification failed") << "\n";
    return ok ? kOk : kVerifyFailed;
}

} // namespace

void add_ledger(CLI::App& app, int& code)
{
    auto path = std::make_shared<std::string>();
    auto party = std::make_shared<std::string>();
    auto as_json = std::make_shared<bool>(false);
    auto* sub = app.add_subcommand("ledger", "simulated ledger tooling");
    sub->require_subcommand(1);
    auto* inspect = sub->add_subcommand("inspect", "show the UTXO set of a ledger file or a transcript");
    inspect->add_option("file", *path, "ledger JSON or session transcript")->required();
    inspect->add_option("--party", *party, "one replica of a transcript")->check(CLI::IsMember({"alice", "bob"}));
    inspect->add_flag("--json", *as_json, "print the ledger as JSON");
    inspect->callback([=, &code] { code = run_inspect(*path, *party, *as_json); });
}

void add_trace(CLI::App& app, int& code)
{
    auto* sub = app.add_subcommand("trace", "hidden state-trace trees");
    sub->require_subcommand(1);

    auto p = std::make_shared<TraceParams>();
    auto out = std::make_shared<std::string>();
    auto pub = std::make_shared<std::string>();
    auto* build = sub->add_subcommand("build", "build a tree and its funding transaction");
    add_seed(*build, p->seed);
    build->add_option("--depth", p->depth, "tree depth")->check(CLI::Range(std::size_t{0}, trace::kMaxDepth));
    build->add_option("--state", p->state, "initial state (decimal or 32-byte hex; default derived from the seed)");
    build->add_option("--f1", p->f1, "first transition: inc, dbl, affine:m:a")->capture_default_str();
    build->add_option("--f2", p->f2, "second transition")->capture_default_str();
    build->add_flag("--defer-state", p->defer_state, "plain P2PKH at layer 0 so the state is never opened");
    build->add_option("-o,--out", *out, "private state file")->required();
    build->add_option("--public", *pub, "public commitments file (points only)");
    build->callback([=, &code] { code = run_trace_build(*p, *out, *pub); });

    auto file = std::make_shared<std::string>();
    auto path = std::make_shared<std::string>();
    auto transcript = std::make_shared<std::string>();
    auto* spend = sub->add_subcommand("spend", "walk the tree along a path, one layer per spend");
    spend->add_option("file", *file, "private state file from 'trace build'")->required();
    spend->add_option("--path", *path, "branch choices, e.g. 1,2,1 (0 for the root only)")->required();
    spend->add_option("--transcript", *transcript, "write the spends for 'trace verify'");
    spend->callback([=, &code] { code = run_trace_spend(*file, *path, *transcript); });

    auto vpub = std::make_shared<std::string>();
    auto vt = std::make_shared<std::string>();
    auto* verify = sub->add_subcommand("verify", "check spends against public commitments, without the state");
    verify->add_option("--public", *vpub, "public commitments")->required();
    verify->add_option("--transcript", *vt, "trace transcript")->required();
    verify->callback([=, &code] { code = run_trace_verify(*vpub, *vt); });
}

} // namespace randlock::cli
