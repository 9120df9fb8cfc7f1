// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

// One line per acceptance criterion; exit status is the number of failures.

#include <randlock/protocol.hpp>
#include <randlock/statetrace.hpp>

#include "support/rng.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace randlock;
using namespace randlock::protocol;
using crypto::hash_160;
using crypto::keygen;
using ledger::kCoin;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double limit_s, const std::function<Outcome()>& body)
{
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && secs >= limit_s) {
        o.pass = false;
        o.detail += " (over the " + std::to_string(static_cast<int>(limit_s)) + " s budget)";
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2f s", secs);
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << o.detail << "; " << timing << "]\n";
    if (!o.pass) ++failures;
}

Errc code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    throw std::runtime_error("expected an error");
}

ledger::Amount value_at(const LedgerState& st, const crypto::Address& addr)
{
    ledger::Amount sum = 0;
    for (const auto& [op, u] : st.utxos()) {
        if (u.cond == ledger::SpendCondition::p2pkh(addr)) sum += u.amount;
    }
    return sum;
}

crypto::Address refund_of(const std::string& seed)
{
    return hash_160(keygen(seed + "/refund").pk);
}

// ---- covenant gating ----

Outcome covenant_gating()
{
    int ok = 0;
    for (int i = 0; i < 100; ++i) {
        SessionConfig c;
        c.flow = Flow::Covenant;
        c.covenant_spends = false;
        c.alice_seed = "cov-" + std::to_string(i) + "/alice";
        c.bob_seed = "cov-" + std::to_string(i) + "/bob";
        auto r = covenant_run(c);
        if (!r.report.completed) continue;
        const auto& as = *covenant_alice_state(*r.alice);
        const auto& bs = *covenant_bob_state(*r.bob);
        if (code_of([&] { covenant_spend_bob(bs, r.ledger); }) != Errc::NotYetRevealed) continue;
        auto tx2 = covenant_spend_alice(as, r.ledger);
        auto tx3 = covenant_spend_bob(bs, tx2.ledger);
        if (tx3.revealed.compress() != keygen(c.alice_seed + "/key").pk.compress()) continue;
        if (!tx3.ledger.spender({as.tx1, 1})) continue;
        ++ok;
    }
    return {ok == 100, std::to_string(ok) + "/100 runs gated"};
}

// ---- thimbles matrix ----

Outcome thimbles_matrix()
{
    int ok = 0;
    std::ostringstream d;
    for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t y = 0; y < 2; ++y) {
            SessionConfig c;
            c.x = x;
            c.y = y;
            auto r = thimbles_run(c);
            bool good = r.report.completed && r.report.accepter_won == (x == y);
            if (x == y) {
                good = good && value_at(r.ledger, refund_of("bob")) == 10 * kCoin;
            } else {
                // Find the pot and Alice's reclaim; it must be invalid below t1.
                good = good && value_at(r.ledger, refund_of("alice")) == 10 * kCoin;
                const ledger::Transaction* reclaim = nullptr;
                for (const auto& id : r.ledger.log()) {
                    const auto* tx = r.ledger.transaction(id);
                    if (tx && tx->inputs.size() == 1 && tx->outputs[0].amount == 10 * kCoin &&
                        tx->outputs[0].cond == ledger::SpendCondition::p2pkh(refund_of("alice"))) {
                        reclaim = tx;
                    }
                }
                good = good && reclaim;
                if (reclaim) {
                    // Rebuild the pre-reclaim ledger from the transcript.
                    std::vector<json> prefix;
                    for (const auto& e : r.transcript.events) {
                        if (e["kind"] == "ledger" && e["op"] == "advance") break;
                        prefix.push_back(e);
                    }
                    auto st = merge_ledger(r.transcript.initial, prefix);
                    auto early = ledger::advance_height(st, c.t1 - 1 - st.height());
                    good = good && code_of([&] { ledger::apply_transaction(early, *reclaim); }) == Errc::BadWitness;
                    auto at_t1 = ledger::advance_height(early, 1);
                    ledger::apply_transaction(at_t1, *reclaim);
                }
            }
            d << (x + 1) << (y + 1) << (r.report.accepter_won.value_or(false) ? ":bob " : ":alice ");
            ok += good;
        }
    }
    return {ok == 4, d.str() + std::to_string(ok) + "/4 as expected"};
}

// ---- fairness ----

Outcome fairness()
{
    const int sessions = 10000;
    int wins = 0;
    int completed = 0;
    RunOptions opts;
    opts.record = false;
    for (int i = 0; i < sessions; ++i) {
        SessionConfig c;
        c.alice_seed = "fair-" + std::to_string(i) + "/alice";
        c.bob_seed = "fair-" + std::to_string(i) + "/bob";
        auto r = run_session(c, {}, opts);
        if (!r.report.completed) continue;
        ++completed;
        wins += r.report.accepter_won.value_or(false);
    }
    double rate = static_cast<double>(wins) / sessions;
    char buf[96];
    std::snprintf(buf, sizeof buf, "win rate %.4f over %d sessions, %d completed", rate, sessions, completed);
    return {completed == sessions && rate >= 0.48 && rate <= 0.52, buf};
}

// ---- no-cheat ----

Outcome no_cheat()
{
    struct Case {
        Cheat cheat;
        Errc code;
        const char* honest;
    };
    const Case cases[] = {
        {Cheat::ChallengerBadAddr, Errc::ProofRejected, "bob"},
        {Cheat::ChallengerRevealMismatch, Errc::CommitmentMismatch, "bob"},
        {Cheat::AccepterBadAddr, Errc::ProofRejected, "alice"},
        {Cheat::AccepterNoKey, Errc::ProofRejected, "alice"},
    };
    int ok = 0;
    std::ostringstream d;
    for (const auto& k : cases) {
        SessionConfig c;
        c.cheat = k.cheat;
        c.auto_fund = false;
        auto r = thimbles_run(c, with_deposits(c));
        bool good = r.report.abort && r.report.abort->code == k.code;

        // No transaction carrying an honest signature was accepted, except
        // the honest party's own refund.
        const std::string seed = k.honest;
        const auto refund = refund_of(seed);
        const auto fund_pk = keygen(seed + "/funding").pk;
        const auto key_pk = keygen(seed + "/key").pk;
        for (const auto& id : r.ledger.log()) {
            const auto* tx = r.ledger.transaction(id);
            if (!tx) continue;
            for (const auto& in : tx->inputs) {
                auto pk = in.witness.revealed_key();
                if (!pk || (*pk != fund_pk && *pk != key_pk)) continue;
                bool own_refund = tx->outputs.size() == 1 && tx->outputs[0].cond == ledger::SpendCondition::p2pkh(refund);
                good = good && own_refund;
            }
        }
        auto later = ledger::advance_height(r.ledger, std::max(c.t1, c.t2_height()));
        good = good && value_at(later, refund) == c.deposit_amount();
        good = good && replay(r.transcript).ok;
        d << cheat_name(k.cheat) << "=" << (r.report.abort ? errc_name(r.report.abort->code) : "none") << " ";
        ok += good;
    }
    return {ok == 4, d.str() + std::to_string(ok) + "/4"};
}

// ---- n-ary ----

Outcome n_ary()
{
    int runs = 0;
    int ok = 0;
    for (std::size_t n = 2; n <= 8; ++n) {
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t y = 0; y < n; ++y) {
                SessionConfig c;
                c.n = n;
                c.x = x;
                c.y = y;
                auto r = oprand_run(c);
                ++runs;
                ok += r.report.completed && r.report.accepter_won == (x == y) && r.alice->verdict() == r.bob->verdict();
            }
        }
    }
    return {ok == runs, std::to_string(ok) + "/" + std::to_string(runs) + " pairs match index equality"};
}

// ---- sighash fuzz ----

ledger::Witness random_witness(testutil::Gen& g, int depth = 0)
{
    switch (depth > 2 ? g.below(2) : g.below(4)) {
    case 0: return {};
    case 1: {
        auto k = keygen(g.seed_string());
        return ledger::Witness::key_sig(k.pk, crypto::sig_gen(k.sk, g.bytes(32)));
    }
    case 2: return ledger::Witness::hash_preimage(g.bytes(g.below(64)), random_witness(g, depth + 1));
    default: return ledger::Witness::branch(g.below(4), random_witness(g, depth + 1));
    }
}

Outcome sighash_fuzz()
{
    testutil::Gen g(20260101);
    auto a = keygen("fuzz/a");
    auto b = keygen("fuzz/b");
    auto cond_a = ledger::SpendCondition::p2pkh(hash_160(a.pk));
    auto cond_b = ledger::SpendCondition::any_of(
        {ledger::SpendCondition::p2pk(b.pk), ledger::SpendCondition::time_locked(ledger::SpendCondition::p2pkh({}), 5)});
    auto [s1, op1] = ledger::mint({}, 3 * kCoin, cond_a, "fuzz-a");
    auto [s2, op2] = ledger::mint(s1, 2 * kCoin, cond_b, "fuzz-b");

    ledger::Transaction tx;
    tx.inputs = {{op1, {}}, {op2, {}}};
    tx.outputs = {{4 * kCoin, ledger::SpendCondition::p2pkh(hash_160(b.pk))}};
    tx.inputs[0].witness = ledger::sign_input(a, tx);
    tx.inputs[1].witness = ledger::Witness::branch(0, ledger::sign_input(b, tx));
    const auto id = ledger::txid(tx);
    const auto sh = ledger::sighash(tx);
    const auto w0 = tx.inputs[0].witness;
    const auto w1 = tx.inputs[1].witness;

    int ok = 0;
    for (int i = 0; i < 1000; ++i) {
        auto m = tx;
        std::size_t which = g.below(3);
        if (which != 1) m.inputs[0].witness = random_witness(g);
        if (which != 0) m.inputs[1].witness = random_witness(g);
        auto msh = ledger::sighash(m);
        bool good = ledger::txid(m) == id && msh == sh && ledger::check_condition(cond_a, w0, msh, 0) &&
                    ledger::check_condition(cond_b, w1, msh, 0);
        ok += good;
    }
    return {ok == 1000, std::to_string(ok) + "/1000 mutations left txid, sighash and signatures intact"};
}

// ---- state trace ----

void leaves(const json& j, const json::json_pointer& at, std::vector<json::json_pointer>& out)
{
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) leaves(v, at / k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) leaves(j[i], at / i, out);
    } else {
        out.push_back(at);
    }
}

json tampered(json j, const json::json_pointer& p)
{
    auto& v = j[p];
    if (v.is_boolean()) {
        v = !v.get<bool>();
    } else if (v.is_number_unsigned() || v.is_number_integer()) {
        v = v.get<std::uint64_t>() + 1;
    } else if (v.is_string()) {
        auto s = v.get<std::string>();
        if (s.empty()) {
            s = "00";
        } else {
            char& c = s.back();
            c = c == '0' ? '1' : (c == '1' ? '2' : '0');
        }
        v = s;
    } else {
        v = 0;
    }
    return j;
}

Outcome state_trace()
{
    using namespace randlock::trace;
    auto alice = keygen("trace/alice");
    auto funder = keygen("trace/funder");
    const auto s = Scalar::from_u64(5);
    auto tree = build_tree(alice.pk, s, default_transitions(), 3);
    auto pub = public_commitments(tree, false);
    auto cond = ledger::SpendCondition::p2pkh(hash_160(funder.pk));

    int traces = 0;
    int substitutions = 0;
    int substitutions_rejected = 0;
    int honest_verified = 0;
    int tampers = 0;
    int tampers_rejected = 0;
    for (std::string path : {"111", "112", "121", "122", "211", "212", "221", "222"}) {
        auto [st0, op] = ledger::mint({}, 4 * kCoin, cond, "trace-funding");
        auto ttx = build_trace_tx(tree, op, *st0.find(op), funder);
        auto st = ledger::apply_transaction(st0, ttx.tx);
        for (std::size_t l = 0; l <= 3; ++l) {
            if (l > 0) {
                // Every sibling branch index with the real witness is refused.
                auto next = reveal_step(tree, alice.sk, path.substr(0, l), ttx, st);
                auto spend = *next.spender({ttx.txid, static_cast<std::uint32_t>(l)});
                const auto& w = spend.inputs[0].witness;
                for (std::size_t alt = 0; alt < (1u << l); ++alt) {
                    if (alt == w.branch_index()) continue;
                    auto bad = spend;
                    bad.inputs[0].witness = ledger::Witness::branch(alt, w.inner());
                    ++substitutions;
                    try {
                        ledger::apply_transaction(st, bad);
                    } catch (const Error& e) {
                        substitutions_rejected += e.code() == Errc::BadWitness;
                    }
                }
            }
            st = reveal_step(tree, alice.sk, path.substr(0, l), ttx, st);
        }
        ++traces;

        auto t = collect_transcript(ttx, st);
        honest_verified += verify_trace(t, pub);

        const json tj = t.to_json();
        const json pj = pub.to_json();
        std::vector<json::json_pointer> tl, pl;
        leaves(tj, json::json_pointer(), tl);
        leaves(pj, json::json_pointer(), pl);
        for (const auto& p : tl) {
            ++tampers;
            try {
                tampers_rejected += !verify_trace(TraceTranscript::from_json(tampered(tj, p)), pub);
            } catch (const std::exception&) {
                ++tampers_rejected;
            }
        }
        for (const auto& p : pl) {
            ++tampers;
            try {
                tampers_rejected += !verify_trace(t, PublicCommitments::from_json(tampered(pj, p)));
            } catch (const std::exception&) {
                ++tampers_rejected;
            }
        }
    }
    std::ostringstream d;
    d << traces << "/8 traces spent, " << substitutions_rejected << "/" << substitutions << " substitutions rejected, "
      << honest_verified << "/8 honest verified, " << tampers_rejected << "/" << tampers << " tampers rejected";
    bool pass = traces == 8 && substitutions > 0 && substitutions_rejected == substitutions && honest_verified == 8 &&
                tampers_rejected == tampers;
    return {pass, d.str()};
}

// ---- determinism through the CLI ----

int run(const std::string& cmd)
{
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism(const std::string& cli, const std::string& dir)
{
    if (cli.empty()) return {false, "no CLI path given (--cli)"};
    const auto t1 = dir + "/det-1.json";
    const auto t2 = dir + "/det-2.json";
    int e1 = run(cli + " demo thimbles --seed 7 --transcript " + t1 + " > /dev/null");
    int e2 = run(cli + " demo thimbles --seed 7 --transcript " + t2 + " > /dev/null");
    auto a = slurp(t1);
    auto b = slurp(t2);
    int rep = run(cli + " replay " + t1 + " > /dev/null");
    std::ostringstream d;
    d << "demo exits " << e1 << "/" << e2 << ", " << a.size() << " bytes, " << (a == b ? "identical" : "different")
      << ", replay exit " << rep;
    return {e1 == 0 && e2 == 0 && !a.empty() && a == b && rep == 0, d.str()};
}

} // namespace

int main(int argc, char** argv)
{
    std::string cli;
    std::string dir = ".";
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string flag = argv[i];
        if (flag == "--cli") cli = argv[i + 1];
        if (flag == "--workdir") dir = argv[i + 1];
    }

    criterion("covenant gating", 5, covenant_gating);
    criterion("thimbles exhaustive matrix", 5, thimbles_matrix);
    criterion("fairness", 60, fairness);
    criterion("no-cheat suite", 0, no_cheat);
    criterion("n-ary correctness", 10, n_ary);
    criterion("witness-excluded sighash", 0, sighash_fuzz);
    criterion("state trace", 10, state_trace);
    criterion("determinism", 0, [&] { return determinism(cli, dir); });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}
