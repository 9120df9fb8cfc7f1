// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <doctest.h>

#include <randlock/protocol.hpp>

#include "support/errors.hpp"

#include <algorithm>

using namespace randlock;
using namespace randlock::protocol;
using crypto::hash_160;
using crypto::keygen;
using ledger::kCoin;
using nlohmann::json;
using testutil::error_code;

namespace {

ledger::Amount value_at(const LedgerState& st, const crypto::Address& addr)
{
    ledger::Amount sum = 0;
    for (const auto& [op, u] : st.utxos()) {
        if (u.cond == ledger::SpendCondition::p2pkh(addr)) sum += u.amount;
    }
    return sum;
}

// What the party put in: its minted deposit, if it got that far.
ledger::Amount deposited(const LedgerState& st, const std::string& who)
{
    ledger::Amount sum = 0;
    for (const auto& m : st.mints()) {
        if (m.label.size() > who.size() && m.label.compare(m.label.size() - who.size(), who.size(), who) == 0) {
            sum += m.amount;
        }
    }
    return sum;
}

crypto::Address refund_of(const std::string& seed)
{
    return hash_160(keygen(seed + "/refund").pk);
}

SessionConfig game(Flow flow, std::size_t x, std::size_t y, std::size_t n = 2)
{
    SessionConfig c;
    c.flow = flow;
    c.n = n;
    c.x = x;
    c.y = y;
    c.introspection = true;
    return c;
}

// Ledger as it stood just before the first message of `type`.
LedgerState ledger_before(const SessionResult& r, const std::string& type)
{
    std::vector<json> prefix;
    for (const auto& e : r.transcript.events) {
        if (e["kind"] == "message" && net::Envelope::from_json(e["envelope"]).type == type) break;
        prefix.push_back(e);
    }
    return merge_ledger(r.transcript.initial, prefix);
}

std::vector<std::pair<std::string, json>> messages(const Transcript& t)
{
    std::vector<std::pair<std::string, json>> out;
    for (const auto& env : t.envelopes()) {
        json p = env.payload();
        out.emplace_back(env.sender, p);
    }
    return out;
}

} // namespace

TEST_CASE("thimbles: Bob wins exactly when the guesses match")
{
    int wins = 0;
    for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t y = 0; y < 2; ++y) {
            CAPTURE(x);
            CAPTURE(y);
            auto r = thimbles_run(game(Flow::Thimbles, x, y));
            REQUIRE(r.report.completed);
            CHECK_FALSE(r.report.abort);
            CHECK(*r.report.accepter_won == (x == y));
            CHECK(r.report.x == x);
            CHECK(r.report.y == y);
            wins += *r.report.accepter_won;
            if (x == y) {
                CHECK(adjudicate(r.report) == Winner::Accepter);
                CHECK(value_at(r.ledger, refund_of("bob")) == 10 * kCoin);
                CHECK(value_at(r.ledger, refund_of("alice")) == 0);
            } else {
                CHECK(adjudicate(r.report) == Winner::Challenger);
                CHECK(value_at(r.ledger, refund_of("alice")) == 10 * kCoin);
                CHECK(r.report.final_height >= 10);
            }
            CHECK(r.ledger.total_value() == 10 * kCoin);
            CHECK(r.alice->ledger() == r.bob->ledger());
        }
    }
    CHECK(wins == 2);
}

TEST_CASE("thimbles: the loser's spend and an early reclaim are both refused")
{
    auto r = thimbles_run(game(Flow::Thimbles, 0, 1));
    REQUIRE(r.report.completed);
    auto st = ledger_before(r, "concede");

    // TX2 is the only transaction paying the 10 BTC pot.
    const ledger::Transaction* tx2 = nullptr;
    for (const auto& id : st.log()) {
        const auto* tx = st.transaction(id);
        if (tx && tx->outputs.size() == 1 && tx->outputs[0].amount == 10 * kCoin) tx2 = tx;
    }
    REQUIRE(tx2);
    const ledger::OutPoint pot{ledger::txid(*tx2), 0};
    auto A_x = commit::recover(*tx2->inputs[0].witness.revealed_key(), keygen("alice/key").pk);
    auto bob_key = crypto::keypair_from_secret(commit::derive_spend_key(crypto::hash_p(A_x), keygen("bob/key").sk));

    ledger::Transaction steal;
    steal.inputs.push_back({pot, {}});
    steal.outputs.push_back({10 * kCoin, ledger::SpendCondition::p2pkh(refund_of("bob"))});
    steal.inputs[0].witness = ledger::Witness::branch(0, ledger::sign_input(bob_key, steal));
    CHECK(error_code([&] { ledger::apply_transaction(st, steal); }) == Errc::BadWitness);

    ledger::Transaction early;
    early.inputs.push_back({pot, {}});
    early.outputs.push_back({10 * kCoin, ledger::SpendCondition::p2pkh(refund_of("alice"))});
    early.inputs[0].witness = ledger::Witness::branch(1, ledger::sign_input(keygen("alice/key"), early));
    CHECK(st.height() < 10);
    CHECK(error_code([&] { ledger::apply_transaction(st, early); }) == Errc::BadWitness);
    CHECK_NOTHROW(ledger::apply_transaction(ledger::advance_height(st, 10), early));
}

TEST_CASE("thimbles: larger games pay only on a match")
{
    for (std::size_t n : {3u, 5u, 8u}) {
        for (std::size_t y = 0; y < n; ++y) {
            auto r = thimbles_run(game(Flow::Thimbles, 1, y, n));
            REQUIRE(r.report.completed);
            CHECK(*r.report.accepter_won == (y == 1));
        }
    }
}

TEST_CASE("oprand: verdict matrix is the identity for n = 5")
{
    for (std::size_t x = 0; x < 5; ++x) {
        for (std::size_t y = 0; y < 5; ++y) {
            auto r = oprand_run(game(Flow::OpRand, x, y, 5));
            REQUIRE(r.report.completed);
            CHECK(*r.report.accepter_won == (x == y));
            CHECK(r.alice->verdict() == r.bob->verdict());
        }
    }
}

TEST_CASE("oprand: derived choices are used when none are given")
{
    SessionConfig c;
    c.flow = Flow::OpRand;
    c.n = 4;
    c.introspection = true;
    auto r = oprand_run(c);
    REQUIRE(r.report.completed);
    REQUIRE(r.report.x);
    REQUIRE(r.report.y);
    CHECK(*r.report.accepter_won == (*r.report.x == *r.report.y));
}

TEST_CASE("covenant: TX1 locks both deposits and the spends run in order")
{
    SessionConfig c;
    c.flow = Flow::Covenant;
    c.covenant_spends = false;
    auto r = covenant_run(c);
    REQUIRE(r.report.completed);

    const auto* as = covenant_alice_state(*r.alice);
    const auto* bs = covenant_bob_state(*r.bob);
    REQUIRE(as);
    REQUIRE(bs);
    CHECK_FALSE(covenant_alice_state(*r.bob));
    const auto* tx1 = r.ledger.transaction(as->tx1);
    REQUIRE(tx1);
    REQUIRE(tx1->outputs.size() == 2);
    CHECK(tx1->outputs[0].amount == kCoin);
    CHECK(tx1->outputs[1].amount == kCoin);
    CHECK(tx1->outputs[0].cond == ledger::SpendCondition::p2pkh(hash_160(keygen("alice/key").pk)));

    CHECK(error_code([&] { covenant_spend_bob(*bs, r.ledger); }) == Errc::NotYetRevealed);
    auto s2 = covenant_spend_alice(*as, r.ledger);
    auto s3 = covenant_spend_bob(*bs, s2.ledger);
    CHECK(s3.revealed == keygen("alice/key").pk);
    CHECK(value_at(s3.ledger, refund_of("alice")) == kCoin);
    CHECK(value_at(s3.ledger, refund_of("bob")) == kCoin);
}

TEST_CASE("covenant: in-session spends and the timelocked variant")
{
    SessionConfig c;
    c.flow = Flow::Covenant;
    auto r = covenant_run(c);
    REQUIRE(r.report.completed);
    CHECK(value_at(r.ledger, refund_of("alice")) == kCoin);
    CHECK(value_at(r.ledger, refund_of("bob")) == kCoin);

    c.timelocked = true;
    auto t = covenant_run(c);
    REQUIRE(t.report.completed);
    const auto* tx1 = t.ledger.transaction(covenant_alice_state(*t.alice)->tx1);
    REQUIRE(tx1);
    for (const auto& out : tx1->outputs) {
        REQUIRE(out.cond.kind() == ledger::SpendCondition::Kind::AnyOf);
        CHECK(out.cond.branches()[1].kind() == ledger::SpendCondition::Kind::TimeLocked);
    }
    CHECK(tx1->outputs[0].cond.branches()[1].lock_height() == 10);
    CHECK(tx1->outputs[1].cond.branches()[1].lock_height() == 20);
    CHECK(value_at(t.ledger, refund_of("bob")) == kCoin);
}

TEST_CASE("covenant: a malformed pi_c stops Bob before any transaction")
{
    SessionConfig c;
    c.flow = Flow::Covenant;
    c.cheat = Cheat::ChallengerBadAddr;
    auto r = covenant_run(c);
    REQUIRE(r.report.abort);
    CHECK(r.report.abort->code == Errc::ProofRejected);
    CHECK(r.report.abort->by == Role::Accepter);
    for (const auto& id : r.ledger.log()) {
        if (const auto* tx = r.ledger.transaction(id)) CHECK(tx->inputs.size() == 1);
    }
}

TEST_CASE("no-cheat suite: each cheat aborts with the expected code")
{
    struct Case {
        Flow flow;
        Cheat cheat;
        Errc code;
        Role detector;
    };
    const Case cases[] = {
        {Flow::Thimbles, Cheat::ChallengerBadAddr, Errc::ProofRejected, Role::Accepter},
        {Flow::Thimbles, Cheat::ChallengerRevealMismatch, Errc::CommitmentMismatch, Role::Accepter},
        {Flow::Thimbles, Cheat::AccepterBadAddr, Errc::ProofRejected, Role::Challenger},
        {Flow::Thimbles, Cheat::AccepterNoKey, Errc::ProofRejected, Role::Challenger},
        {Flow::OpRand, Cheat::ChallengerBadAddr, Errc::ProofRejected, Role::Accepter},
        {Flow::OpRand, Cheat::ChallengerRevealMismatch, Errc::CommitmentMismatch, Role::Accepter},
        {Flow::OpRand, Cheat::AccepterBadAddr, Errc::ProofRejected, Role::Challenger},
        {Flow::OpRand, Cheat::AccepterNoKey, Errc::ProofRejected, Role::Challenger},
        {Flow::Covenant, Cheat::AccepterBadAddr, Errc::ProofRejected, Role::Challenger},
        {Flow::Covenant, Cheat::AccepterNoKey, Errc::ProofRejected, Role::Challenger},
    };
    for (const auto& k : cases) {
        CAPTURE(flow_name(k.flow));
        CAPTURE(cheat_name(k.cheat));
        auto cfg = game(k.flow, 0, 0);
        cfg.cheat = k.cheat;
        auto r = run_session(cfg);
        REQUIRE(r.report.abort);
        CHECK(r.report.abort->code == k.code);
        CHECK(r.report.abort->by == k.detector);
        CHECK_FALSE(r.report.completed);
        CHECK(adjudicate(r.report) == Winner::ChallengerAfterTimelock);
        CHECK(r.alice->finished());
        CHECK(r.bob->finished());
        if (k.flow == Flow::Thimbles) {
            // Nothing reached the pot; each deposit went home.
            CHECK(value_at(r.ledger, refund_of("alice")) == deposited(r.ledger, "/alice"));
            CHECK(value_at(r.ledger, refund_of("bob")) == deposited(r.ledger, "/bob"));
            CHECK(deposited(r.ledger, "/alice") == 5 * kCoin);
        }
        CHECK(replay(r.transcript).ok);
    }
}

TEST_CASE("abort matrix: every flow and cheat terminates and the honest side is refunded")
{
    for (auto flow : {Flow::Thimbles, Flow::OpRand, Flow::Covenant}) {
        for (auto cheat : all_cheats()) {
            if (cheat == Cheat::None) continue;
            CAPTURE(flow_name(flow));
            CAPTURE(cheat_name(cheat));
            auto cfg = game(flow, 0, 1);
            cfg.cheat = cheat;
            cfg.timelocked = true;
            auto r = run_session(cfg);
            REQUIRE(r.report.abort);
            CHECK(adjudicate(r.report) == Winner::ChallengerAfterTimelock);
            CHECK(r.alice->finished());
            CHECK(r.bob->finished());
            CHECK(r.ledger.total_value() == deposited(r.ledger, "/alice") + deposited(r.ledger, "/bob"));

            const bool alice_cheats = cheat == Cheat::ChallengerBadAddr || cheat == Cheat::ChallengerRevealMismatch ||
                                      cheat == Cheat::ChallengerRefuseSign;
            const auto* honest = alice_cheats ? "bob" : "alice";
            CHECK(value_at(r.ledger, refund_of(honest)) >= deposited(r.ledger, std::string("/") + honest));
            auto rep = replay(r.transcript);
            CHECK_MESSAGE(rep.ok, rep.reason);
        }
    }
}

TEST_CASE("pre-funded cheats: the honest deposit always goes home")
{
    for (auto cheat : all_cheats()) {
        CAPTURE(cheat_name(cheat));
        auto cfg = game(Flow::Thimbles, 0, 1);
        cfg.cheat = cheat;
        cfg.auto_fund = false;
        auto r = run_session(cfg, with_deposits(cfg));
        const bool alice_cheats = cheat == Cheat::ChallengerBadAddr || cheat == Cheat::ChallengerRevealMismatch ||
                                  cheat == Cheat::ChallengerRefuseSign;
        if (cheat == Cheat::None) {
            CHECK(r.report.completed);
        } else if (alice_cheats) {
            CHECK(value_at(r.ledger, refund_of("bob")) == 5 * kCoin);
        } else {
            CHECK(value_at(r.ledger, refund_of("alice")) >= 5 * kCoin);
        }
    }
}

TEST_CASE("stalls surface as timeouts on the waiting side")
{
    auto cfg = game(Flow::Thimbles, 0, 0);
    cfg.cheat = Cheat::ChallengerRefuseSign;
    auto r = run_session(cfg);
    REQUIRE(r.report.abort);
    CHECK(r.report.abort->code == Errc::PeerTimeout);
    CHECK(r.report.abort->by == Role::Accepter);
    CHECK(r.alice->abort_info()->code == Errc::PeerTimeout);

    cfg.cheat = Cheat::AccepterStall;
    auto s = run_session(cfg);
    REQUIRE(s.report.abort);
    CHECK(s.report.abort->code == Errc::PeerTimeout);
    CHECK(s.report.abort->by == Role::Challenger);
    CHECK(s.report.reclaimed);
    CHECK(s.report.final_height >= cfg.t1);
    CHECK(value_at(s.ledger, refund_of("alice")) == 10 * kCoin);
}

TEST_CASE("transcripts are deterministic and replay")
{
    for (auto flow : {Flow::Thimbles, Flow::OpRand, Flow::Covenant}) {
        SessionConfig c;
        c.flow = flow;
        c.alice_seed = "seed-7/alice";
        c.bob_seed = "seed-7/bob";
        auto a = run_session(c);
        auto b = run_session(c);
        CHECK(a.transcript.to_json().dump() == b.transcript.to_json().dump());
        auto rep = replay(Transcript::from_json(a.transcript.to_json()));
        CHECK_MESSAGE(rep.ok, rep.reason);
        CHECK(rep.envelopes_checked > 0);
        CHECK(rep.proofs_checked > 0);
        if (flow == Flow::OpRand) {
            CHECK(rep.ledger_events_checked == 0);
        } else {
            CHECK(rep.ledger_events_checked > 1);
        }
        CHECK_FALSE(narrate(a.transcript).empty());

        c.bob_seed = "seed-8/bob";
        auto d = run_session(c);
        CHECK(a.transcript.to_json().dump() != d.transcript.to_json().dump());
    }
}

TEST_CASE("replay pinpoints tampering")
{
    auto r = thimbles_run(game(Flow::Thimbles, 0, 0));
    auto base = r.transcript;

    std::size_t msg = 0;
    while (base.events[msg]["kind"] != "message") ++msg;

    SUBCASE("payload edit breaks the digest")
    {
        auto t = base;
        auto& env = t.events[msg]["envelope"];
        auto hex = env["payload_hex"].get<std::string>();
        hex[hex.size() - 2] = hex[hex.size() - 2] == '0' ? '1' : '0';
        env["payload_hex"] = hex;
        auto rep = replay(t);
        CHECK_FALSE(rep.ok);
        CHECK(rep.failed_event == msg);
    }
    SUBCASE("resealed payload with a forged proof")
    {
        auto t = base;
        auto env = net::Envelope::from_json(t.events[msg]["envelope"]);
        auto p = env.payload();
        auto proof = p["pi_a"]["proof"].get<std::string>();
        proof.back() = proof.back() == '0' ? '1' : '0';
        p["pi_a"]["proof"] = proof;
        t.events[msg]["envelope"] = net::Envelope::make(env.session_id, env.step, env.sender, env.type, p).to_json();
        auto rep = replay(t);
        CHECK_FALSE(rep.ok);
        CHECK(rep.failed_event == msg);
    }
    SUBCASE("ledger event with an altered transaction")
    {
        auto t = base;
        for (std::size_t i = 0; i < t.events.size(); ++i) {
            auto& e = t.events[i];
            if (e["kind"] == "ledger" && e["op"] == "apply") {
                e["tx"]["outputs"][0]["amount"] = e["tx"]["outputs"][0]["amount"].get<std::uint64_t>() + 1;
                auto rep = replay(t);
                CHECK_FALSE(rep.ok);
                CHECK(rep.failed_event == i);
                break;
            }
        }
    }
    SUBCASE("reordered steps")
    {
        auto t = base;
        std::vector<std::size_t> alice_msgs;
        for (std::size_t i = 0; i < t.events.size(); ++i) {
            if (t.events[i]["kind"] == "message" && t.events[i]["envelope"]["sender"] == "alice") alice_msgs.push_back(i);
        }
        REQUIRE(alice_msgs.size() >= 2);
        std::swap(t.events[alice_msgs[0]], t.events[alice_msgs[1]]);
        CHECK_FALSE(replay(t).ok);
    }
}

TEST_CASE("secrets never leave their owner")
{
    for (auto flow : {Flow::Thimbles, Flow::OpRand, Flow::Covenant}) {
        for (auto cheat : all_cheats()) {
            auto cfg = game(flow, 1, 0);
            cfg.cheat = cheat;
            auto r = run_session(cfg);
            const auto sid = r.transcript.session_id;
            auto set = commit::gen_commitment_set("alice/set/" + sid, 2);
            std::vector<std::string> alice_secrets{keygen("alice/key").sk.to_hex(), keygen("alice/funding").sk.to_hex(),
                                                   keygen("alice/refund").sk.to_hex()};
            for (const auto& t : set.triples()) alice_secrets.push_back(t.a.to_hex());
            std::vector<std::string> bob_secrets{keygen("bob/key").sk.to_hex(), keygen("bob/funding").sk.to_hex(),
                                                 keygen("bob/refund").sk.to_hex()};
            for (const auto& [sender, payload] : messages(r.transcript)) {
                const auto text = payload.dump();
                for (const auto& s : sender == "alice" ? alice_secrets : bob_secrets) {
                    CHECK(text.find(s) == std::string::npos);
                }
                for (const char* key : {"x", "y", "sk", "a", "sk_a", "sk_b", "secret"}) {
                    CHECK_FALSE(text.find(std::string("\"") + key + "\":") != std::string::npos);
                }
            }
        }
    }
}

TEST_CASE("message schema is enforced")
{
    auto schema = message_schema();
    CHECK(schema.contains("offer"));
    CHECK_NOTHROW(check_schema("settle", {{"tx", json::object()}}));
    CHECK(error_code([] { check_schema("settle", {{"tx", 1}, {"sk", "00"}}); }) == Errc::ProtocolViolation);
    CHECK(error_code([] { check_schema("settle", json::object()); }) == Errc::ProtocolViolation);
    CHECK(error_code([] { check_schema("gossip", json::object()); }) == Errc::ProtocolViolation);
}

TEST_CASE("a party rejects messages that break the schema")
{
    SessionConfig c;
    auto bob = make_party(Role::Accepter, c, {});
    bob->bind_session(c.resolved_session_id());
    bob->start();
    auto env = net::Envelope::make(c.resolved_session_id(), 1, "alice", "offer", {{"config", json::object()}});
    auto out = bob->handle(env);
    REQUIRE(bob->abort_info());
    CHECK(bob->abort_info()->code == Errc::ProtocolViolation);
    REQUIRE(out.size() == 1);
    CHECK(out[0].type == "abort");
}

TEST_CASE("interactive decisions")
{
    SessionConfig c;
    c.interactive_alice = true;
    c.n = 3;
    auto alice = make_party(Role::Challenger, c, {});
    CHECK(alice->start().empty());
    CHECK(alice->awaiting_decision());
    CHECK(error_code([&] { alice->decide({Decision::Kind::Reveal, 0}); }) == Errc::OutOfOrder);
    CHECK(error_code([&] { alice->decide({Decision::Kind::Choose, 3}); }) == Errc::BadConfig);
    auto out = alice->decide({Decision::Kind::Choose, 2});
    REQUIRE(out.size() == 1);
    CHECK(out[0].type == "offer");
    CHECK(alice->choice() == 2u);
    CHECK(error_code([&] { alice->decide({Decision::Kind::Choose, 0}); }) == Errc::OutOfOrder);

    auto vis = alice->visible_state().dump();
    CHECK(vis.find(keygen("alice/key").sk.to_hex()) == std::string::npos);
}

TEST_CASE("adjudication")
{
    OutcomeReport r;
    CHECK(error_code([&] { adjudicate(r); }) == Errc::Incomplete);
    r.completed = true;
    CHECK(error_code([&] { adjudicate(r); }) == Errc::Incomplete);
    r.accepter_won = true;
    CHECK(adjudicate(r) == Winner::Accepter);
    r.accepter_won = false;
    CHECK(adjudicate(r) == Winner::Challenger);
    r.abort = AbortInfo{};
    CHECK(adjudicate(r) == Winner::ChallengerAfterTimelock);
}

TEST_CASE("session config validation")
{
    SessionConfig c;
    CHECK_NOTHROW(c.validate());
    c.n = 1;
    CHECK(error_code([&] { c.validate(); }) == Errc::BadConfig);
    c.n = 2;
    c.deposit = 0;
    CHECK(error_code([&] { c.validate(); }) == Errc::BadConfig);
    c.deposit.reset();
    CHECK(error_code([&] { c.validate(10); }) == Errc::BadConfig);
    c.x = 2;
    CHECK(error_code([&] { c.validate(); }) == Errc::BadConfig);
    c.x.reset();
    c.backend = "snark";
    CHECK(error_code([&] { c.validate(); }) == Errc::UnknownBackend);

    auto d = SessionConfig::from_json({{"flow", "oprand"}, {"n", 4}, {"x", 4}, {"y", 1}});
    CHECK(d.flow == Flow::OpRand);
    CHECK(d.x == 3u);
    CHECK(d.y == 0u);
    CHECK(error_code([] { SessionConfig::from_json({{"colour", "red"}}); }) == Errc::BadConfig);
}

TEST_CASE("funding must exist when auto-funding is off")
{
    auto cfg = game(Flow::Thimbles, 0, 0);
    cfg.auto_fund = false;
    auto r = run_session(cfg);
    REQUIRE(r.report.abort);
    CHECK(r.report.abort->code == Errc::FundingMissing);

    auto st = with_deposits(cfg);
    CHECK(st.total_value() == 10 * kCoin);
    auto ok = run_session(cfg, st);
    CHECK(ok.report.completed);
    CHECK(ok.ledger.total_value() == 10 * kCoin);
}
