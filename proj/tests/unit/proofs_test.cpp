// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <doctest.h>

#include <randlock/commitments.hpp>
#include <randlock/proofs.hpp>
#include <randlock/statetrace.hpp>

#include "support/errors.hpp"
#include "support/rng.hpp"

using namespace randlock;
using namespace randlock::proofs;
using crypto::hash_160;
using crypto::hash_p;
using crypto::keygen;
using testutil::error_code;

namespace {

const GroupPoint& G = GroupPoint::generator();
const Bytes kSession = from_hex("00112233445566778899aabbccddeeff");

struct AliceSetup {
    crypto::KeyPair key;
    commit::CommitmentSet set;
    std::size_t x;
    RaStatement stmt;
    RaWitness wit;
};

AliceSetup alice(std::size_t n, std::size_t x, const std::string& seed = "alice")
{
    AliceSetup s{keygen(seed), commit::gen_commitment_set(seed + "/set", n), x, {}, {}};
    s.stmt.H_list = s.set.third_rank();
    s.stmt.P_a = s.key.pk;
    s.stmt.addr_a = KeyCommitment::address(hash_160(s.key.pk + s.set.at(x).A));
    for (const auto& t : s.set.triples()) s.wit.a.push_back(t.a);
    s.wit.x = x;
    return s;
}

struct BobSetup {
    crypto::KeyPair key;
    RrStatement stmt;
    RrWitness wit;
};

BobSetup bob(const std::vector<GroupPoint>& H, std::size_t y, KeyCommitment::Kind kind = KeyCommitment::Kind::Address)
{
    BobSetup b{keygen("bob"), {}, {}};
    b.stmt.H_list = H;
    b.stmt.addr_b = KeyCommitment::of(kind, b.key.pk + H[y]);
    b.wit = {b.key.pk, crypto::sig_gen(b.key.sk, b.stmt.addr_b.bytes()), y};
    return b;
}

} // namespace

TEST_CASE("holds_rc")
{
    auto a = keygen("alice");
    RcStatement stmt{hash_160(a.pk), hash_p(a.pk) * G};
    CHECK(holds_rc(stmt, {a.pk}));
    CHECK_FALSE(holds_rc(RcStatement{stmt.addr_a, stmt.C + G}, {a.pk}));
    CHECK_FALSE(holds_rc(stmt, {keygen("mallory").pk}));
    CHECK_FALSE(holds_rc(stmt, {GroupPoint::identity()}));
}

TEST_CASE("holds_ra")
{
    auto s = alice(2, 0);
    CHECK(holds_ra(s.stmt, s.wit));
    // Claimed x=1 while addr_a was built from A_1's sibling.
    CHECK_FALSE(holds_ra(s.stmt, RaWitness{s.wit.a, 1}));

    auto tampered = s.stmt;
    tampered.H_list[1] = tampered.H_list[1] + G;
    CHECK_FALSE(holds_ra(tampered, s.wit));

    CHECK_FALSE(holds_ra(s.stmt, RaWitness{{s.wit.a[0]}, 0}));
    CHECK_FALSE(holds_ra(s.stmt, RaWitness{s.wit.a, 2}));
    auto dup = s.stmt;
    dup.H_list[1] = dup.H_list[0];
    CHECK_FALSE(holds_ra(dup, RaWitness{{s.wit.a[0], s.wit.a[0]}, 0}));
    auto zero = s.wit;
    zero.a[1] = Scalar();
    CHECK_FALSE(holds_ra(s.stmt, zero));

    // Enumerate every selector for n = 4: only the real one satisfies the OR.
    for (std::size_t x = 0; x < 4; ++x) {
        auto four = alice(4, x, "four");
        int satisfied = 0;
        for (std::size_t guess = 0; guess < 4; ++guess) {
            bool ok = holds_ra(four.stmt, RaWitness{four.wit.a, guess});
            CHECK(ok == (guess == x));
            satisfied += ok;
        }
        CHECK(satisfied == 1);
    }
}

TEST_CASE("holds_rr")
{
    auto s = alice(2, 0);
    for (std::size_t y = 0; y < 2; ++y) {
        auto b = bob(s.stmt.H_list, y);
        CHECK(holds_rr(b.stmt, b.wit));
        CHECK_FALSE(holds_rr(b.stmt, RrWitness{b.wit.P_b, b.wit.sigma, 1 - y}));
    }
    auto b = bob(s.stmt.H_list, 0);
    auto bad_sig = b.wit;
    bad_sig.sigma = crypto::sig_gen(keygen("other").sk, b.stmt.addr_b.bytes());
    CHECK_FALSE(holds_rr(b.stmt, bad_sig));

    // Address from a key unrelated to any P_b + H_y.
    auto stray = b.stmt;
    stray.addr_b = KeyCommitment::address(hash_160(b.key.pk + G));
    RrWitness w{b.key.pk, crypto::sig_gen(b.key.sk, stray.addr_b.bytes()), 0};
    CHECK_FALSE(holds_rr(stray, w));

    auto digest_kind = bob(s.stmt.H_list, 1, KeyCommitment::Kind::Digest);
    CHECK(digest_kind.stmt.addr_b.bytes().size() == 32);
    CHECK(holds_rr(digest_kind.stmt, digest_kind.wit));

    CHECK_FALSE(holds_rr(RrStatement{b.stmt.addr_b, {s.stmt.H_list[0]}}, b.wit));
}

TEST_CASE("holds_trace / holds_dlog / holds dispatch")
{
    auto a = keygen("alice");
    auto s = Scalar::from_u64(5);
    auto tree = trace::build_tree(a.pk, s, trace::default_transitions(), 2);
    auto sb = s.to_bytes();
    TraceStatement stmt{tree.addresses(), a.pk, trace::default_transitions(), hash_p(ByteView(sb))};
    CHECK(holds_trace(stmt, {s}));
    CHECK_FALSE(holds_trace(stmt, {Scalar::from_u64(6)}));
    auto no_lock = stmt;
    no_lock.state_lock.reset();
    CHECK(holds_trace(no_lock, {s}));
    auto swapped = stmt;
    std::swap(swapped.addr_list[1][0], swapped.addr_list[1][1]);
    CHECK_FALSE(holds_trace(swapped, {s}));

    CHECK(holds_dlog({a.pk}, {a.sk}));
    CHECK_FALSE(holds_dlog({a.pk}, {a.sk + Scalar::from_u64(1)}));
    CHECK_FALSE(holds(Statement{DLogStatement{a.pk}}, WitnessData{RcWitness{a.pk}}));
    CHECK(holds(Statement{DLogStatement{a.pk}}, WitnessData{DLogWitness{a.sk}}));
}

TEST_CASE("ideal backend: completeness and statement binding")
{
    IdealBackend backend(kSession);
    auto s = alice(3, 2);
    Statement stmt = s.stmt;
    Proof p = prove(stmt, s.wit, backend);
    CHECK(p.backend == "ideal");
    CHECK(verify(stmt, p, backend));
    CHECK(backend.recorded().count(statement_digest(stmt)) == 1);

    // Every single-field mutation invalidates the proof.
    for (std::size_t i = 0; i < s.stmt.H_list.size(); ++i) {
        auto m = s.stmt;
        m.H_list[i] = m.H_list[i] + G;
        CHECK_FALSE(verify(Statement{m}, p, backend));
    }
    auto m = s.stmt;
    m.P_a = m.P_a + G;
    CHECK_FALSE(verify(Statement{m}, p, backend));
    m = s.stmt;
    m.addr_a = KeyCommitment::address(hash_160(G));
    CHECK_FALSE(verify(Statement{m}, p, backend));
    m = s.stmt;
    m.H_list.pop_back();
    CHECK_FALSE(verify(Statement{m}, p, backend));

    // A verifier holding another session's key rejects it.
    IdealBackend other(from_hex("ff"));
    CHECK_FALSE(verify(stmt, p, other));

    auto b = bob(s.stmt.H_list, 1);
    CHECK(verify(Statement{b.stmt}, prove(b.stmt, b.wit, backend), backend));
    auto a = keygen("alice");
    RcStatement rc{hash_160(a.pk), hash_p(a.pk) * G};
    CHECK(verify(Statement{rc}, prove(rc, RcWitness{a.pk}, backend), backend));
}

TEST_CASE("ideal backend: cheating prover")
{
    IdealBackend backend(kSession);
    auto s = alice(2, 0);
    // Alice builds addr_a from a value outside the committed set.
    auto rogue = commit::gen_commitment_set("rogue", 3).at(2);
    auto cheat = s.stmt;
    cheat.addr_a = KeyCommitment::address(hash_160(s.key.pk + rogue.A));
    CHECK(error_code([&] { prove(cheat, s.wit, backend); }) == Errc::RelationUnsatisfied);
    for (std::size_t x = 0; x < 2; ++x) {
        CHECK(error_code([&] { prove(cheat, RaWitness{s.wit.a, x}, backend); }) == Errc::RelationUnsatisfied);
    }
    CHECK(backend.recorded().empty());

    // Forged attestations: random MAC, and an honest proof relabelled.
    testutil::Gen gen(11);
    Proof forged{"ideal", statement_digest(cheat), gen.bytes(32)};
    CHECK_FALSE(verify(cheat, forged, backend));
    Proof relabelled = prove(s.stmt, s.wit, backend);
    relabelled.statement_digest = statement_digest(cheat);
    CHECK_FALSE(verify(cheat, relabelled, backend));
    CHECK(error_code([&] { prove(s.stmt, DLogWitness{}, backend); }) == Errc::RelationUnsatisfied);
}

TEST_CASE("proof serialization")
{
    IdealBackend backend(kSession);
    auto s = alice(2, 1);
    Proof p = prove(s.stmt, s.wit, backend);
    auto hex = p.to_hex();
    CHECK(hex.substr(0, 2) == "01");
    CHECK(Proof::from_hex(hex) == p);
    auto bad_version = "02" + hex.substr(2);
    CHECK(error_code([&] { Proof::from_hex(bad_version); }) == Errc::Decode);
    CHECK(error_code([&] { Proof::from_hex(hex + "00"); }) == Errc::Decode);
    CHECK(error_code([&] { Proof::from_hex(hex.substr(0, 20)); }) == Errc::Decode);
}

TEST_CASE("statement JSON round trip and witness absence")
{
    auto s = alice(3, 1);
    auto b = bob(s.stmt.H_list, 2, KeyCommitment::Kind::Digest);
    auto a = keygen("alice");
    auto tree = trace::build_tree(a.pk, Scalar::from_u64(9), trace::default_transitions(), 2);
    std::vector<Statement> stmts{
        RcStatement{hash_160(a.pk), hash_p(a.pk) * G},
        s.stmt,
        b.stmt,
        TraceStatement{tree.addresses(), a.pk, trace::default_transitions(), std::nullopt},
        TraceStatement{tree.addresses(), a.pk, {trace::TransitionFn::parse("affine:3:7"), trace::TransitionFn::parse("inc")},
                       Scalar::from_u64(4)},
        DLogStatement{a.pk},
    };
    for (const auto& st : stmts) {
        auto j = to_json(st);
        auto back = statement_from_json(nlohmann::json::parse(j.dump()));
        CHECK(back == st);
        CHECK(statement_digest(back) == statement_digest(st));
    }

    // Secret values never appear in a serialized statement.
    auto dumped = to_json(stmts[1]).dump() + to_json(stmts[2]).dump() + to_json(stmts[0]).dump();
    for (const auto& t : s.set.triples()) {
        CHECK(dumped.find(t.a.to_hex()) == std::string::npos);
        CHECK(dumped.find(t.A.to_hex()) == std::string::npos);
    }
    CHECK(dumped.find(s.key.sk.to_hex()) == std::string::npos);
    CHECK(dumped.find(b.key.sk.to_hex()) == std::string::npos);
    CHECK(dumped.find(b.key.pk.to_hex()) == std::string::npos);
    CHECK(to_json(stmts[0]).dump().find(a.pk.to_hex()) == std::string::npos);

    CHECK(error_code([] { statement_from_json({{"relation", "nope"}}); }) == Errc::Decode);
}

TEST_CASE("dlog proof of knowledge")
{
    auto k = keygen("prover");
    auto ctx = as_bytes("session-1/step-8");
    Proof p = dlog_prove(k.sk, k.pk, ctx);
    CHECK(dlog_verify(k.pk, p, ctx));
    CHECK(dlog_prove(k.sk, k.pk, ctx) == p);
    CHECK_FALSE(dlog_verify(k.pk, p, as_bytes("session-2/step-8")));
    CHECK_FALSE(dlog_verify(Scalar::from_u64(2) * k.pk, p, ctx));
    CHECK_FALSE(dlog_verify(GroupPoint::identity(), p, ctx));
    CHECK(error_code([&] { dlog_prove(k.sk, k.pk + G, ctx); }) == Errc::BadWitness);

    auto tweaked = p;
    tweaked.attestation.back() ^= 1;
    CHECK_FALSE(dlog_verify(k.pk, tweaked, ctx));
    tweaked = p;
    tweaked.attestation.resize(64);
    CHECK_FALSE(dlog_verify(k.pk, tweaked, ctx));
    CHECK(dlog_verify(k.pk, Proof::from_hex(p.to_hex()), ctx));
}

TEST_CASE("dlog special soundness: extraction from two challenges")
{
    testutil::Gen gen(3);
    for (int i = 0; i < 10; ++i) {
        auto sk = gen.scalar();
        auto P = sk * G;
        auto nonce = gen.scalar();
        auto c1 = gen.bytes(8);
        auto c2 = gen.bytes(8);
        auto p1 = detail::dlog_prove_with_nonce(sk, P, c1, nonce);
        auto p2 = detail::dlog_prove_with_nonce(sk, P, c2, nonce);
        REQUIRE(dlog_verify(P, p1, c1));
        REQUIRE(dlog_verify(P, p2, c2));
        auto R = GroupPoint::from_compressed(ByteView(p1.attestation).first(33));
        REQUIRE(R == GroupPoint::from_compressed(ByteView(p2.attestation).first(33)));
        auto s1 = Scalar::from_bytes(ByteView(p1.attestation).subspan(33));
        auto s2 = Scalar::from_bytes(ByteView(p2.attestation).subspan(33));
        auto e1 = detail::dlog_challenge(P, R, c1);
        auto e2 = detail::dlog_challenge(P, R, c2);
        REQUIRE(e1 != e2);
        CHECK((s1 - s2) * (e1 - e2).inverse() == sk);
    }
}

TEST_CASE("backend registry")
{
    auto k = keygen("prover");
    auto ideal = make_backend("ideal", kSession);
    auto schnorr = make_backend("schnorr", kSession);
    CHECK(ideal->tag() == "ideal");
    CHECK(error_code([] { make_backend("groth16", {}); }) == Errc::UnknownBackend);

    Statement d = DLogStatement{k.pk};
    Proof sp = prove(d, DLogWitness{k.sk}, *schnorr);
    CHECK(verify(d, sp, *schnorr));
    CHECK_FALSE(verify(d, sp, *ideal));
    Proof ip = prove(d, DLogWitness{k.sk}, *ideal);
    CHECK(verify(d, ip, *ideal));
    CHECK_FALSE(verify(d, ip, *schnorr));
    CHECK(error_code([&] { prove(d, DLogWitness{k.sk + Scalar::from_u64(1)}, *schnorr); }) ==
          Errc::RelationUnsatisfied);

    auto s = alice(2, 0);
    CHECK(error_code([&] { prove(s.stmt, s.wit, *schnorr); }) == Errc::UnknownBackend);
    CHECK_FALSE(schnorr->verify(s.stmt, sp));
}
