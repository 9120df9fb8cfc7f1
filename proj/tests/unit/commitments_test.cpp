// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <doctest.h>

#include <randlock/commitments.hpp>
#include <randlock/error.hpp>

#include "support/errors.hpp"
#include "support/rng.hpp"

#include <set>

using namespace randlock;
using testutil::error_code;
using namespace randlock::commit;
using crypto::hash_160;
using crypto::keygen;

namespace {
const GroupPoint& G = GroupPoint::generator();

} // namespace

TEST_CASE("gen_commitment_set")
{
    auto a = gen_commitment_set("fixed", 2);
    auto b = gen_commitment_set("fixed", 2);
    REQUIRE(a.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(a.at(i).consistent());
        CHECK(a.at(i).a == b.at(i).a);
        CHECK(a.at(i).A == a.at(i).a * G);
        CHECK(a.at(i).h == crypto::hash_p(a.at(i).A));
        CHECK(a.at(i).H == a.at(i).h * G);
    }
    CHECK(error_code([] { gen_commitment_set("x", 1); }) == Errc::TooFew);
    CHECK(error_code([] { gen_commitment_set("x", 0); }) == Errc::TooFew);

    auto eight = gen_commitment_set("eight", 8);
    std::set<std::string> distinct;
    for (const auto& A : eight.first_rank()) distinct.insert(A.to_hex());
    CHECK(distinct.size() == 8);
    CHECK(gen_commitment_set("other", 2).at(0).a != a.at(0).a);
}

TEST_CASE("rank2 / rank3")
{
    CHECK(rank2(G).to_hex() == "0f715baf5d4c2ed329785cef29e562f73488c8a2bb9dbc5700b361d54b9b0554");
    CHECK(rank3(Scalar()).is_identity());
    CHECK(error_code([] { rank2(GroupPoint::identity()); }) == Errc::IdentityPoint);
    auto set = gen_commitment_set("ranks", 5);
    for (const auto& t : set.triples()) CHECK(rank3(rank2(t.A)) == t.H);
}

TEST_CASE("assemble / recover")
{
    testutil::Gen gen(17);
    for (int i = 0; i < 100; ++i) {
        auto P = GroupPoint::base_mul(gen.scalar());
        auto A = GroupPoint::base_mul(gen.scalar());
        auto key = assemble(P, A);
        CHECK(key.R == P + A);
        CHECK(recover(key.R, P) == A);
    }
    CHECK(error_code([] { assemble(G, -G); }) == Errc::DegenerateSum);
    CHECK(error_code([] { assemble(GroupPoint::identity(), G); }) == Errc::IdentityPoint);
    CHECK(recover(G, G).is_identity());
}

TEST_CASE("covenant key linearity: hash_160(P_b + C) is controlled by hash_p(P_a) + sk_b")
{
    auto alice = keygen("alice");
    auto bob = keygen("bob");
    auto C = GroupPoint::base_mul(crypto::hash_p(alice.pk));
    auto addr_b = hash_160(assemble(bob.pk, C).R);
    auto sk = derive_spend_key(crypto::hash_p(alice.pk), bob.sk);
    CHECK(hash_160(GroupPoint::base_mul(sk)) == addr_b);
    CHECK(GroupPoint::base_mul(sk) == bob.pk + C);

    CHECK(derive_spend_key(Scalar(), bob.sk) == bob.sk);
    CHECK(error_code([&] { derive_spend_key(-bob.sk, bob.sk); }) == Errc::ZeroKey);
}

TEST_CASE("win predicate equals index equality for n = 2..8 (exhaustive)")
{
    auto Pc = keygen("challenger").pk;
    for (std::size_t n = 2; n <= 8; ++n) {
        auto set = gen_commitment_set("win-" + std::to_string(n), n);
        for (std::size_t x = 0; x < n; ++x) {
            // challenger publishes R_C = P_C + A_x, accepter recovers A_x
            auto R = assemble(Pc, set.at(x).A).R;
            auto A_x = recover(R, Pc);
            for (std::size_t y = 0; y < n; ++y) {
                CHECK(win_check(A_x, set.at(y).H) == (x == y));
            }
        }
        CHECK_FALSE(win_check(set.at(0).A, set.at(0).H + G));
    }
    CHECK(error_code([] { win_check(GroupPoint::identity(), G); }) == Errc::IdentityPoint);
}

TEST_CASE("thimbles settlement matrix: derived key controls addr_b iff x == y")
{
    auto bob = keygen("bob");
    auto alice = keygen("alice");
    auto set = gen_commitment_set("thimbles", 2);
    int wins = 0;
    for (std::size_t x = 0; x < 2; ++x) {
        auto revealed = alice.pk + set.at(x).A; // Alice's spend witness key
        for (std::size_t y = 0; y < 2; ++y) {
            auto addr_b = hash_160(assemble(bob.pk, set.at(y).H).R);
            auto sk = derive_spend_key(rank2(recover(revealed, alice.pk)), bob.sk);
            bool controls = hash_160(GroupPoint::base_mul(sk)) == addr_b;
            CHECK(controls == (x == y));
            wins += controls;
        }
    }
    CHECK(wins == 2);
}

TEST_CASE("public part serializes only third-rank points")
{
    auto set = gen_commitment_set("wire", 3);
    auto j = public_json(set);
    CHECK(third_rank_from_json(j) == set.third_rank());
    auto dumped = j.dump();
    for (const auto& t : set.triples()) {
        CHECK(dumped.find(t.a.to_hex()) == std::string::npos);
        CHECK(dumped.find(t.A.to_hex()) == std::string::npos);
        CHECK(dumped.find(t.h.to_hex()) == std::string::npos);
    }
}
