// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <doctest.h>

#include <randlock/error.hpp>
#include <randlock/hash.hpp>
#include <randlock/keys.hpp>

#include "support/openssl_oracle.hpp"
#include "support/rng.hpp"

using namespace randlock;
using namespace randlock::crypto;

namespace {
const GroupPoint& G = GroupPoint::generator();
}

TEST_CASE("hash primitives match published vectors")
{
    CHECK(to_hex(ripemd160(as_bytes("abc"))) == "8eb208f7e05d987a9b044a8e98c6b087f15a0bfc");
    CHECK(to_hex(sha256(as_bytes("abc"))) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("hash_p golden vectors")
{
    // Frozen from an independent SHA256 + mod-n computation (python hashlib).
    CHECK(hash_p(G).to_hex() == "0f715baf5d4c2ed329785cef29e562f73488c8a2bb9dbc5700b361d54b9b0554");
    CHECK(hash_p(as_bytes("a")).to_hex() == "ca978112ca1bbdcafac231b39a23dc4da786eff8147c4e72b9807785afee48bb");
    CHECK(hash_p(as_bytes("b")).to_hex() == "3e23e8160039594a33894f6564e1b1348bbd7a0088d42c4acb73eeaed59c009d");
    CHECK(hash_p(as_bytes("a")) == hash_p(as_bytes("a")));
    CHECK(hash_p(as_bytes("a")) != hash_p(as_bytes("b")));
}

TEST_CASE("hash_160")
{
    // Address of private key 1, compressed.
    CHECK(hash_160(G).to_hex() == "751e76e8199196d454941c45d1b3a323f1433bd6");
    auto P = GroupPoint::base_mul(Scalar::from_u64(12345));
    CHECK(hash_160(P) == hash_160(P));
    CHECK_THROWS_AS(hash_160(GroupPoint::identity()), Error);
    try {
        hash_160(GroupPoint::identity());
    } catch (const Error& e) {
        CHECK(e.code() == Errc::IdentityPoint);
    }
}

TEST_CASE("point encoding")
{
    CHECK(G.to_hex() == "0279be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798");
    CHECK((G + G).to_hex() == "02c6047f9441ed7d6d3045406e95c07cd85c778e4b8cef3ca7abac09b95c709ee5");
    CHECK(GroupPoint::identity().to_hex() == std::string(66, '0'));
    CHECK(GroupPoint::from_hex(std::string(66, '0')).is_identity());
    CHECK_THROWS_AS(GroupPoint::from_hex("04" + std::string(64, '1')), Error);
    // x = 0 is not on the curve (7 is not a square mod p)
    CHECK_THROWS_AS(GroupPoint::from_hex("02" + std::string(64, '0')), Error);
    CHECK_THROWS_AS(Scalar::from_bytes(group_order()), Error);
    CHECK(Scalar::reduce(group_order()).is_zero());
}

TEST_CASE("serialization round-trips bit-exactly")
{
    testutil::Gen gen(11);
    for (int i = 0; i < 100; ++i) {
        Scalar k = gen.scalar();
        CHECK(Scalar::from_bytes(k.to_bytes()) == k);
        CHECK(Scalar::from_hex(k.to_hex()) == k);
        GroupPoint P = GroupPoint::base_mul(k);
        CHECK(GroupPoint::from_compressed(P.compress()) == P);
        CHECK(GroupPoint::from_compressed(P.compress()).compress() == P.compress());
    }
}

TEST_CASE("arithmetic agrees with the OpenSSL reference")
{
    oracle::Secp256k1 ref;
    testutil::Gen gen(2026);
    for (int i = 0; i < 200; ++i) {
        Scalar a = gen.scalar();
        Scalar b = gen.scalar();
        GroupPoint A = GroupPoint::base_mul(a);
        REQUIRE(A.compress() == ref.mul(a.to_bytes()));
        GroupPoint B = GroupPoint::base_mul(b);
        CHECK((b * A).compress() == ref.mul(b.to_bytes(), A.compress()));
        CHECK((A + B).compress() == ref.add(A.compress(), B.compress()));
        CHECK((a + b).to_bytes() == ref.scalar_op(a.to_bytes(), b.to_bytes(), '+'));
        CHECK((a * b).to_bytes() == ref.scalar_op(a.to_bytes(), b.to_bytes(), '*'));
    }
    // values near the order exercise the reduction carries
    Scalar minus_one = -Scalar::from_u64(1);
    CHECK((minus_one * minus_one) == Scalar::from_u64(1));
    CHECK(GroupPoint::base_mul(minus_one).compress() == ref.mul(minus_one.to_bytes()));
    CHECK((GroupPoint::base_mul(minus_one) + G).is_identity());

    // variable-base edge scalars, including the cube root of unity mod n
    const GroupPoint P = GroupPoint::base_mul(gen.scalar());
    const Scalar lambda = Scalar::from_hex("5363ad4cc05c30e0a5261c028812645a122e22ea20816678df02967c1b23bd72");
    for (const Scalar& k : {Scalar(), Scalar::from_u64(1), Scalar::from_u64(2), Scalar::from_u64(15),
                            Scalar::from_u64(17), minus_one, lambda, -lambda, lambda * lambda}) {
        if (k.is_zero()) {
            CHECK((k * P).is_identity());
            continue;
        }
        CHECK((k * P).compress() == ref.mul(k.to_bytes(), P.compress()));
        Scalar a = gen.scalar();
        CHECK(GroupPoint::base_mul_add(a, k, P) == GroupPoint::base_mul(a) + k * P);
    }
}

TEST_CASE("group laws on sampled elements")
{
    testutil::Gen gen(7);
    for (int i = 0; i < 50; ++i) {
        Scalar a = gen.scalar();
        Scalar b = gen.scalar();
        CHECK(GroupPoint::base_mul(a + b) == GroupPoint::base_mul(a) + GroupPoint::base_mul(b));
        CHECK(a * GroupPoint::base_mul(b) == GroupPoint::base_mul(a * b));
        CHECK(GroupPoint::base_mul(a) - GroupPoint::base_mul(a) == GroupPoint::identity());
        if (!a.is_zero()) CHECK(a * a.inverse() == Scalar::from_u64(1));
    }
    CHECK(G + G == Scalar::from_u64(2) * G);
    CHECK(GroupPoint::base_mul(Scalar()).is_identity());
    CHECK(Scalar::from_u64(5) * GroupPoint::identity() == GroupPoint::identity());
}

TEST_CASE("keygen")
{
    auto k1 = keygen("alice");
    auto k2 = keygen("alice");
    auto k3 = keygen("bob");
    CHECK(k1.sk == k2.sk);
    CHECK(k1.pk == k2.pk);
    CHECK(k1.sk != k3.sk);
    CHECK(k1.pk == k1.sk * G);
    CHECK_FALSE(k1.sk.is_zero());
}

TEST_CASE("schnorr signatures")
{
    auto kp = keygen("signer");
    auto msg = as_bytes("message");
    auto sig = sig_gen(kp.sk, msg);
    CHECK(sig_ver(kp.pk, msg, sig));
    CHECK_FALSE(sig_ver(kp.pk, as_bytes("massage"), sig));
    CHECK_FALSE(sig_ver(kp.pk + G, msg, sig));
    CHECK_FALSE(sig_ver(GroupPoint::identity(), msg, sig));
    CHECK(sig_gen(kp.sk, msg) == sig); // deterministic nonce
    CHECK(Signature::parse(sig.serialize()) == sig);
    CHECK_THROWS_AS(sig_gen(Scalar(), msg), Error);

    Signature bent = sig;
    bent.s += Scalar::from_u64(1);
    CHECK_FALSE(sig_ver(kp.pk, msg, bent));
}

TEST_CASE("property: sig_ver(sk·G, m, sig_gen(sk, m)) over random seeds")
{
    testutil::Gen gen(99);
    for (int i = 0; i < 200; ++i) {
        auto kp = keygen(gen.seed_string());
        auto msg = gen.bytes(gen.below(80));
        CHECK(sig_ver(kp.sk * G, msg, sig_gen(kp.sk, msg)));
        CHECK(hash_160(kp.pk).digest().size() == 20);
    }
}
