// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/bytes.hpp>
#include <randlock/secp256k1.hpp>

#include <string>

namespace randlock::crypto {

/// RIPEMD160(SHA256(compressed point)).
class Address {
public:
    Address() = default;
    explicit Address(const ByteArray<20>& digest) : digest_(digest) {}
    static Address from_hex(std::string_view hex);

    const ByteArray<20>& digest() const { return digest_; }
    std::string to_hex() const;

    friend bool operator==(const Address&, const Address&) = default;
    friend auto operator<=>(const Address&, const Address&) = default;

private:
    ByteArray<20> digest_{};
};

struct KeyPair {
    Scalar sk;
    GroupPoint pk;
};

struct Signature {
    GroupPoint R;
    Scalar s;

    ByteArray<65> serialize() const;
    static Signature parse(ByteView data);
    std::string to_hex() const;
    static Signature from_hex(std::string_view hex);

    friend bool operator==(const Signature&, const Signature&) = default;
};

/// SHA256(message) as a big-endian integer reduced mod the group order.
Scalar hash_p(ByteView message);
/// hash_p over the 33-byte compressed encoding.
Scalar hash_p(const GroupPoint& point);

/// Throws Error(IdentityPoint) for the identity.
Address hash_160(const GroupPoint& point);

/// sk = hash_p(seed || counter_be32), bumping the counter until sk != 0.
KeyPair keygen(ByteView seed);
inline KeyPair keygen(std::string_view seed) { return keygen(as_bytes(seed)); }
KeyPair keypair_from_secret(const Scalar& sk);

/// Schnorr signature with nonce k = hash_p(sk || message) and challenge
/// e = hash_p(tag || R || P || message). Throws Error(ZeroKey) for sk = 0.
Signature sig_gen(const Scalar& sk, ByteView message);
/// Same, reusing the already known public key.
Signature sig_gen(const KeyPair& key, ByteView message);
/// Checks s·G == R + e·P. Malformed or degenerate inputs yield false.
bool sig_ver(const GroupPoint& pk, ByteView message, const Signature& sig);

} // namespace randlock::crypto
