// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/error.hpp>
#include <randlock/hash.hpp>
#include <randlock/keys.hpp>

#include <algorithm>
#include <mutex>
#include <cstring>
#include <unordered_set>

namespace randlock::crypto {

namespace {
constexpr std::string_view kSigChallengeTag = "randlock/schnorr-challenge";

using SigKey = ByteArray<64>;
struct SigKeyHash {
    std::size_t operator()(const SigKey& k) const
    {
        std::size_t h = 0;
        std::memcpy(&h, k.data(), sizeof h); // e is a hash output already
        return h;
    }
};
}

Address Address::from_hex(std::string_view hex)
{
    return Address(array_from_hex<20>(hex));
}

std::string Address::to_hex() const
{
    return randlock::to_hex(digest_);
}

ByteArray<65> Signature::serialize() const
{
    ByteArray<65> out;
    auto r = R.compress();
    auto sb = s.to_bytes();
    std::copy(r.begin(), r.end(), out.begin());
    std::copy(sb.begin(), sb.end(), out.begin() + 33);
    return out;
}

Signature Signature::parse(ByteView data)
{
    if (data.size() != 65) throw Error(Errc::Decode, "signature must be 65 bytes");
    return {GroupPoint::from_compressed(data.subspan(0, 33)), Scalar::from_bytes(data.subspan(33, 32))};
}

std::string Signature::to_hex() const
{
    return randlock::to_hex(serialize());
}

Signature Signature::from_hex(std::string_view hex)
{
    return parse(array_from_hex<65>(hex));
}

Scalar hash_p(ByteView message)
{
    return Scalar::reduce(sha256(message));
}

Scalar hash_p(const GroupPoint& point)
{
    return hash_p(point.compress());
}

Address hash_160(const GroupPoint& point)
{
    if (point.is_identity()) throw Error(Errc::IdentityPoint, "cannot hash the identity to an address");
    return Address(ripemd160(sha256(point.compress())));
}

KeyPair keygen(ByteView seed)
{
    Bytes buf(seed.begin(), seed.end());
    buf.resize(seed.size() + 4);
    for (std::uint32_t counter = 0;; ++counter) {
        for (int i = 0; i < 4; ++i) buf[seed.size() + i] = static_cast<std::uint8_t>(counter >> (24 - 8 * i));
        Scalar sk = hash_p(buf);
        if (!sk.is_zero()) return {sk, GroupPoint::base_mul(sk)};
    }
}

KeyPair keypair_from_secret(const Scalar& sk)
{
    if (sk.is_zero()) throw Error(Errc::ZeroKey, "secret key is zero");
    return {sk, GroupPoint::base_mul(sk)};
}

namespace {
Scalar challenge(const GroupPoint& R, const GroupPoint& P, ByteView message)
{
    ByteWriter w;
    w.str(kSigChallengeTag).raw(R.compress()).raw(P.compress()).raw(message);
    return hash_p(w.bytes());
}
} // namespace

Signature sig_gen(const KeyPair& key, ByteView message)
{
    const Scalar& sk = key.sk;
    if (sk.is_zero()) throw Error(Errc::ZeroKey, "cannot sign with a zero key");
    ByteWriter w;
    w.raw(sk.to_bytes()).raw(message);
    Scalar k = hash_p(w.bytes());
    if (k.is_zero()) k = Scalar::from_u64(1); // unreachable in practice
    GroupPoint R = GroupPoint::base_mul(k);
    Scalar e = challenge(R, key.pk, message);
    return {R, k + e * sk};
}

Signature sig_gen(const Scalar& sk, ByteView message)
{
    if (sk.is_zero()) throw Error(Errc::ZeroKey, "cannot sign with a zero key");
    return sig_gen(KeyPair{sk, GroupPoint::base_mul(sk)}, message);
}

bool sig_ver(const GroupPoint& pk, ByteView message, const Signature& sig)
{
    if (pk.is_identity() || sig.R.is_identity()) return false;
    Scalar e = challenge(sig.R, pk, message);
    // e binds R, pk and the message, so (e, s) identifies a checked signature.
    // Every ledger replica verifies the same witnesses; remember the good ones.
    static std::mutex mu;
    static std::unordered_set<SigKey, SigKeyHash> valid;
    SigKey key;
    const auto eb = e.to_bytes();
    const auto sb = sig.s.to_bytes();
    std::copy(eb.begin(), eb.end(), key.begin());
    std::copy(sb.begin(), sb.end(), key.begin() + 32);
    {
        std::lock_guard lock(mu);
        if (valid.count(key)) return true;
    }
    // s·G - e·P == R
    if (!(GroupPoint::base_mul_add(sig.s, -e, pk) == sig.R)) return false;
    std::lock_guard lock(mu);
    if (valid.size() >= 1 << 16) valid.clear();
    valid.insert(std::move(key));
    return true;
}

} // namespace randlock::crypto
