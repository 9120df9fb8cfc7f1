// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

// Independent secp256k1 reference built on OpenSSL's generic EC and BN code.
// Test-only; never linked into the library.

#pragma once

#include <randlock/bytes.hpp>

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <memory>

namespace oracle {

using randlock::ByteArray;
using randlock::ByteView;

class Secp256k1 {
public:
    Secp256k1() : group_(EC_GROUP_new_by_curve_name(NID_secp256k1), EC_GROUP_free), ctx_(BN_CTX_new(), BN_CTX_free) {}

    /// k·P (P given compressed); k·G when point is empty.
    ByteArray<33> mul(ByteView k_be, ByteView point = {}) const
    {
        BIGNUM* k = BN_bin2bn(k_be.data(), static_cast<int>(k_be.size()), nullptr);
        EC_POINT* out = EC_POINT_new(group_.get());
        if (point.empty()) {
            EC_POINT_mul(group_.get(), out, k, nullptr, nullptr, ctx_.get());
        } else {
            EC_POINT* p = decode(point);
            EC_POINT_mul(group_.get(), out, nullptr, p, k, ctx_.get());
            EC_POINT_free(p);
        }
        auto enc = encode(out);
        EC_POINT_free(out);
        BN_free(k);
        return enc;
    }

    ByteArray<33> add(ByteView a, ByteView b) const
    {
        EC_POINT* pa = decode(a);
        EC_POINT* pb = decode(b);
        EC_POINT* out = EC_POINT_new(group_.get());
        EC_POINT_add(group_.get(), out, pa, pb, ctx_.get());
        auto enc = encode(out);
        EC_POINT_free(pa);
        EC_POINT_free(pb);
        EC_POINT_free(out);
        return enc;
    }

    /// (a op b) mod n for op in {'+', '*'}.
    ByteArray<32> scalar_op(ByteView a, ByteView b, char op) const
    {
        BIGNUM* x = BN_bin2bn(a.data(), static_cast<int>(a.size()), nullptr);
        BIGNUM* y = BN_bin2bn(b.data(), static_cast<int>(b.size()), nullptr);
        BIGNUM* r = BN_new();
        const BIGNUM* n = EC_GROUP_get0_order(group_.get());
        if (op == '+') BN_mod_add(r, x, y, n, ctx_.get());
        else BN_mod_mul(r, x, y, n, ctx_.get());
        ByteArray<32> out{};
        BN_bn2binpad(r, out.data(), 32);
        BN_free(x);
        BN_free(y);
        BN_free(r);
        return out;
    }

private:
    EC_POINT* decode(ByteView enc) const
    {
        EC_POINT* p = EC_POINT_new(group_.get());
        bool identity = true;
        for (auto b : enc) identity = identity && b == 0;
        if (identity) EC_POINT_set_to_infinity(group_.get(), p);
        else EC_POINT_oct2point(group_.get(), p, enc.data(), enc.size(), ctx_.get());
        return p;
    }

    ByteArray<33> encode(const EC_POINT* p) const
    {
        ByteArray<33> out{};
        if (EC_POINT_is_at_infinity(group_.get(), p)) return out;
        EC_POINT_point2oct(group_.get(), p, POINT_CONVERSION_COMPRESSED, out.data(), out.size(), ctx_.get());
        return out;
    }

    std::unique_ptr<EC_GROUP, decltype(&EC_GROUP_free)> group_;
    std::unique_ptr<BN_CTX, decltype(&BN_CTX_free)> ctx_;
};

} // namespace oracle
