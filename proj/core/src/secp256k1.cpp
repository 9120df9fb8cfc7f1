// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

// Variable-time secp256k1 arithmetic. Field elements are reduced with the
// special form p = 2^256 - 0x1000003D1, scalars by folding with
// 2^256 - n (a 129-bit constant). Neither is constant time.

#include <randlock/error.hpp>
#include <randlock/secp256k1.hpp>

#include <algorithm>
#include <vector>

namespace randlock::crypto {

using detail::U256;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

namespace {

constexpr U256 kFieldP{{0xFFFFFFFEFFFFFC2FULL, 0xFFFFFFFFFFFFFFFFULL, 0xFFFFFFFFFFFFFFFFULL, 0xFFFFFFFFFFFFFFFFULL}};
constexpr u64 kFieldC = 0x1000003D1ULL;

constexpr U256 kOrderN{{0xBFD25E8CD0364141ULL, 0xBAAEDCE6AF48A03BULL, 0xFFFFFFFFFFFFFFFEULL, 0xFFFFFFFFFFFFFFFFULL}};
// 2^256 - n
constexpr std::array<u64, 3> kOrderC{0x402DA1732FC9BEBFULL, 0x4551231950B75FC4ULL, 0x1ULL};

constexpr U256 kGx{{0x59F2815B16F81798ULL, 0x029BFCDB2DCE28D9ULL, 0x55A06295CE870B07ULL, 0x79BE667EF9DCBBACULL}};
constexpr U256 kGy{{0x9C47D08FFB10D4B8ULL, 0xFD17B448A6855419ULL, 0x5DA4FBFC0E1108A8ULL, 0x483ADA7726A3C465ULL}};

bool geq(const U256& a, const U256& b)
{
    for (int i = 3; i >= 0; --i) {
        if (a.limb[i] != b.limb[i]) return a.limb[i] > b.limb[i];
    }
    return true;
}

bool is_zero(const U256& a)
{
    return (a.limb[0] | a.limb[1] | a.limb[2] | a.limb[3]) == 0;
}

u64 add_raw(U256& r, const U256& a, const U256& b)
{
    u128 c = 0;
    for (int i = 0; i < 4; ++i) {
        c += static_cast<u128>(a.limb[i]) + b.limb[i];
        r.limb[i] = static_cast<u64>(c);
        c >>= 64;
    }
    return static_cast<u64>(c);
}

u64 sub_raw(U256& r, const U256& a, const U256& b)
{
    u64 borrow = 0;
    for (int i = 0; i < 4; ++i) {
        u128 d = static_cast<u128>(a.limb[i]) - b.limb[i] - borrow;
        r.limb[i] = static_cast<u64>(d);
        borrow = static_cast<u64>(d >> 64) & 1;
    }
    return borrow;
}

// (c0, c1, c2) += a·b
inline void muladd(u64 a, u64 b, u64& c0, u64& c1, u64& c2)
{
    u128 t = static_cast<u128>(a) * b;
    u64 th = static_cast<u64>(t >> 64);
    u64 tl = static_cast<u64>(t);
    c0 += tl;
    th += (c0 < tl);
    c1 += th;
    c2 += (c1 < th);
}

// (c0, c1, c2) += 2·a·b
inline void muladd2(u64 a, u64 b, u64& c0, u64& c1, u64& c2)
{
    u128 t = static_cast<u128>(a) * b;
    u64 th = static_cast<u64>(t >> 64);
    u64 tl = static_cast<u64>(t);
    u64 th2 = th + th;
    c2 += (th2 < th);
    th2 += (tl >> 63);
    u64 tl2 = tl + tl;
    c0 += tl2;
    th2 += (c0 < tl2);
    c2 += (c0 < tl2) & (th2 == 0);
    c1 += th2;
    c2 += (c1 < th2);
}

inline void extract(u64& out, u64& c0, u64& c1, u64& c2)
{
    out = c0;
    c0 = c1;
    c1 = c2;
    c2 = 0;
}

void mul_wide(const U256& x, const U256& y, u64 t[8])
{
    const u64* a = x.limb.data();
    const u64* b = y.limb.data();
    u64 c0 = 0, c1 = 0, c2 = 0;
    muladd(a[0], b[0], c0, c1, c2);
    extract(t[0], c0, c1, c2);
    muladd(a[0], b[1], c0, c1, c2);
    muladd(a[1], b[0], c0, c1, c2);
    extract(t[1], c0, c1, c2);
    muladd(a[0], b[2], c0, c1, c2);
    muladd(a[1], b[1], c0, c1, c2);
    muladd(a[2], b[0], c0, c1, c2);
    extract(t[2], c0, c1, c2);
    muladd(a[0], b[3], c0, c1, c2);
    muladd(a[1], b[2], c0, c1, c2);
    muladd(a[2], b[1], c0, c1, c2);
    muladd(a[3], b[0], c0, c1, c2);
    extract(t[3], c0, c1, c2);
    muladd(a[1], b[3], c0, c1, c2);
    muladd(a[2], b[2], c0, c1, c2);
    muladd(a[3], b[1], c0, c1, c2);
    extract(t[4], c0, c1, c2);
    muladd(a[2], b[3], c0, c1, c2);
    muladd(a[3], b[2], c0, c1, c2);
    extract(t[5], c0, c1, c2);
    muladd(a[3], b[3], c0, c1, c2);
    t[6] = c0;
    t[7] = c1;
}

void sqr_wide(const U256& x, u64 t[8])
{
    const u64* a = x.limb.data();
    u64 c0 = 0, c1 = 0, c2 = 0;
    muladd(a[0], a[0], c0, c1, c2);
    extract(t[0], c0, c1, c2);
    muladd2(a[0], a[1], c0, c1, c2);
    extract(t[1], c0, c1, c2);
    muladd2(a[0], a[2], c0, c1, c2);
    muladd(a[1], a[1], c0, c1, c2);
    extract(t[2], c0, c1, c2);
    muladd2(a[0], a[3], c0, c1, c2);
    muladd2(a[1], a[2], c0, c1, c2);
    extract(t[3], c0, c1, c2);
    muladd2(a[1], a[3], c0, c1, c2);
    muladd(a[2], a[2], c0, c1, c2);
    extract(t[4], c0, c1, c2);
    muladd2(a[2], a[3], c0, c1, c2);
    extract(t[5], c0, c1, c2);
    muladd(a[3], a[3], c0, c1, c2);
    t[6] = c0;
    t[7] = c1;
}

U256 from_be(ByteView be)
{
    U256 r;
    for (int i = 0; i < 4; ++i) {
        u64 v = 0;
        for (int j = 0; j < 8; ++j) v = v << 8 | be[i * 8 + j];
        r.limb[3 - i] = v;
    }
    return r;
}

ByteArray<32> to_be(const U256& a)
{
    ByteArray<32> out;
    for (int i = 0; i < 4; ++i) {
        u64 v = a.limb[3 - i];
        for (int j = 7; j >= 0; --j) {
            out[i * 8 + j] = static_cast<std::uint8_t>(v);
            v >>= 8;
        }
    }
    return out;
}

// ---- field mod p ----

struct Fe {
    U256 v;

    static Fe zero() { return {}; }
    static Fe one() { return {U256{{1, 0, 0, 0}}}; }

    bool is_zero() const { return crypto::is_zero(v); }
    bool operator==(const Fe& o) const { return v == o.v; }
};

// r = a + b + carry_in over four limbs; returns the carry out.
inline u64 add4(u64 r[4], const u64 a[4], const u64 b[4])
{
    u128 c = static_cast<u128>(a[0]) + b[0];
    r[0] = static_cast<u64>(c);
    c = (c >> 64) + a[1] + b[1];
    r[1] = static_cast<u64>(c);
    c = (c >> 64) + a[2] + b[2];
    r[2] = static_cast<u64>(c);
    c = (c >> 64) + a[3] + b[3];
    r[3] = static_cast<u64>(c);
    return static_cast<u64>(c >> 64);
}

// r += k; returns the carry out.
inline u64 add_small(u64 r[4], u64 k)
{
    u128 c = static_cast<u128>(r[0]) + k;
    r[0] = static_cast<u64>(c);
    c = (c >> 64) + r[1];
    r[1] = static_cast<u64>(c);
    c = (c >> 64) + r[2];
    r[2] = static_cast<u64>(c);
    c = (c >> 64) + r[3];
    r[3] = static_cast<u64>(c);
    return static_cast<u64>(c >> 64);
}

// 2^256 = C (mod p), so subtracting p is adding C and dropping the carry.
Fe fe_add(const Fe& a, const Fe& b)
{
    Fe s;
    u64 c1 = add4(s.v.limb.data(), a.v.limb.data(), b.v.limb.data());
    Fe t = s;
    u64 c2 = add_small(t.v.limb.data(), kFieldC);
    const u64 mask = 0 - (c1 | c2);
    for (int i = 0; i < 4; ++i) s.v.limb[i] = (t.v.limb[i] & mask) | (s.v.limb[i] & ~mask);
    return s;
}

Fe fe_sub(const Fe& a, const Fe& b)
{
    Fe r;
    u64 borrow = sub_raw(r.v, a.v, b.v);
    // + p is - C modulo 2^256
    u64 c = kFieldC & (0 - borrow);
    for (int i = 0; i < 4; ++i) {
        u64 old = r.v.limb[i];
        r.v.limb[i] = old - c;
        c = old < c;
    }
    return r;
}

Fe fe_neg(const Fe& a)
{
    return fe_sub(Fe::zero(), a);
}

// Folds a 512-bit product into [0, p) using 2^256 = C (mod p).
Fe fe_reduce_wide(const u64 t[8])
{
    u64 r[4];
    u128 c = static_cast<u128>(t[4]) * kFieldC + t[0];
    r[0] = static_cast<u64>(c);
    c = (c >> 64) + static_cast<u128>(t[5]) * kFieldC + t[1];
    r[1] = static_cast<u64>(c);
    c = (c >> 64) + static_cast<u128>(t[6]) * kFieldC + t[2];
    r[2] = static_cast<u64>(c);
    c = (c >> 64) + static_cast<u128>(t[7]) * kFieldC + t[3];
    r[3] = static_cast<u64>(c);
    u64 top = static_cast<u64>(c >> 64);
    // top < 2^34; fold once more, then at most one wrap remains
    c = static_cast<u128>(top) * kFieldC + r[0];
    r[0] = static_cast<u64>(c);
    c = (c >> 64) + r[1];
    r[1] = static_cast<u64>(c);
    c = (c >> 64) + r[2];
    r[2] = static_cast<u64>(c);
    c = (c >> 64) + r[3];
    r[3] = static_cast<u64>(c);
    // after a wrap r is tiny, so adding C cannot carry out
    add_small(r, kFieldC & (0 - static_cast<u64>(c >> 64)));
    Fe out{U256{{r[0], r[1], r[2], r[3]}}};
    Fe alt = out;
    const u64 mask = 0 - add_small(alt.v.limb.data(), kFieldC); // out >= p
    for (int i = 0; i < 4; ++i) out.v.limb[i] = (alt.v.limb[i] & mask) | (out.v.limb[i] & ~mask);
    return out;
}

Fe fe_mul(const Fe& a, const Fe& b)
{
    u64 t[8];
    mul_wide(a.v, b.v, t);
    return fe_reduce_wide(t);
}

Fe fe_sqr(const Fe& a)
{
    u64 t[8];
    sqr_wide(a.v, t);
    return fe_reduce_wide(t);
}

Fe fe_sqr_n(Fe a, int n)
{
    for (int i = 0; i < n; ++i) a = fe_sqr(a);
    return a;
}

Fe fe_small(const Fe& a, unsigned k)
{
    Fe r = a;
    for (unsigned i = 1; i < k; ++i) r = fe_add(r, a);
    return r;
}

// a^(2^223 - 1) and the shorter runs it is built from, shared by inversion
// and square roots.
struct PowChain {
    Fe x2, x3, x22, x223;
};

PowChain pow_chain(const Fe& a)
{
    PowChain c;
    c.x2 = fe_mul(fe_sqr(a), a);
    c.x3 = fe_mul(fe_sqr(c.x2), a);
    Fe x6 = fe_mul(fe_sqr_n(c.x3, 3), c.x3);
    Fe x9 = fe_mul(fe_sqr_n(x6, 3), c.x3);
    Fe x11 = fe_mul(fe_sqr_n(x9, 2), c.x2);
    c.x22 = fe_mul(fe_sqr_n(x11, 11), x11);
    Fe x44 = fe_mul(fe_sqr_n(c.x22, 22), c.x22);
    Fe x88 = fe_mul(fe_sqr_n(x44, 44), x44);
    Fe x176 = fe_mul(fe_sqr_n(x88, 88), x88);
    Fe x220 = fe_mul(fe_sqr_n(x176, 44), x44);
    c.x223 = fe_mul(fe_sqr_n(x220, 3), c.x3);
    return c;
}

// a^(p-2); a must be nonzero.
Fe fe_inv(const Fe& a)
{
    PowChain c = pow_chain(a);
    Fe t = fe_mul(fe_sqr_n(c.x223, 23), c.x22);
    t = fe_mul(fe_sqr_n(t, 5), a);
    t = fe_mul(fe_sqr_n(t, 3), c.x2);
    return fe_mul(fe_sqr_n(t, 2), a);
}

bool fe_sqrt(const Fe& a, Fe& out)
{
    // p = 3 mod 4: candidate root is a^((p+1)/4)
    PowChain c = pow_chain(a);
    Fe t = fe_mul(fe_sqr_n(c.x223, 23), c.x22);
    t = fe_mul(fe_sqr_n(t, 6), c.x2);
    Fe r = fe_sqr_n(t, 2);
    if (!(fe_sqr(r) == a)) return false;
    out = r;
    return true;
}

// ---- scalar mod n ----

U256 scalar_reduce_wide(const u64 in[8])
{
    std::array<u64, 8> t{};
    std::copy(in, in + 8, t.begin());
    while (t[4] | t[5] | t[6] | t[7]) {
        std::array<u64, 8> m{};
        for (int i = 0; i < 4; ++i) {
            u128 carry = 0;
            for (int j = 0; j < 3; ++j) {
                carry += static_cast<u128>(t[4 + i]) * kOrderC[j] + m[i + j];
                m[i + j] = static_cast<u64>(carry);
                carry >>= 64;
            }
            for (int k = i + 3; carry && k < 8; ++k) {
                carry += m[k];
                m[k] = static_cast<u64>(carry);
                carry >>= 64;
            }
        }
        u128 c = 0;
        for (int i = 0; i < 8; ++i) {
            c += static_cast<u128>(m[i]) + (i < 4 ? t[i] : 0);
            t[i] = static_cast<u64>(c);
            c >>= 64;
        }
    }
    U256 r{{t[0], t[1], t[2], t[3]}};
    while (geq(r, kOrderN)) sub_raw(r, r, kOrderN);
    return r;
}

// ---- points in Jacobian coordinates ----

struct Jac {
    Fe x, y, z; // z == 0 is the identity

    bool infinity() const { return z.is_zero(); }
};

Jac jac_double(const Jac& p)
{
    if (p.infinity() || p.y.is_zero()) return Jac{};
    Fe a = fe_sqr(p.x);
    Fe b = fe_sqr(p.y);
    Fe c = fe_sqr(b);
    Fe d = fe_sub(fe_sub(fe_sqr(fe_add(p.x, b)), a), c);
    d = fe_add(d, d);
    Fe e = fe_small(a, 3);
    Fe f = fe_sqr(e);
    Jac r;
    r.x = fe_sub(f, fe_add(d, d));
    Fe c8 = fe_add(c, c);
    c8 = fe_add(c8, c8);
    c8 = fe_add(c8, c8);
    r.y = fe_sub(fe_mul(e, fe_sub(d, r.x)), c8);
    Fe yz = fe_mul(p.y, p.z);
    r.z = fe_add(yz, yz);
    return r;
}

Jac jac_add(const Jac& p, const Jac& q)
{
    if (p.infinity()) return q;
    if (q.infinity()) return p;
    Fe z1z1 = fe_sqr(p.z);
    Fe z2z2 = fe_sqr(q.z);
    Fe u1 = fe_mul(p.x, z2z2);
    Fe u2 = fe_mul(q.x, z1z1);
    Fe s1 = fe_mul(fe_mul(p.y, q.z), z2z2);
    Fe s2 = fe_mul(fe_mul(q.y, p.z), z1z1);
    Fe h = fe_sub(u2, u1);
    Fe rr = fe_sub(s2, s1);
    if (h.is_zero()) {
        if (rr.is_zero()) return jac_double(p);
        return Jac{};
    }
    rr = fe_add(rr, rr);
    Fe h2 = fe_add(h, h);
    Fe i = fe_sqr(h2);
    Fe j = fe_mul(h, i);
    Fe v = fe_mul(u1, i);
    Jac r;
    r.x = fe_sub(fe_sub(fe_sqr(rr), j), fe_add(v, v));
    Fe s1j = fe_mul(s1, j);
    r.y = fe_sub(fe_mul(rr, fe_sub(v, r.x)), fe_add(s1j, s1j));
    r.z = fe_mul(fe_sub(fe_sub(fe_sqr(fe_add(p.z, q.z)), z1z1), z2z2), h);
    return r;
}

// q given in affine form (z = 1).
Jac jac_add_affine(const Jac& p, const Fe& qx, const Fe& qy)
{
    if (p.infinity()) return {qx, qy, Fe::one()};
    Fe z1z1 = fe_sqr(p.z);
    Fe u2 = fe_mul(qx, z1z1);
    Fe s2 = fe_mul(fe_mul(qy, p.z), z1z1);
    Fe h = fe_sub(u2, p.x);
    Fe rr = fe_sub(s2, p.y);
    if (h.is_zero()) {
        if (rr.is_zero()) return jac_double(p);
        return Jac{};
    }
    Fe hh = fe_sqr(h);
    Fe i = fe_add(hh, hh);
    i = fe_add(i, i);
    Fe j = fe_mul(h, i);
    rr = fe_add(rr, rr);
    Fe v = fe_mul(p.x, i);
    Jac r;
    r.x = fe_sub(fe_sub(fe_sqr(rr), j), fe_add(v, v));
    Fe y1j = fe_mul(p.y, j);
    r.y = fe_sub(fe_mul(rr, fe_sub(v, r.x)), fe_add(y1j, y1j));
    r.z = fe_sub(fe_sub(fe_sqr(fe_add(p.z, h)), z1z1), hh);
    return r;
}

Jac jac_neg(const Jac& p)
{
    return {p.x, fe_neg(p.y), p.z};
}

// Width-5 NAF digits, least significant first; each nonzero digit is odd
// and in [-15, 15].
int wnaf5(const U256& k, std::array<int, 257>& out)
{
    std::array<u64, 5> v{k.limb[0], k.limb[1], k.limb[2], k.limb[3], 0};
    auto bit_window = [&] { return static_cast<int>(v[0] & 31); };
    auto shift = [&](int n) {
        for (int i = 0; i < 4; ++i) v[i] = (v[i] >> n) | (v[i + 1] << (64 - n));
        v[4] >>= n;
    };
    auto nonzero = [&] { return (v[0] | v[1] | v[2] | v[3] | v[4]) != 0; };
    int len = 0;
    while (nonzero()) {
        int d = 0;
        if (v[0] & 1) {
            d = bit_window();
            if (d > 16) d -= 32;
            // v -= d
            if (d > 0) {
                u64 borrow = static_cast<u64>(d);
                for (int i = 0; i < 5 && borrow; ++i) {
                    u64 old = v[i];
                    v[i] -= borrow;
                    borrow = old < borrow ? 1 : 0;
                }
            } else {
                u64 carry = static_cast<u64>(-d);
                for (int i = 0; i < 5 && carry; ++i) {
                    v[i] += carry;
                    carry = v[i] < carry ? 1 : 0;
                }
            }
        }
        out[len++] = d;
        shift(1);
    }
    return len;
}

// ---- endomorphism: (x, y) -> (beta·x, y) equals lambda·(x, y) ----

constexpr U256 kBeta{{0xc1396c28719501eeULL, 0x9cf0497512f58995ULL, 0x6e64479eac3434e9ULL, 0x7ae96a2b657c0710ULL}};
constexpr U256 kLambda{{0xdf02967c1b23bd72ULL, 0x122e22ea20816678ULL, 0xa5261c028812645aULL, 0x5363ad4cc05c30e0ULL}};
// Rounded-division multipliers and the negated short basis for the split.
constexpr U256 kG1{{0xe893209a45dbb031ULL, 0x3daa8a1471e8ca7fULL, 0xe86c90e49284eb15ULL, 0x3086d221a7d46bcdULL}};
constexpr U256 kG2{{0x1571b4ae8ac47f71ULL, 0x221208ac9df506c6ULL, 0x6f547fa90abfe4c4ULL, 0xe4437ed6010e8828ULL}};
constexpr U256 kMinusB1{{0x6f547fa90abfe4c3ULL, 0xe4437ed6010e8828ULL, 0, 0}};
constexpr U256 kMinusB2{{0xd765cda83db1562cULL, 0x8a280ac50774346dULL, 0xfffffffffffffffeULL, 0xffffffffffffffffULL}};

U256 sc_mul(const U256& a, const U256& b)
{
    u64 t[8];
    mul_wide(a, b, t);
    return scalar_reduce_wide(t);
}

U256 sc_add(const U256& a, const U256& b)
{
    U256 r;
    u64 carry = add_raw(r, a, b);
    if (carry || geq(r, kOrderN)) sub_raw(r, r, kOrderN);
    return r;
}

U256 sc_neg(const U256& a)
{
    if (is_zero(a)) return a;
    U256 r;
    sub_raw(r, kOrderN, a);
    return r;
}

// round(k·g / 2^384)
U256 mul_shift_384(const U256& k, const U256& g)
{
    u64 t[8];
    mul_wide(k, g, t);
    U256 r{{t[6], t[7], 0, 0}};
    add_raw(r, r, U256{{t[5] >> 63, 0, 0, 0}});
    return r;
}

// k = k1 + k2·lambda (mod n) with |k1|, |k2| < 2^128; the magnitudes are
// returned with their signs.
struct LambdaSplit {
    U256 k1, k2;
    bool neg1 = false, neg2 = false;
};

LambdaSplit split_lambda(const U256& k)
{
    LambdaSplit s;
    U256 c1 = mul_shift_384(k, kG1);
    U256 c2 = mul_shift_384(k, kG2);
    s.k2 = sc_add(sc_mul(c1, kMinusB1), sc_mul(c2, kMinusB2));
    s.k1 = sc_add(k, sc_neg(sc_mul(s.k2, kLambda)));
    // one of r and n - r always fits in 128 bits
    if (s.k1.limb[2] | s.k1.limb[3]) {
        s.k1 = sc_neg(s.k1);
        s.neg1 = true;
    }
    if (s.k2.limb[2] | s.k2.limb[3]) {
        s.k2 = sc_neg(s.k2);
        s.neg2 = true;
    }
    return s;
}

Jac jac_scalar_mul(const Jac& p, const U256& k)
{
    const LambdaSplit s = split_lambda(k);
    // t1[i] = (2i+1)·(±p), t2[i] = (2i+1)·(±lambda·p)
    std::array<Jac, 8> t1, t2;
    t1[0] = s.neg1 ? jac_neg(p) : p;
    const Jac d = jac_double(t1[0]);
    for (int i = 1; i < 8; ++i) t1[i] = jac_add(t1[i - 1], d);
    const Fe beta{kBeta};
    for (int i = 0; i < 8; ++i) {
        t2[i] = {fe_mul(t1[i].x, beta), t1[i].y, t1[i].z};
        if (s.neg1 != s.neg2) t2[i] = jac_neg(t2[i]);
    }
    std::array<int, 257> d1{}, d2{};
    const int len1 = wnaf5(s.k1, d1);
    const int len2 = wnaf5(s.k2, d2);
    Jac r;
    for (int i = std::max(len1, len2) - 1; i >= 0; --i) {
        r = jac_double(r);
        if (d1[i] > 0) r = jac_add(r, t1[d1[i] / 2]);
        if (d1[i] < 0) r = jac_add(r, jac_neg(t1[-d1[i] / 2]));
        if (d2[i] > 0) r = jac_add(r, t2[d2[i] / 2]);
        if (d2[i] < 0) r = jac_add(r, jac_neg(t2[-d2[i] / 2]));
    }
    return r;
}

void to_affine(const Jac& p, U256& x, U256& y, bool& infinity)
{
    if (p.infinity()) {
        x = {};
        y = {};
        infinity = true;
        return;
    }
    Fe zi = fe_inv(p.z);
    Fe zi2 = fe_sqr(zi);
    x = fe_mul(p.x, zi2).v;
    y = fe_mul(p.y, fe_mul(zi2, zi)).v;
    infinity = false;
}

// Affine coordinates for many points with a single inversion.
std::vector<std::pair<Fe, Fe>> batch_affine(const std::vector<Jac>& pts)
{
    const std::size_t n = pts.size();
    std::vector<Fe> prefix(n);
    Fe acc = Fe::one();
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i] = acc;
        acc = fe_mul(acc, pts[i].z);
    }
    Fe inv = fe_inv(acc);
    std::vector<std::pair<Fe, Fe>> out(n);
    for (std::size_t i = n; i-- > 0;) {
        Fe zi = fe_mul(inv, prefix[i]);
        inv = fe_mul(inv, pts[i].z);
        Fe zi2 = fe_sqr(zi);
        out[i] = {fe_mul(pts[i].x, zi2), fe_mul(pts[i].y, fe_mul(zi2, zi))};
    }
    return out;
}

/// rows[i][j] = (j+1)·256^i·G in affine form.
struct BaseTable {
    struct Entry {
        Fe x, y;
    };
    std::vector<std::array<Entry, 255>> rows;

    BaseTable() : rows(32)
    {
        std::vector<Jac> all;
        all.reserve(32 * 256);
        Fe bx{kGx}, by{kGy};
        for (int i = 0; i < 32; ++i) {
            Jac acc{bx, by, Fe::one()};
            for (int j = 0; j < 256; ++j) {
                all.push_back(acc);
                acc = jac_add_affine(acc, bx, by);
            }
            // all[i*256 + 255] is 256·base; it becomes the next row's base
            auto next = batch_affine({all.back()});
            bx = next[0].first;
            by = next[0].second;
        }
        auto aff = batch_affine(all);
        for (int i = 0; i < 32; ++i) {
            for (int j = 0; j < 255; ++j) rows[i][j] = {aff[i * 256 + j].first, aff[i * 256 + j].second};
        }
    }
};

const BaseTable& base_table()
{
    static const BaseTable table;
    return table;
}

} // namespace

struct PointAccess {
    static Jac jac(const GroupPoint& p)
    {
        if (p.infinity_) return Jac{};
        return {Fe{p.x_}, Fe{p.y_}, Fe::one()};
    }

    static GroupPoint from_jac(const Jac& j)
    {
        GroupPoint out;
        to_affine(j, out.x_, out.y_, out.infinity_);
        return out;
    }

    static GroupPoint from_affine(const U256& x, const U256& y)
    {
        GroupPoint out;
        out.x_ = x;
        out.y_ = y;
        out.infinity_ = false;
        return out;
    }

    static const U256& x(const GroupPoint& p) { return p.x_; }
};

// ---- Scalar ----

Scalar Scalar::from_u64(std::uint64_t v)
{
    return Scalar(U256{{v, 0, 0, 0}});
}

Scalar Scalar::reduce(ByteView be32)
{
    if (be32.size() != 32) throw Error(Errc::Decode, "scalar must be 32 bytes");
    U256 v = from_be(be32);
    if (geq(v, kOrderN)) sub_raw(v, v, kOrderN);
    return Scalar(v);
}

Scalar Scalar::from_bytes(ByteView be32)
{
    if (be32.size() != 32) throw Error(Errc::Decode, "scalar must be 32 bytes");
    U256 v = from_be(be32);
    if (geq(v, kOrderN)) throw Error(Errc::Decode, "scalar not below group order");
    return Scalar(v);
}

Scalar Scalar::from_hex(std::string_view hex)
{
    return from_bytes(array_from_hex<32>(hex));
}

ByteArray<32> Scalar::to_bytes() const
{
    return to_be(v_);
}

std::string Scalar::to_hex() const
{
    return randlock::to_hex(to_bytes());
}

bool Scalar::is_zero() const
{
    return crypto::is_zero(v_);
}

Scalar Scalar::operator+(const Scalar& o) const
{
    U256 r;
    u64 carry = add_raw(r, v_, o.v_);
    if (carry || geq(r, kOrderN)) sub_raw(r, r, kOrderN);
    return Scalar(r);
}

Scalar Scalar::operator-(const Scalar& o) const
{
    U256 r;
    if (sub_raw(r, v_, o.v_)) add_raw(r, r, kOrderN);
    return Scalar(r);
}

Scalar Scalar::operator-() const
{
    return Scalar() - *this;
}

Scalar Scalar::operator*(const Scalar& o) const
{
    u64 t[8];
    mul_wide(v_, o.v_, t);
    return Scalar(scalar_reduce_wide(t));
}

Scalar Scalar::inverse() const
{
    U256 e = kOrderN;
    e.limb[0] -= 2;
    Scalar r = from_u64(1);
    for (int i = 255; i >= 0; --i) {
        r = r * r;
        if ((e.limb[i / 64] >> (i % 64)) & 1) r = r * *this;
    }
    return r;
}

ByteArray<32> group_order()
{
    return to_be(kOrderN);
}

// ---- GroupPoint ----

const GroupPoint& GroupPoint::generator()
{
    static const GroupPoint g = PointAccess::from_affine(kGx, kGy);
    return g;
}

namespace {
Jac jac_base_mul(const U256& v)
{
    const auto& table = base_table();
    Jac acc;
    for (int i = 0; i < 32; ++i) {
        unsigned byte = static_cast<unsigned>(v.limb[i / 8] >> (8 * (i % 8))) & 0xff;
        if (byte) {
            const auto& q = table.rows[i][byte - 1];
            acc = jac_add_affine(acc, q.x, q.y);
        }
    }
    return acc;
}
} // namespace

GroupPoint GroupPoint::base_mul(const Scalar& k)
{
    return PointAccess::from_jac(jac_base_mul(k.raw()));
}

GroupPoint GroupPoint::base_mul_add(const Scalar& a, const Scalar& b, const GroupPoint& P)
{
    Jac bp = P.infinity_ || b.is_zero() ? Jac{} : jac_scalar_mul(PointAccess::jac(P), b.raw());
    return PointAccess::from_jac(jac_add(jac_base_mul(a.raw()), bp));
}

GroupPoint GroupPoint::from_compressed(ByteView data)
{
    if (data.size() != 33) throw Error(Errc::Decode, "compressed point must be 33 bytes");
    if (std::all_of(data.begin(), data.end(), [](std::uint8_t b) { return b == 0; })) return identity();
    std::uint8_t prefix = data[0];
    if (prefix != 0x02 && prefix != 0x03) throw Error(Errc::Decode, "bad point prefix");
    U256 xv = from_be(data.subspan(1, 32));
    if (geq(xv, kFieldP)) throw Error(Errc::Decode, "x coordinate not in field");
    Fe x{xv};
    Fe rhs = fe_add(fe_mul(fe_sqr(x), x), Fe{U256{{7, 0, 0, 0}}});
    Fe y;
    if (!fe_sqrt(rhs, y)) throw Error(Errc::Decode, "point not on curve");
    if ((y.v.limb[0] & 1) != (prefix & 1)) y = fe_neg(y);
    return PointAccess::from_affine(x.v, y.v);
}

GroupPoint GroupPoint::from_hex(std::string_view hex)
{
    return from_compressed(array_from_hex<33>(hex));
}

ByteArray<33> GroupPoint::compress() const
{
    ByteArray<33> out{};
    if (infinity_) return out;
    out[0] = static_cast<std::uint8_t>(0x02 | (y_.limb[0] & 1));
    auto xb = to_be(x_);
    std::copy(xb.begin(), xb.end(), out.begin() + 1);
    return out;
}

std::string GroupPoint::to_hex() const
{
    return randlock::to_hex(compress());
}

GroupPoint GroupPoint::operator+(const GroupPoint& o) const
{
    return PointAccess::from_jac(jac_add(PointAccess::jac(*this), PointAccess::jac(o)));
}

GroupPoint GroupPoint::operator-() const
{
    return PointAccess::from_jac(jac_neg(PointAccess::jac(*this)));
}

GroupPoint GroupPoint::operator-(const GroupPoint& o) const
{
    return *this + (-o);
}

GroupPoint operator*(const Scalar& k, const GroupPoint& p)
{
    if (p == GroupPoint::generator()) return GroupPoint::base_mul(k);
    return PointAccess::from_jac(jac_scalar_mul(PointAccess::jac(p), k.raw()));
}

} // namespace randlock::crypto
