// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/bytes.hpp>

#include <array>
#include <compare>
#include <cstdint>
#include <string>

namespace randlock::crypto {

namespace detail {
/// 256-bit unsigned integer, little-endian 64-bit limbs.
struct U256 {
    std::array<std::uint64_t, 4> limb{};
    friend bool operator==(const U256&, const U256&) = default;
};
} // namespace detail

/// Element of the scalar field of secp256k1 (integers mod the group order).
/// Always held in canonical reduced form.
class Scalar {
public:
    Scalar() = default;

    static Scalar from_u64(std::uint64_t v);
    /// Big-endian bytes reduced mod the group order.
    static Scalar reduce(ByteView be32);
    /// Big-endian 32 bytes; throws Error(Decode) unless the value is < order.
    static Scalar from_bytes(ByteView be32);
    static Scalar from_hex(std::string_view hex);

    ByteArray<32> to_bytes() const;
    std::string to_hex() const;

    bool is_zero() const;
    /// Modular inverse; the inverse of zero is zero.
    Scalar inverse() const;

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }

    friend bool operator==(const Scalar&, const Scalar&) = default;

    const detail::U256& raw() const { return v_; }

private:
    explicit Scalar(detail::U256 v) : v_(v) {}
    detail::U256 v_{};
};

/// Point of the secp256k1 group, stored in affine form. The identity element
/// is a valid value and has the distinguished all-zero 33-byte encoding.
class GroupPoint {
public:
    GroupPoint() = default; ///< identity

    static GroupPoint identity() { return {}; }
    static const GroupPoint& generator();
    /// k·G using the precomputed generator table.
    static GroupPoint base_mul(const Scalar& k);
    /// a·G + b·P, normalised once.
    static GroupPoint base_mul_add(const Scalar& a, const Scalar& b, const GroupPoint& P);

    /// Parses 33-byte SEC1 compressed form (or the identity encoding);
    /// throws Error(Decode) for anything not on the curve.
    static GroupPoint from_compressed(ByteView data);
    static GroupPoint from_hex(std::string_view hex);

    ByteArray<33> compress() const;
    std::string to_hex() const;

    bool is_identity() const { return infinity_; }

    GroupPoint operator+(const GroupPoint& o) const;
    GroupPoint operator-(const GroupPoint& o) const;
    GroupPoint operator-() const;
    friend GroupPoint operator*(const Scalar& k, const GroupPoint& p);

    friend bool operator==(const GroupPoint&, const GroupPoint&) = default;

private:
    friend struct PointAccess;
    detail::U256 x_{};
    detail::U256 y_{};
    bool infinity_ = true;
};

/// Group order as big-endian bytes.
ByteArray<32> group_order();

} // namespace randlock::crypto
