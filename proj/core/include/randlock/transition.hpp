// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/secp256k1.hpp>

#include <string>
#include <vector>

namespace randlock::trace {

using crypto::Scalar;

/// State transition s -> mul·s + add over the scalar field. Affine maps are
/// total, deterministic and cheap to describe on the wire.
struct TransitionFn {
    Scalar mul = Scalar::from_u64(1);
    Scalar add;

    Scalar operator()(const Scalar& s) const { return mul * s + add; }

    /// "inc" (s+1), "dbl" (2s), "affine:<mul>:<add>" with decimal u64 operands,
    /// or "affine-hex:<mul>:<add>" with 32-byte hex scalars.
    static TransitionFn parse(std::string_view spec);
    std::string spec() const;

    friend bool operator==(const TransitionFn&, const TransitionFn&) = default;
};

/// f1(s) = s + 1, f2(s) = 2s.
std::vector<TransitionFn> default_transitions();

} // namespace randlock::trace
