// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <doctest.h>

#include <randlock/error.hpp>

namespace testutil {

/// Runs fn and returns the code of the randlock::Error it throws.
inline randlock::Errc error_code(auto&& fn)
{
    try {
        fn();
    } catch (const randlock::Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return randlock::Errc::Decode;
}

} // namespace testutil
