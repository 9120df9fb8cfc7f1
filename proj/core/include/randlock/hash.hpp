// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/bytes.hpp>

namespace randlock::crypto {

Hash256 sha256(ByteView data);
ByteArray<20> ripemd160(ByteView data);
Hash256 hmac_sha256(ByteView key, ByteView data);

/// SHA256 over `tag || data`.
Hash256 tagged_sha256(std::string_view tag, ByteView data);

} // namespace randlock::crypto
