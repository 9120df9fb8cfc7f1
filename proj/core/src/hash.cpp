// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#define OPENSSL_SUPPRESS_DEPRECATED
#include <randlock/hash.hpp>

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/ripemd.h>
#include <openssl/sha.h>

namespace randlock::crypto {

Hash256 sha256(ByteView data)
{
    Hash256 out;
    SHA256(data.data(), data.size(), out.data());
    return out;
}

ByteArray<20> ripemd160(ByteView data)
{
    // The EVP ripemd160 lives in the legacy provider on OpenSSL 3; the
    // low-level entry point does not.
    ByteArray<20> out;
    RIPEMD160(data.data(), data.size(), out.data());
    return out;
}

Hash256 hmac_sha256(ByteView key, ByteView data)
{
    Hash256 out;
    unsigned int len = 0;
    HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len);
    return out;
}

Hash256 tagged_sha256(std::string_view tag, ByteView data)
{
    SHA256_CTX ctx;
    SHA256_Init(&ctx);
    SHA256_Update(&ctx, tag.data(), tag.size());
    SHA256_Update(&ctx, data.data(), data.size());
    Hash256 out;
    SHA256_Final(out.data(), &ctx);
    return out;
}

} // namespace randlock::crypto
