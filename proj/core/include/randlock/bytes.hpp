// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace randlock {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
template <std::size_t N>
using ByteArray = std::array<std::uint8_t, N>;

/// 32-byte digest (txids, sighashes, statement digests).
using Hash256 = ByteArray<32>;

std::string to_hex(ByteView data);
/// Throws Error(Decode) on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

template <std::size_t N>
ByteArray<N> array_from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s)
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// Append-only little-endian writer for the canonical binary encodings.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v);
    ByteWriter& u32(std::uint32_t v);
    ByteWriter& u64(std::uint64_t v);
    /// Bitcoin-style CompactSize.
    ByteWriter& varint(std::uint64_t v);
    ByteWriter& raw(ByteView data);
    ByteWriter& str(std::string_view s) { return raw(as_bytes(s)); }
    /// varint length prefix followed by the bytes.
    ByteWriter& blob(ByteView data);

    const Bytes& bytes() const& { return buf_; }
    Bytes bytes() && { return std::move(buf_); }

private:
    Bytes buf_;
};

/// Cursor over an encoding produced by ByteWriter; throws Error(Decode) on underrun.
class ByteReader {
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::uint64_t varint();
    ByteView raw(std::size_t n);
    Bytes blob();
    bool empty() const { return pos_ == data_.size(); }

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

} // namespace randlock
