// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/bytes.hpp>
#include <randlock/error.hpp>

#include <algorithm>

namespace randlock {

namespace {
int hex_value(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
} // namespace

std::string to_hex(ByteView data)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

Bytes from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0) throw Error(Errc::Decode, "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_value(hex[2 * i]);
        int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error(Errc::Decode, "invalid hex character");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

template <std::size_t N>
ByteArray<N> array_from_hex(std::string_view hex)
{
    if (hex.size() != 2 * N) throw Error(Errc::Decode, "expected " + std::to_string(2 * N) + " hex chars");
    auto bytes = from_hex(hex);
    ByteArray<N> out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

template ByteArray<16> array_from_hex<16>(std::string_view);
template ByteArray<20> array_from_hex<20>(std::string_view);
template ByteArray<32> array_from_hex<32>(std::string_view);
template ByteArray<33> array_from_hex<33>(std::string_view);
template ByteArray<65> array_from_hex<65>(std::string_view);

ByteWriter& ByteWriter::u8(std::uint8_t v)
{
    buf_.push_back(v);
    return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
}

ByteWriter& ByteWriter::varint(std::uint64_t v)
{
    if (v < 0xfd) return u8(static_cast<std::uint8_t>(v));
    if (v <= 0xffff) {
        u8(0xfd);
        buf_.push_back(static_cast<std::uint8_t>(v));
        buf_.push_back(static_cast<std::uint8_t>(v >> 8));
        return *this;
    }
    if (v <= 0xffffffff) return u8(0xfe).u32(static_cast<std::uint32_t>(v));
    return u8(0xff).u64(v);
}

ByteWriter& ByteWriter::raw(ByteView data)
{
    buf_.insert(buf_.end(), data.begin(), data.end());
    return *this;
}

ByteWriter& ByteWriter::blob(ByteView data)
{
    return varint(data.size()).raw(data);
}

ByteView ByteReader::raw(std::size_t n)
{
    if (data_.size() - pos_ < n) throw Error(Errc::Decode, "unexpected end of encoding");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t ByteReader::u8()
{
    return raw(1)[0];
}

std::uint32_t ByteReader::u32()
{
    auto b = raw(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = v << 8 | b[i];
    return v;
}

std::uint64_t ByteReader::u64()
{
    auto b = raw(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | b[i];
    return v;
}

std::uint64_t ByteReader::varint()
{
    auto tag = u8();
    if (tag < 0xfd) return tag;
    if (tag == 0xfd) {
        auto b = raw(2);
        return static_cast<std::uint64_t>(b[0]) | static_cast<std::uint64_t>(b[1]) << 8;
    }
    if (tag == 0xfe) return u32();
    return u64();
}

Bytes ByteReader::blob()
{
    auto n = varint();
    auto b = raw(n);
    return {b.begin(), b.end()};
}

} // namespace randlock
