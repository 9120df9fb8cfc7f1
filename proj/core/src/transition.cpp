// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/error.hpp>
#include <randlock/transition.hpp>

#include <charconv>

namespace randlock::trace {

namespace {

std::uint64_t parse_u64(std::string_view text)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw Error(Errc::BadConfig, "bad transition operand '" + std::string(text) + "'");
    }
    return v;
}

bool small(const Scalar& s, std::uint64_t& out)
{
    auto b = s.to_bytes();
    for (int i = 0; i < 24; ++i) {
        if (b[i]) return false;
    }
    out = 0;
    for (int i = 24; i < 32; ++i) out = out << 8 | b[i];
    return true;
}

} // namespace

TransitionFn TransitionFn::parse(std::string_view spec)
{
    if (spec == "inc") return {Scalar::from_u64(1), Scalar::from_u64(1)};
    if (spec == "dbl") return {Scalar::from_u64(2), Scalar()};
    constexpr std::string_view hex_prefix = "affine-hex:";
    if (spec.substr(0, hex_prefix.size()) == hex_prefix) {
        auto rest = spec.substr(hex_prefix.size());
        auto colon = rest.find(':');
        if (colon == std::string_view::npos) throw Error(Errc::BadConfig, "affine transition needs mul:add");
        try {
            return {Scalar::from_hex(rest.substr(0, colon)), Scalar::from_hex(rest.substr(colon + 1))};
        } catch (const Error&) {
            throw Error(Errc::BadConfig, "bad affine-hex operand");
        }
    }
    constexpr std::string_view prefix = "affine:";
    if (spec.substr(0, prefix.size()) == prefix) {
        auto rest = spec.substr(prefix.size());
        auto colon = rest.find(':');
        if (colon == std::string_view::npos) throw Error(Errc::BadConfig, "affine transition needs mul:add");
        return {Scalar::from_u64(parse_u64(rest.substr(0, colon))), Scalar::from_u64(parse_u64(rest.substr(colon + 1)))};
    }
    throw Error(Errc::BadConfig, "unknown transition '" + std::string(spec) + "'");
}

std::string TransitionFn::spec() const
{
    if (*this == parse("inc")) return "inc";
    if (*this == parse("dbl")) return "dbl";
    std::uint64_t m = 0;
    std::uint64_t a = 0;
    if (small(mul, m) && small(add, a)) return "affine:" + std::to_string(m) + ":" + std::to_string(a);
    return "affine-hex:" + mul.to_hex() + ":" + add.to_hex();
}

std::vector<TransitionFn> default_transitions()
{
    return {TransitionFn::parse("inc"), TransitionFn::parse("dbl")};
}

} // namespace randlock::trace
