// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/error.hpp>
#include <randlock/json_fields.hpp>

namespace randlock::jsonf {

using nlohmann::json;

const json& field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw Error(Errc::Decode, std::string("missing field '") + key + "'");
    return j.at(key);
}

std::string str_field(const json& j, const char* key)
{
    const auto& v = field(j, key);
    if (!v.is_string()) throw Error(Errc::Decode, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::uint64_t uint_field(const json& j, const char* key)
{
    const auto& v = field(j, key);
    bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    if (!ok) throw Error(Errc::Decode, std::string("field '") + key + "' must be unsigned");
    return v.get<std::uint64_t>();
}

bool bool_field(const json& j, const char* key)
{
    const auto& v = field(j, key);
    if (!v.is_boolean()) throw Error(Errc::Decode, std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
}

const json& array_field(const json& j, const char* key)
{
    const auto& v = field(j, key);
    if (!v.is_array()) throw Error(Errc::Decode, std::string("field '") + key + "' must be an array");
    return v;
}

Bytes hex_field(const json& j, const char* key)
{
    return from_hex(str_field(j, key));
}

} // namespace randlock::jsonf
