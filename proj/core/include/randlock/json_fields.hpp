// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/bytes.hpp>

#include <nlohmann/json.hpp>

#include <string>

/// Strict accessors for decoding wire JSON; all throw Error(Decode).
namespace randlock::jsonf {

const nlohmann::json& field(const nlohmann::json& j, const char* key);
std::string str_field(const nlohmann::json& j, const char* key);
std::uint64_t uint_field(const nlohmann::json& j, const char* key);
bool bool_field(const nlohmann::json& j, const char* key);
const nlohmann::json& array_field(const nlohmann::json& j, const char* key);
Bytes hex_field(const nlohmann::json& j, const char* key);

} // namespace randlock::jsonf
