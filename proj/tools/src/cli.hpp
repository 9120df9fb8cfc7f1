// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/protocol.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace randlock::cli {

// Stable exit-code contract.
enum Exit : int {
    kOk = 0,
    kAbort = 2,
    kVerifyFailed = 3,
    kUsage = 64,
};

// Bad arguments discovered after parsing (unreadable files and the like).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

nlohmann::json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const nlohmann::json& j);

/// Per-role seed under a shared session seed, so that host/join with one
/// seed reproduces the in-process demo exactly.
std::string role_seed(const std::string& seed, protocol::Role role);

/// Adds --seed with the RANDLOCK_SEED fallback.
CLI::Option* add_seed(CLI::App& app, std::string& seed);
/// Adds --cheat validated against the known scenarios.
CLI::Option* add_cheat(CLI::App& app, std::string& cheat);

/// Narrative (or JSON) account of a finished session on stdout.
void print_session(const protocol::Transcript& t, const protocol::OutcomeReport& report, bool json, bool quiet);
int exit_for(const protocol::OutcomeReport& report);

// Subcommand registration; each callback stores its exit code in `code`.
void add_demo(CLI::App& app, int& code);
void add_replay(CLI::App& app, int& code);
void add_fairness(CLI::App& app, int& code);
void add_ledger(CLI::App& app, int& code);
void add_trace(CLI::App& app, int& code);
void add_play(CLI::App& app, int& code);

/// Fairness run as a comparable summary; replay regenerates and compares it.
nlohmann::json fairness_summary(std::size_t sessions, const std::string& seed);

} // namespace randlock::cli
