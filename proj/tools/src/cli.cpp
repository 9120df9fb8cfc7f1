// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace randlock::cli {

using nlohmann::json;
using namespace protocol;

json read_json(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::exception& e) {
        throw Error(Errc::Malformed, path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string role_seed(const std::string& seed, Role role) { return seed + "/" + std::string(role_name(role)); }

CLI::Option* add_seed(CLI::App& app, std::string& seed)
{
    return app.add_option("--seed", seed, "session seed (falls back to $RANDLOCK_SEED)")
        ->envname("RANDLOCK_SEED")
        ->capture_default_str();
}

CLI::Option* add_cheat(CLI::App& app, std::string& cheat)
{
    std::vector<std::string> names;
    for (Cheat c : all_cheats()) names.emplace_back(cheat_name(c));
    return app.add_option("--cheat", cheat, "scripted misbehaviour")->check(CLI::IsMember(names));
}

void print_session(const Transcript& t, const OutcomeReport& report, bool as_json, bool quiet)
{
    if (as_json) {
        std::cout << json{{"session_id", t.session_id}, {"outcome", report.to_json()}}.dump(2) << "\n";
        return;
    }
    if (!quiet) {
        for (const auto& line : narrate(t)) std::cout << line << "\n";
    }
    if (report.abort) {
        std::cout << "aborted: " << errc_name(report.abort->code) << " detected by " << role_name(report.abort->by)
                  << " at step " << report.abort->step << " (" << report.abort->reason << ")\n";
        if (report.reclaimed) std::cout << "deposit reclaimed after the timelock, height " << report.final_height << "\n";
    } else if (report.accepter_won) {
        std::cout << "verdict: " << (*report.accepter_won ? "accepter wins" : "challenger wins") << "\n";
    } else if (report.completed) {
        std::cout << "completed at height " << report.final_height << "\n";
    }
    if (report.x) std::cout << "x = " << *report.x + 1 << "\n";
    if (report.y) std::cout << "y = " << *report.y + 1 << "\n";
}

int exit_for(const OutcomeReport& report) { return report.abort ? kAbort : kOk; }

} // namespace randlock::cli
