// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cli.hpp"

#include <array>
#include <cstdio>
#include <iostream>
#include <memory>

namespace randlock::cli {

using nlohmann::json;
using namespace protocol;

namespace {

struct DemoOpts {
    std::string flow;
    std::string seed = "randlock";
    std::size_t n = 0;
    std::string cheat;
    std::size_t x = 0;
    std::size_t y = 0;
    std::string backend = "ideal";
    bool timelocked = false;
    bool introspection = false;
    bool as_json = false;
    bool quiet = false;
    std::string transcript;
};

int run_demo(const DemoOpts& o)
{
    SessionConfig cfg;
    cfg.flow = parse_flow(o.flow);
    cfg.n = o.n ? o.n : (cfg.flow == Flow::OpRand ? 4 : 2);
    cfg.alice_seed = role_seed(o.seed, Role::Challenger);
    cfg.bob_seed = role_seed(o.seed, Role::Accepter);
    cfg.backend = o.backend;
    cfg.timelocked = o.timelocked;
    cfg.introspection = o.introspection;
    if (!o.cheat.empty()) cfg.cheat = parse_cheat(o.cheat);
    if (o.x) cfg.x = o.x - 1;
    if (o.y) cfg.y = o.y - 1;

    auto res = run_session(cfg);
    if (!o.transcript.empty()) write_json(o.transcript, res.transcript.to_json());
    print_session(res.transcript, res.report, o.as_json, o.quiet);
    return exit_for(res.report);
}

int run_replay(const std::string& path, bool as_json)
{
    json j = read_json(path);
    if (j.is_object() && j.value("kind", "") == "fairness-summary") {
        auto again = fairness_summary(j.at("sessions").get<std::size_t>(), j.at("seed").get<std::string>());
        bool same = again == j;
        if (as_json) {
            std::cout << json{{"ok", same}, {"kind", "fairness-summary"}}.dump(2) << "\n";
        } else {
            std::cout << (same ? "ok: regenerated statistics match" : "mismatch: regenerated statistics differ") << "\n";
        }
        return same ? kOk : kVerifyFailed;
    }

    ReplayResult r;
    try {
        r = replay(Transcript::from_json(j));
    } catch (const Error& e) {
        r.ok = false;
        r.failed_event = 0;
        r.reason = std::string("unreadable transcript: ") + e.what();
    }
    if (as_json) {
        json out{{"ok", r.ok},
                 {"envelopes", r.envelopes_checked},
                 {"proofs", r.proofs_checked},
                 {"ledger_events", r.ledger_events_checked}};
        if (!r.ok) {
            out["failed_event"] = *r.failed_event;
            out["reason"] = r.reason;
        }
        std::cout << out.dump(2) << "\n";
    } else if (r.ok) {
        std::cout << "ok: " << r.envelopes_checked << " envelopes, " << r.proofs_checked << " proofs, "
                  << r.ledger_events_checked << " ledger events verified\n";
    } else {
        std::cout << "verification failed at event " << *r.failed_event << ": " << r.reason << "\n";
    }
    return r.ok ? kOk : kVerifyFailed;
}

int run_fairness(std::size_t sessions, const std::string& seed, bool as_json, const std::string& out)
{
    json s = fairness_summary(sessions, seed);
    if (!out.empty()) write_json(out, s);
    if (as_json) {
        std::cout << s.dump(2) << "\n";
        return kOk;
    }
    std::printf("sessions   %zu (%zu completed)\n", sessions, s["completed"].get<std::size_t>());
    std::printf("accepter   %zu wins\n", s["accepter_wins"].get<std::size_t>());
    std::printf("challenger %zu wins\n", s["challenger_wins"].get<std::size_t>());
    std::printf("rate       %.4f\n", s["rate"].get<double>());
    std::printf("\nexhaustive matrix (winner by x, y):\n        y=1         y=2\n");
    for (int x = 0; x < 2; ++x) {
        const auto& row = s["matrix"][x];
        std::printf("x=%d  %-11s %-11s\n", x + 1, row[0].get<std::string>().c_str(), row[1].get<std::string>().c_str());
    }
    std::printf("\nobserved choices (sessions per x, y):\n        y=1    y=2\n");
    for (int x = 0; x < 2; ++x) {
        const auto& row = s["observed"][x];
        std::printf("x=%d  %6zu %6zu\n", x + 1, row[0].get<std::size_t>(), row[1].get<std::size_t>());
    }
    return kOk;
}

} // namespace

json fairness_summary(std::size_t sessions, const std::string& seed)
{
    if (sessions == 0) throw UsageError("at least one session is needed");
    RunOptions quiet;
    quiet.record = false;
    std::size_t wins = 0;
    std::size_t losses = 0;
    std::size_t completed = 0;
    std::array<std::array<std::size_t, 2>, 2> observed{};
    for (std::size_t i = 0; i < sessions; ++i) {
        SessionConfig c;
        const auto s = seed + "/" + std::to_string(i);
        c.alice_seed = role_seed(s, Role::Challenger);
        c.bob_seed = role_seed(s, Role::Accepter);
        c.introspection = true;
        auto r = run_session(c, {}, quiet).report;
        if (!r.completed || !r.accepter_won) continue;
        ++completed;
        (*r.accepter_won ? wins : losses) += 1;
        ++observed[*r.x][*r.y];
    }

    json matrix = json::array();
    for (std::size_t x = 0; x < 2; ++x) {
        json row = json::array();
        for (std::size_t y = 0; y < 2; ++y) {
            SessionConfig c;
            c.alice_seed = role_seed(seed + "/matrix", Role::Challenger);
            c.bob_seed = role_seed(seed + "/matrix", Role::Accepter);
            c.x = x;
            c.y = y;
            auto r = run_session(c, {}, quiet).report;
            row.push_back(std::string(winner_name(adjudicate(r))));
        }
        matrix.push_back(row);
    }
    return {{"kind", "fairness-summary"},
            {"seed", seed},
            {"sessions", sessions},
            {"completed", completed},
            {"accepter_wins", wins},
            {"challenger_wins", losses},
            {"rate", static_cast<double>(wins) / static_cast<double>(sessions)},
            {"matrix", matrix},
            {"observed", {{observed[0][0], observed[0][1]}, {observed[1][0], observed[1][1]}}}};
}

void add_demo(CLI::App& app, int& code)
{
    auto o = std::make_shared<DemoOpts>();
    auto* sub = app.add_subcommand("demo", "run both parties in-process and narrate the session");
    sub->add_option("flow", o->flow, "covenant, oprand or thimbles")
        ->required()
        ->check(CLI::IsMember({"covenant", "oprand", "thimbles"}));
    add_seed(*sub, o->seed);
    sub->add_option("-n", o->n, "number of choices (default 2, oprand 4)")->check(CLI::Range(2, 256));
    add_cheat(*sub, o->cheat);
    sub->add_option("--x", o->x, "fix the challenger's choice (1-based)")->check(CLI::PositiveNumber);
    sub->add_option("--y", o->y, "fix the accepter's choice (1-based)")->check(CLI::PositiveNumber);
    sub->add_option("--backend", o->backend, "proof backend")->capture_default_str();
    sub->add_flag("--timelocked", o->timelocked, "covenant: refund branches on TX1 outputs");
    sub->add_flag("--introspection", o->introspection, "report both choices");
    auto* js = sub->add_flag("--json", o->as_json, "print the outcome as JSON");
    sub->add_flag("-q,--quiet", o->quiet, "outcome only, no narrative")->excludes(js);
    sub->add_option("--transcript", o->transcript, "write the transcript here");
    sub->callback([o, &code] { code = run_demo(*o); });
}

void add_replay(CLI::App& app, int& code)
{
    auto path = std::make_shared<std::string>();
    auto as_json = std::make_shared<bool>(false);
    auto* sub = app.add_subcommand("replay", "re-verify a transcript or a fairness summary");
    sub->add_option("file", *path, "transcript or fairness summary")->required();
    sub->add_flag("--json", *as_json, "machine-readable result");
    sub->callback([=, &code] { code = run_replay(*path, *as_json); });
}

void add_fairness(CLI::App& app, int& code)
{
    struct Opts {
        std::size_t sessions = 10000;
        std::string seed = "randlock";
        bool as_json = false;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand("fairness", "play seeded thimbles sessions and report win statistics");
    sub->add_option("-n,--sessions", o->sessions, "number of sessions")->check(CLI::PositiveNumber)->capture_default_str();
    add_seed(*sub, o->seed);
    sub->add_flag("--json", o->as_json, "print the summary as JSON");
    sub->add_option("--out", o->out, "write the summary here (replayable)");
    sub->callback([o, &code] { code = run_fairness(o->sessions, o->seed, o->as_json, o->out); });
}

} // namespace randlock::cli
