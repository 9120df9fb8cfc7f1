// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cli.hpp"

#include <randlock/net/daemon.hpp>
#include <randlock/net/tcp.hpp>

#include <iostream>
#include <memory>

namespace randlock::cli {

using nlohmann::json;
using namespace protocol;

namespace {

json message_event(const net::Envelope& env) { return {{"kind", "message"}, {"envelope", env.to_json()}}; }

// Records inbound envelopes so either side's transcript holds the whole
// exchange; drive() records the outbound half.
class Recording final : public net::Transport {
public:
    Recording(net::Transport& inner, std::vector<json>& events) : inner_(inner), events_(events) {}

    void send(const net::Envelope& env) override { inner_.send(env); }

    net::Envelope recv(net::Millis deadline) override
    {
        auto env = inner_.recv(deadline);
        take(env);
        return env;
    }

    std::optional<net::Envelope> poll() override
    {
        auto env = inner_.poll();
        if (env) take(*env);
        return env;
    }

    bool pending() const override { return inner_.pending(); }

private:
    void take(const net::Envelope& env)
    {
        accept(env);
        events_.push_back(message_event(env));
    }

    net::Transport& inner_;
    std::vector<json>& events_;
};

struct PlayOpts {
    std::string flow = "thimbles";
    std::string seed = "randlock";
    std::string address = "127.0.0.1";
    std::uint16_t port = 0;
    std::string connect;
    std::size_t n = 0;
    std::size_t choice = 0;
    std::string cheat;
    bool timelocked = false;
    unsigned timeout_ms = 30000;
    bool as_json = false;
    bool quiet = false;
    std::string transcript;
};

int finish_party(Party& party, std::vector<json> events, const PlayOpts& o)
{
    const Party* alice = party.role() == Role::Challenger ? &party : nullptr;
    const Party* bob = alice ? nullptr : &party;
    Transcript t;
    t.session_id = party.session_id();
    t.config = party.config().public_json();
    t.events = std::move(events);
    auto report = make_report(party.config(), alice, bob);
    t.outcome = report.to_json();
    if (!o.transcript.empty()) write_json(o.transcript, t.to_json());
    print_session(t, report, o.as_json, o.quiet);
    return exit_for(report);
}

int run_host(const PlayOpts& o)
{
    SessionConfig cfg;
    cfg.flow = parse_flow(o.flow);
    cfg.n = o.n ? o.n : (cfg.flow == Flow::OpRand ? 4 : 2);
    cfg.alice_seed = role_seed(o.seed, Role::Challenger);
    cfg.bob_seed = role_seed(o.seed, Role::Accepter);
    cfg.timelocked = o.timelocked;
    if (!o.cheat.empty()) cfg.cheat = parse_cheat(o.cheat);
    if (o.choice) cfg.x = o.choice - 1;
    cfg.validate();

    const net::Millis deadline(o.timeout_ms);
    net::TcpListener listener(o.port, o.address);
    std::cout << "hosting " << o.flow << " on " << o.address << ":" << listener.port() << std::endl;
    auto conn = listener.accept(deadline);

    auto alice = make_party(Role::Challenger, cfg, {});
    alice->bind_session(cfg.resolved_session_id());
    std::vector<json> events;
    Recording rec(*conn, events);
    drive(*alice, rec, deadline, &events);
    conn->close();
    return finish_party(*alice, std::move(events), o);
}

int run_join(const PlayOpts& o)
{
    const auto colon = o.connect.rfind(':');
    if (colon == std::string::npos) throw UsageError("--connect wants host:port");
    const auto host = o.connect.substr(0, colon);
    unsigned long port = 0;
    try {
        port = std::stoul(o.connect.substr(colon + 1));
    } catch (const std::exception&) {
        throw UsageError("bad port in --connect");
    }
    if (port == 0 || port > 65535) throw UsageError("bad port in --connect");

    const net::Millis deadline(o.timeout_ms);
    auto conn = net::tcp_connect(host, static_cast<std::uint16_t>(port), deadline);
    // The host speaks first and its opening message carries the public config.
    const auto first = conn->recv(deadline);
    const auto peer_cfg = first.payload().at("config");

    SessionConfig cfg;
    cfg.flow = parse_flow(peer_cfg.at("flow").get<std::string>());
    cfg.bob_seed = role_seed(o.seed, Role::Accepter);
    if (!o.cheat.empty()) cfg.cheat = parse_cheat(o.cheat);
    if (o.choice) cfg.y = o.choice - 1;

    auto bob = make_party(Role::Accepter, cfg, {});
    std::vector<json> events{message_event(first)};
    conn->bind(first.session_id);
    Recording rec(*conn, events);
    rec.bind(first.session_id);
    drive(*bob, rec, deadline, &events, &first);
    conn->close();
    return finish_party(*bob, std::move(events), o);
}

void add_common(CLI::App& sub, PlayOpts& o)
{
    add_seed(sub, o.seed);
    add_cheat(sub, o.cheat);
    sub.add_option("--timeout", o.timeout_ms, "peer deadline in milliseconds")->capture_default_str();
    auto* js = sub.add_flag("--json", o.as_json, "print the outcome as JSON");
    sub.add_flag("-q,--quiet", o.quiet, "outcome only, no narrative")->excludes(js);
    sub.add_option("--transcript", o.transcript, "write this side's transcript here");
}

} // namespace

void add_play(CLI::App& app, int& code)
{
    auto h = std::make_shared<PlayOpts>();
    auto* host = app.add_subcommand("host", "play the challenger, waiting for a peer on a TCP port");
    host->add_option("--flow", h->flow, "covenant, oprand or thimbles")
        ->check(CLI::IsMember({"covenant", "oprand", "thimbles"}))
        ->capture_default_str();
    host->add_option("--port", h->port, "listen port (0 picks one)")->capture_default_str();
    host->add_option("--address", h->address, "listen address")->capture_default_str();
    host->add_option("-n", h->n, "number of choices")->check(CLI::Range(2, 256));
    host->add_option("--choice", h->choice, "fix this side's selection (1-based)")->check(CLI::PositiveNumber);
    host->add_flag("--timelocked", h->timelocked, "covenant: refund branches on TX1 outputs");
    add_common(*host, *h);
    host->callback([h, &code] { code = run_host(*h); });

    auto j = std::make_shared<PlayOpts>();
    auto* join = app.add_subcommand("join", "play the accepter against a hosting peer");
    join->add_option("--connect", j->connect, "host:port")->required();
    join->add_option("--choice", j->choice, "fix this side's selection (1-based)")->check(CLI::PositiveNumber);
    add_common(*join, *j);
    join->callback([j, &code] { code = run_join(*j); });

    auto d = std::make_shared<net::DaemonConfig>();
    d->port = 8765;
    auto static_dir = std::make_shared<std::string>();
    auto decision_ms = std::make_shared<unsigned>(60000);
    auto* serve = app.add_subcommand("serve", "run the local session daemon (HTTP and WebSocket)");
    serve->add_option("--port", d->port, "listen port (0 picks one)")->capture_default_str();
    serve->add_option("--address", d->address, "listen address")->capture_default_str();
    serve->add_option("--static", *static_dir, "serve the web client from this directory")->check(CLI::ExistingDirectory);
    serve->add_option("--decision-timeout", *decision_ms, "milliseconds a player may take per decision")
        ->capture_default_str();
    serve->callback([=, &code] {
        auto cfg = *d;
        cfg.decision_timeout = std::chrono::milliseconds(*decision_ms);
        if (!static_dir->empty()) cfg.static_dir = *static_dir;
        net::Daemon daemon(cfg);
        daemon.start();
        std::cout << "serving on http://" << cfg.address << ":" << daemon.port() << std::endl;
        daemon.wait();
        code = kOk;
    });
}

} // namespace randlock::cli
