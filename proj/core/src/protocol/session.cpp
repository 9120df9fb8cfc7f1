// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "flows.hpp"

#include <randlock/json_fields.hpp>

#include <map>
#include <sstream>
#include <thread>

namespace randlock::protocol {

using nlohmann::json;
using namespace jsonf;

namespace {

json message_event(const net::Envelope& env)
{
    return {{"kind", "message"}, {"envelope", env.to_json()}};
}

// Ledger events first: a party's replica changes before its messages leave.
void flush(Party& p, std::vector<Message> msgs, net::Transport& out, std::vector<json>* events)
{
    auto ledger_events = p.take_ledger_events();
    if (events) events->insert(events->end(), ledger_events.begin(), ledger_events.end());
    for (const auto& m : msgs) {
        auto env = p.seal(m);
        if (events) events->push_back(message_event(env));
        out.send(env);
    }
}

// Receive errors that are the peer's fault abort the party locally.
std::vector<Message> on_receive_error(Party& p, const Error& e)
{
    if (e.code() == Errc::PeerTimeout) return p.timeout();
    return p.fail(e.code(), e.what());
}

} // namespace

struct LiveSession::Impl {
    SessionConfig cfg;
    LedgerState initial;
    RunOptions opts;
    std::string sid;
    std::unique_ptr<Party> alice;
    std::unique_ptr<Party> bob;
    std::unique_ptr<net::Transport> ta;
    std::unique_ptr<net::Transport> tb;
    std::vector<json> events;

    std::vector<json>* ev() { return opts.record ? &events : nullptr; }
    Party& party(Role r) { return r == Role::Challenger ? *alice : *bob; }
    net::Transport& transport(Role r) { return r == Role::Challenger ? *ta : *tb; }
};

LiveSession::LiveSession(const SessionConfig& cfg, const LedgerState& initial, const RunOptions& opts)
    : impl_(std::make_unique<Impl>())
{
    cfg.validate(initial.height());
    auto& m = *impl_;
    m.cfg = cfg;
    m.initial = initial;
    m.opts = opts;
    m.sid = cfg.resolved_session_id();
    m.alice = make_party(Role::Challenger, cfg, initial);
    m.bob = make_party(Role::Accepter, cfg, initial);
    m.alice->bind_session(m.sid);
    m.bob->bind_session(m.sid);
    auto [ta, tb] = net::make_duplex(opts.latency);
    m.ta = std::move(ta);
    m.tb = std::move(tb);
    m.ta->bind(m.sid);
    m.tb->bind(m.sid);
    for (Role r : {Role::Challenger, Role::Accepter}) flush(m.party(r), m.party(r).start(), m.transport(r), m.ev());
}

LiveSession::~LiveSession() = default;

const std::string& LiveSession::session_id() const { return impl_->sid; }
const SessionConfig& LiveSession::config() const { return impl_->cfg; }
Party& LiveSession::party(Role r) { return impl_->party(r); }
const Party& LiveSession::party(Role r) const { return impl_->party(r); }
const std::vector<json>& LiveSession::events() const { return impl_->events; }

bool LiveSession::done() const { return impl_->alice->finished() && impl_->bob->finished(); }

bool LiveSession::quiet() const { return !impl_->ta->pending() && !impl_->tb->pending(); }

bool LiveSession::pump()
{
    auto& m = *impl_;
    bool progress = false;
    for (Role r : {Role::Challenger, Role::Accepter}) {
        Party& p = m.party(r);
        net::Transport& t = m.transport(r);
        for (;;) {
            std::vector<Message> out;
            try {
                auto env = t.poll();
                if (!env) break;
                out = p.handle(*env);
            } catch (const Error& e) {
                out = on_receive_error(p, e);
            }
            flush(p, std::move(out), t, m.ev());
            progress = true;
        }
    }
    return progress;
}

void LiveSession::decide(Role r, const Decision& d)
{
    auto& m = *impl_;
    flush(m.party(r), m.party(r).decide(d), m.transport(r), m.ev());
}

void LiveSession::expire()
{
    auto& m = *impl_;
    // Whoever is still waiting gives up. Silent parties go last.
    Party* victim = nullptr;
    for (Party* p : {m.alice.get(), m.bob.get()}) {
        if (!p->finished() && !p->stalled()) {
            victim = p;
            break;
        }
    }
    if (!victim) {
        for (Party* p : {m.alice.get(), m.bob.get()}) {
            if (!p->finished()) {
                victim = p;
                break;
            }
        }
    }
    if (!victim) return;
    flush(*victim, victim->timeout(), m.transport(victim->role()), m.ev());
}

void LiveSession::expire_decision(Role r)
{
    auto& m = *impl_;
    Party& slow = m.party(r);
    Party& peer = m.party(peer_of(r));
    if (!slow.awaiting_decision()) throw Error(Errc::OutOfOrder, "no decision is pending for this player");
    if (!peer.finished()) flush(peer, peer.timeout(), m.transport(peer.role()), m.ev());
    if (!slow.finished()) flush(slow, slow.fail(Errc::PeerTimeout, "no decision before the deadline"), m.transport(r), m.ev());
}

SessionResult LiveSession::finish()
{
    while (!done()) {
        if (pump()) continue;
        if (!quiet()) {
            std::this_thread::sleep_for(std::chrono::milliseconds(1));
            continue;
        }
        expire();
    }
    return result();
}

SessionResult LiveSession::result()
{
    auto& m = *impl_;
    for (Role r : {Role::Challenger, Role::Accepter}) flush(m.party(r), {}, m.transport(r), m.ev());
    SessionResult res;
    res.report = make_report(m.cfg, m.alice.get(), m.bob.get());
    res.transcript.session_id = m.sid;
    res.transcript.config = m.cfg.public_json();
    res.transcript.initial = m.initial;
    res.transcript.outcome = res.report.to_json();
    if (m.opts.record) {
        res.ledger = merge_ledger(m.initial, m.events);
        res.transcript.events = m.events;
    } else {
        res.ledger = m.alice->ledger();
    }
    res.alice = std::move(m.alice);
    res.bob = std::move(m.bob);
    return res;
}

SessionResult run_session(const SessionConfig& cfg, const LedgerState& initial, const RunOptions& opts)
{
    return LiveSession(cfg, initial, opts).finish();
}

SessionResult covenant_run(const SessionConfig& cfg, const LedgerState& initial)
{
    auto c = cfg;
    c.flow = Flow::Covenant;
    return run_session(c, initial);
}

SessionResult oprand_run(const SessionConfig& cfg)
{
    auto c = cfg;
    c.flow = Flow::OpRand;
    return run_session(c);
}

SessionResult thimbles_run(const SessionConfig& cfg, const LedgerState& initial)
{
    auto c = cfg;
    c.flow = Flow::Thimbles;
    return run_session(c, initial);
}

void drive(Party& party, net::Transport& transport, net::Millis deadline, std::vector<json>* events,
           const net::Envelope* first)
{
    if (first && party.session_id().empty()) party.bind_session(first->session_id);
    if (transport.session().empty() && !party.session_id().empty()) transport.bind(party.session_id());
    flush(party, party.start(), transport, events);
    if (first) flush(party, party.handle(*first), transport, events);
    while (!party.finished()) {
        std::vector<Message> out;
        try {
            out = party.handle(transport.recv(deadline));
        } catch (const Error& e) {
            out = on_receive_error(party, e);
        }
        try {
            flush(party, std::move(out), transport, events);
        } catch (const Error&) {
            // Peer gone; the abort stays local.
        }
    }
    flush(party, {}, transport, events);
}

OutcomeReport make_report(const SessionConfig& cfg, const Party* alice, const Party* bob)
{
    OutcomeReport r;
    r.flow = cfg.flow;
    const Party* parties[2] = {alice, bob};
    for (const auto* p : parties) {
        if (!p) continue;
        if (!r.abort && p->abort_info()) r.abort = p->abort_info();
        if (p->timelock_reclaimed()) r.reclaimed = true;
        r.final_height = std::max(r.final_height, p->ledger().height());
    }
    bool all_finished = (!alice || alice->finished()) && (!bob || bob->finished());
    r.completed = all_finished && !r.abort;
    // The accepter learns the outcome first; the challenger confirms it.
    if (bob && bob->verdict()) {
        r.accepter_won = bob->verdict();
    } else if (alice && alice->verdict()) {
        r.accepter_won = alice->verdict();
    }
    if (cfg.introspection) {
        if (alice) r.x = alice->choice();
        if (bob) r.y = bob->choice();
    }
    return r;
}

namespace {

// Applies one ledger event; throws on anything the ledger rejects.
void apply_event(LedgerState& state, const json& e, bool dedupe)
{
    const auto op = str_field(e, "op");
    if (op == "apply") {
        auto tx = ledger::transaction_from_json(field(e, "tx"));
        auto id = ledger::txid(tx);
        if (to_hex(id) != str_field(e, "txid")) throw Error(Errc::Malformed, "txid does not match the transaction");
        if (dedupe && state.transaction(id)) return;
        state = ledger::apply_transaction(state, tx);
    } else if (op == "mint") {
        auto amount = uint_field(e, "amount");
        auto cond = ledger::condition_from_json(field(e, "cond"));
        auto label = str_field(e, "label");
        if (to_hex(ledger::mint_txid(amount, cond, label)) != str_field(e, "txid")) {
            throw Error(Errc::Malformed, "mint txid does not match");
        }
        state = ledger::mint(state, amount, cond, label).first;
    } else if (op == "advance") {
        auto h = uint_field(e, "height");
        if (h < state.height()) {
            if (dedupe) return;
            throw Error(Errc::Malformed, "height moved backwards");
        }
        state = ledger::advance_height(state, h - state.height());
    } else {
        throw Error(Errc::Malformed, "unknown ledger op '" + op + "'");
    }
}

} // namespace

LedgerState merge_ledger(const LedgerState& initial, const std::vector<json>& events)
{
    LedgerState state = initial;
    for (const auto& e : events) {
        if (e.value("kind", "") == "ledger") apply_event(state, e, true);
    }
    return state;
}

// ---- replay ----

namespace {

void collect_proofs(const json& j, std::vector<const json*>& out)
{
    if (j.is_object()) {
        if (j.contains("statement") && j.contains("proof") && j.contains("context")) {
            out.push_back(&j);
            return;
        }
        for (const auto& [k, v] : j.items()) collect_proofs(v, out);
    } else if (j.is_array()) {
        for (const auto& v : j) collect_proofs(v, out);
    }
}

bool proof_valid(const json& entry, const Bytes& sid)
{
    try {
        auto stmt = proofs::statement_from_json(field(entry, "statement"));
        auto proof = proofs::Proof::from_hex(str_field(entry, "proof"));
        auto ctx = hex_field(entry, "context");
        if (proof.backend == proofs::SchnorrBackend::kTag) {
            if (ctx.size() < sid.size() || !std::equal(sid.begin(), sid.end(), ctx.begin())) return false;
            return proofs::SchnorrBackend(ctx).verify(stmt, proof);
        }
        auto backend = proofs::make_backend(proof.backend, sid);
        return proofs::verify(stmt, proof, *backend);
    } catch (const Error&) {
        return false;
    }
}

} // namespace

ReplayResult replay(const Transcript& t)
{
    ReplayResult r;
    auto fail = [&](std::size_t i, std::string why) {
        r.ok = false;
        r.failed_event = i;
        r.reason = std::move(why);
        return r;
    };

    Bytes sid;
    try {
        sid = from_hex(t.session_id);
    } catch (const Error&) {
        return fail(0, "session id is not hex");
    }
    std::map<std::string, LedgerState> replicas{{"alice", t.initial}, {"bob", t.initial}};
    std::map<std::string, std::uint64_t> last_step;
    // A proof that does not verify is only acceptable if its receiver
    // refused it: the receiver's next message must be a ProofRejected abort.
    std::optional<std::pair<std::string, std::size_t>> awaiting_rejection;

    for (std::size_t i = 0; i < t.events.size(); ++i) {
        const auto& e = t.events[i];
        const auto kind = e.value("kind", "");
        try {
            if (kind == "message") {
                auto env = net::Envelope::from_json(field(e, "envelope"));
                if (!env.digest_ok()) return fail(i, "envelope digest mismatch");
                if (env.session_id != t.session_id) return fail(i, "envelope from another session");
                if (env.sender != "alice" && env.sender != "bob") return fail(i, "unknown sender");
                if (env.step <= last_step[env.sender]) return fail(i, "steps out of order");
                last_step[env.sender] = env.step;
                auto payload = env.payload();
                check_schema(env.type, payload);
                ++r.envelopes_checked;

                if (awaiting_rejection && awaiting_rejection->first == env.sender) {
                    bool rejected = env.type == "abort" && payload.value("code", "") == "ProofRejected";
                    if (!rejected) return fail(awaiting_rejection->second, "invalid proof was accepted");
                    awaiting_rejection.reset();
                }
                std::vector<const json*> entries;
                collect_proofs(payload, entries);
                for (const auto* entry : entries) {
                    ++r.proofs_checked;
                    if (!proof_valid(*entry, sid) && !awaiting_rejection) {
                        awaiting_rejection = {env.sender == "alice" ? "bob" : "alice", i};
                    }
                }
            } else if (kind == "ledger") {
                auto party = str_field(e, "party");
                auto it = replicas.find(party);
                if (it == replicas.end()) return fail(i, "ledger event for unknown party");
                apply_event(it->second, e, false);
                ++r.ledger_events_checked;
            } else if (kind != "decision") {
                return fail(i, "unknown event kind '" + kind + "'");
            }
        } catch (const Error& err) {
            return fail(i, err.what());
        } catch (const nlohmann::json::exception& err) {
            return fail(i, err.what());
        }
    }
    if (awaiting_rejection) return fail(awaiting_rejection->second, "invalid proof never rejected");
    return r;
}

// ---- narration ----

namespace {

std::string short_hex(const std::string& h)
{
    return h.size() > 12 ? h.substr(0, 12) + "…" : h;
}

std::string describe(const std::string& type, const json& p)
{
    auto s = [&](const char* k) { return p.contains(k) && p[k].is_string() ? short_hex(p[k].get<std::string>()) : ""; };
    if (type == "offer") return "offers " + std::to_string(p["H"].size()) + " commitments, addr_a " + s("addr_a");
    if (type == "accept") return "accepts with addr_b " + s("addr_b");
    if (type == "broadcast") return "co-signs and broadcasts TX1 and TX2";
    if (type == "settle") return "spends the pot";
    if (type == "concede") return "concedes";
    if (type == "reclaim") return "reclaims after height " + std::to_string(p.value("height", 0));
    if (type == "commit") return "publishes hash(R_c) " + s("commitment");
    if (type == "propose") return "proposes " + std::to_string(p["H"].size()) + " commitments";
    if (type == "choose") return "publishes hash(R_a) " + s("commitment");
    if (type == "reveal") return "reveals R_c " + s("R_c");
    if (type == "verdict") return std::string("reports ") + (p.value("win", false) ? "a win" : "a loss");
    if (type == "setup") return "sends addr_a " + s("addr_a") + " and C " + s("C");
    if (type == "fund") return "funds TX1 with addr_b " + s("addr_b");
    if (type == "cosigned") return "co-signs TX1";
    if (type == "spend") return "spends its covenant output";
    if (type == "abort") return "aborts: " + p.value("code", "") + " (" + p.value("reason", "") + ")";
    return type;
}

} // namespace

std::vector<std::string> narrate(const Transcript& t)
{
    std::vector<std::string> out;
    for (const auto& e : t.events) {
        const auto kind = e.value("kind", "");
        std::ostringstream line;
        if (kind == "message") {
            auto env = net::Envelope::from_json(e.at("envelope"));
            line << "step " << env.step << "  " << env.sender << " " << describe(env.type, env.payload());
        } else if (kind == "ledger") {
            line << "        [" << e.value("party", "") << " ledger] " << e.value("op", "");
            if (e.contains("txid")) line << " " << short_hex(e["txid"].get<std::string>());
            if (e.contains("height")) line << " to height " << e["height"].get<std::uint64_t>();
        } else {
            line << "        (" << kind << ")";
        }
        out.push_back(line.str());
    }
    if (t.outcome.contains("winner") && !t.outcome["winner"].is_null()) {
        out.push_back("winner: " + t.outcome["winner"].get<std::string>());
    }
    return out;
}

} // namespace randlock::protocol
