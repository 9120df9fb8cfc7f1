// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/json_fields.hpp>
#include <randlock/protocol.hpp>

#include <array>
#include <set>

namespace randlock::protocol {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Flow, std::string_view>, 4> kFlows{{
    {Flow::Covenant, "covenant"},
    {Flow::OpRand, "oprand"},
    {Flow::Thimbles, "thimbles"},
    {Flow::Trace, "trace"},
}};

constexpr std::array<std::pair<Cheat, std::string_view>, 7> kCheats{{
    {Cheat::None, "none"},
    {Cheat::ChallengerBadAddr, "challenger-bad-addr"},
    {Cheat::ChallengerRevealMismatch, "challenger-reveal-mismatch"},
    {Cheat::ChallengerRefuseSign, "challenger-refuse-sign"},
    {Cheat::AccepterBadAddr, "accepter-bad-addr"},
    {Cheat::AccepterNoKey, "accepter-no-key"},
    {Cheat::AccepterStall, "accepter-stall"},
}};

constexpr std::size_t kMaxChoices = 64;

} // namespace

std::string_view flow_name(Flow flow)
{
    for (auto [f, name] : kFlows) {
        if (f == flow) return name;
    }
    return "unknown";
}

Flow parse_flow(std::string_view name)
{
    for (auto [f, n] : kFlows) {
        if (n == name) return f;
    }
    throw Error(Errc::BadConfig, "unknown flow '" + std::string(name) + "'");
}

std::string_view role_name(Role role)
{
    return role == Role::Challenger ? "alice" : "bob";
}

Role parse_role(std::string_view name)
{
    if (name == "alice" || name == "challenger") return Role::Challenger;
    if (name == "bob" || name == "accepter") return Role::Accepter;
    throw Error(Errc::BadConfig, "unknown role '" + std::string(name) + "'");
}

std::string_view cheat_name(Cheat cheat)
{
    for (auto [c, name] : kCheats) {
        if (c == cheat) return name;
    }
    return "none";
}

Cheat parse_cheat(std::string_view name)
{
    for (auto [c, n] : kCheats) {
        if (n == name) return c;
    }
    throw Error(Errc::BadConfig, "unknown cheat '" + std::string(name) + "'");
}

std::vector<Cheat> all_cheats()
{
    std::vector<Cheat> out;
    for (auto [c, name] : kCheats) {
        if (c != Cheat::None) out.push_back(c);
    }
    return out;
}

// ---- SessionConfig ----

Amount SessionConfig::deposit_amount() const
{
    if (deposit) return *deposit;
    switch (flow) {
    case Flow::Thimbles: return 5 * ledger::kCoin;
    case Flow::OpRand: return 0;
    default: return ledger::kCoin;
    }
}

std::string SessionConfig::resolved_session_id() const
{
    if (!session_id.empty()) return session_id;
    ByteWriter w;
    w.blob(as_bytes(flow_name(flow))).blob(as_bytes(alice_seed));
    return net::new_session_id(w.bytes());
}

void SessionConfig::validate(std::uint64_t height) const
{
    if (flow == Flow::Trace) throw Error(Errc::BadConfig, "the trace flow is driven by the trace tools");
    if (n < 2 || n > kMaxChoices) throw Error(Errc::BadConfig, "n must be in [2, 64]");
    if (flow != Flow::OpRand && deposit_amount() == 0) throw Error(Errc::BadConfig, "deposit must be positive");
    if (flow == Flow::Thimbles && deposit_amount() > ledger::kCoin * 10'000'000) {
        throw Error(Errc::BadConfig, "deposit too large");
    }
    if (t1 <= height) throw Error(Errc::BadConfig, "t1 must be above the current height");
    if (t2_height() <= height) throw Error(Errc::BadConfig, "t2 must be above the current height");
    if (x && *x >= n) throw Error(Errc::BadConfig, "x out of range");
    if (y && *y >= n) throw Error(Errc::BadConfig, "y out of range");
    if (backend != proofs::IdealBackend::kTag && backend != proofs::SchnorrBackend::kTag) {
        throw Error(Errc::UnknownBackend, "unknown proof backend '" + backend + "'");
    }
    // Schnorr only proves discrete logs; the composite relations need ideal.
    if (backend == proofs::SchnorrBackend::kTag) {
        throw Error(Errc::BadConfig, "the schnorr backend cannot prove the session relations");
    }
    if (!session_id.empty()) {
        bool ok = session_id.size() == 32;
        try {
            from_hex(session_id);
        } catch (const Error&) {
            ok = false;
        }
        if (!ok) throw Error(Errc::BadConfig, "session id must be 16 bytes of hex");
    }
}

json SessionConfig::public_json() const
{
    return {{"flow", flow_name(flow)},
            {"n", n},
            {"deposit", deposit_amount()},
            {"t1", t1},
            {"t2", t2_height()},
            {"backend", backend},
            {"timelocked", timelocked},
            {"covenant_spends", covenant_spends},
            {"session_id", resolved_session_id()}};
}

void SessionConfig::adopt_public(const json& j)
{
    using namespace jsonf;
    if (parse_flow(str_field(j, "flow")) != flow) throw Error(Errc::ProtocolViolation, "peer runs a different flow");
    n = uint_field(j, "n");
    deposit = uint_field(j, "deposit");
    t1 = uint_field(j, "t1");
    t2 = uint_field(j, "t2");
    backend = str_field(j, "backend");
    timelocked = bool_field(j, "timelocked");
    covenant_spends = bool_field(j, "covenant_spends");
    session_id = str_field(j, "session_id");
    if (y && *y >= n) y.reset();
    try {
        validate(0);
    } catch (const Error& e) {
        throw Error(Errc::ProtocolViolation, std::string("peer config rejected: ") + e.what());
    }
}

SessionConfig SessionConfig::from_json(const json& j)
{
    using namespace jsonf;
    static const std::set<std::string> known{"flow",       "n",           "deposit",          "t1",
                                             "t2",         "alice_seed",  "bob_seed",         "backend",
                                             "timelocked", "introspection", "cheat",          "x",
                                             "y",          "interactive_alice", "interactive_bob", "session_id",
                                             "covenant_spends"};
    if (!j.is_object()) throw Error(Errc::BadConfig, "config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw Error(Errc::BadConfig, "unknown config key '" + k + "'");
    }
    SessionConfig c;
    try {
        if (j.contains("flow")) c.flow = parse_flow(str_field(j, "flow"));
        if (j.contains("n")) c.n = uint_field(j, "n");
        if (j.contains("deposit")) c.deposit = uint_field(j, "deposit");
        if (j.contains("t1")) c.t1 = uint_field(j, "t1");
        if (j.contains("t2")) c.t2 = uint_field(j, "t2");
        if (j.contains("alice_seed")) c.alice_seed = str_field(j, "alice_seed");
        if (j.contains("bob_seed")) c.bob_seed = str_field(j, "bob_seed");
        if (j.contains("backend")) c.backend = str_field(j, "backend");
        if (j.contains("timelocked")) c.timelocked = bool_field(j, "timelocked");
        if (j.contains("covenant_spends")) c.covenant_spends = bool_field(j, "covenant_spends");
        if (j.contains("introspection")) c.introspection = bool_field(j, "introspection");
        if (j.contains("cheat")) c.cheat = parse_cheat(str_field(j, "cheat"));
        // Choices are 1-based on every external interface.
        if (j.contains("x")) c.x = uint_field(j, "x") - 1;
        if (j.contains("y")) c.y = uint_field(j, "y") - 1;
        if (j.contains("interactive_alice")) c.interactive_alice = bool_field(j, "interactive_alice");
        if (j.contains("interactive_bob")) c.interactive_bob = bool_field(j, "interactive_bob");
        if (j.contains("session_id")) c.session_id = str_field(j, "session_id");
    } catch (const Error& e) {
        if (e.code() == Errc::BadConfig) throw;
        throw Error(Errc::BadConfig, e.what());
    }
    if ((c.x && *c.x == static_cast<std::size_t>(-1)) || (c.y && *c.y == static_cast<std::size_t>(-1))) {
        throw Error(Errc::BadConfig, "choices are 1-based");
    }
    c.validate(0);
    return c;
}

// ---- reports ----

json AbortInfo::to_json() const
{
    return {{"code", errc_name(code)}, {"by", role_name(by)}, {"step", step}, {"reason", reason}};
}

std::string_view winner_name(Winner w)
{
    switch (w) {
    case Winner::Accepter: return "accepter";
    case Winner::Challenger: return "challenger";
    case Winner::ChallengerAfterTimelock: return "challenger-after-timelock";
    }
    return "unknown";
}

json OutcomeReport::to_json() const
{
    json j{{"flow", flow_name(flow)}, {"completed", completed}, {"reclaimed", reclaimed}, {"final_height", final_height}};
    j["accepter_won"] = accepter_won ? json(*accepter_won) : json(nullptr);
    j["abort"] = abort ? abort->to_json() : json(nullptr);
    if (x) j["x"] = *x + 1;
    if (y) j["y"] = *y + 1;
    try {
        j["winner"] = winner_name(adjudicate(*this));
    } catch (const Error&) {
        j["winner"] = nullptr;
    }
    return j;
}

Winner adjudicate(const OutcomeReport& report)
{
    if (report.abort) return Winner::ChallengerAfterTimelock;
    if (report.completed && report.accepter_won) return *report.accepter_won ? Winner::Accepter : Winner::Challenger;
    throw Error(Errc::Incomplete, "no verdict and no abort recorded");
}

// ---- transcript ----

json Transcript::to_json() const
{
    return {{"v", kVersion},
            {"session_id", session_id},
            {"config", config},
            {"initial_ledger", ledger::to_json(initial)},
            {"events", events},
            {"outcome", outcome}};
}

Transcript Transcript::from_json(const json& j)
{
    using namespace jsonf;
    if (uint_field(j, "v") != static_cast<std::uint64_t>(kVersion)) {
        throw Error(Errc::Decode, "unsupported transcript version");
    }
    Transcript t;
    t.session_id = str_field(j, "session_id");
    t.config = field(j, "config");
    t.initial = ledger::ledger_from_json(field(j, "initial_ledger"));
    for (const auto& e : array_field(j, "events")) t.events.push_back(e);
    t.outcome = field(j, "outcome");
    return t;
}

std::vector<net::Envelope> Transcript::envelopes() const
{
    std::vector<net::Envelope> out;
    for (const auto& e : events) {
        if (e.value("kind", "") == "message") out.push_back(net::Envelope::from_json(jsonf::field(e, "envelope")));
    }
    return out;
}

// ---- message schema ----

json message_schema()
{
    static const json schema = {
        {"abort", {"code", "reason"}},
        // thimbles
        {"offer", {"config", "P_a", "H", "addr_a", "pi_a", "tx1", "funding"}},
        {"accept", {"addr_b", "pi_r", "tx2", "funding"}},
        {"broadcast", {"tx1", "tx2"}},
        {"settle", {"tx"}},
        {"concede", json::array()},
        {"reclaim", {"height", "tx"}},
        // oprand
        {"commit", {"config", "P_c", "commitment"}},
        {"propose", {"H", "pi_a"}},
        {"choose", {"commitment", "pi_r"}},
        {"reveal", {"R_c"}},
        {"verdict", {"win", "R_a", "P_a", "pok"}},
        // covenant
        {"setup", {"config", "addr_a", "C", "pi_c", "refund", "funding"}},
        {"fund", {"P_b", "pok", "addr_b", "tx1", "funding", "refund"}},
        {"cosigned", {"tx1"}},
        {"spend", {"tx"}},
    };
    return schema;
}

void check_schema(const std::string& type, const json& payload)
{
    const auto& schema = message_schema();
    if (!schema.contains(type)) throw Error(Errc::ProtocolViolation, "unknown message type '" + type + "'");
    if (!payload.is_object()) throw Error(Errc::ProtocolViolation, "payload must be an object");
    std::set<std::string> expected;
    for (const auto& k : schema.at(type)) expected.insert(k.get<std::string>());
    std::set<std::string> got;
    for (const auto& [k, v] : payload.items()) got.insert(k);
    if (got != expected) throw Error(Errc::ProtocolViolation, "payload keys do not match the '" + type + "' schema");
}

} // namespace randlock::protocol
