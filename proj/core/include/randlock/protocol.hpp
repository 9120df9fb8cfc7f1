// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/commitments.hpp>
#include <randlock/envelope.hpp>
#include <randlock/error.hpp>
#include <randlock/ledger.hpp>
#include <randlock/proofs.hpp>
#include <randlock/transport.hpp>

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace randlock::protocol {

using crypto::GroupPoint;
using crypto::KeyPair;
using crypto::Scalar;
using ledger::Amount;
using ledger::LedgerState;
using ledger::Transaction;

enum class Flow { Covenant, OpRand, Thimbles, Trace };
std::string_view flow_name(Flow flow);
Flow parse_flow(std::string_view name);

/// Challenger hides the selection (Alice), Accepter guesses it (Bob).
enum class Role { Challenger, Accepter };
std::string_view role_name(Role role); ///< "alice" / "bob"
Role parse_role(std::string_view name);
inline Role peer_of(Role r) { return r == Role::Challenger ? Role::Accepter : Role::Challenger; }

/// Scripted misbehaviour for adversarial runs.
enum class Cheat {
    None,
    ChallengerBadAddr,        ///< addr from a value outside the committed set (covenant: π_c forged)
    ChallengerRevealMismatch, ///< opens something other than what was committed
    ChallengerRefuseSign,     ///< stops after the accepter's message
    AccepterBadAddr,          ///< addr_b not of form P_b + H_y
    AccepterNoKey,            ///< cannot sign for P_b
    AccepterStall,            ///< stops before settling
};
std::string_view cheat_name(Cheat cheat);
Cheat parse_cheat(std::string_view name);
std::vector<Cheat> all_cheats();

struct SessionConfig {
    Flow flow = Flow::Thimbles;
    std::size_t n = 2;
    std::optional<Amount> deposit; ///< per party; defaults per flow
    std::uint64_t t1 = 10;
    std::optional<std::uint64_t> t2; ///< defaults to t1 + 10
    std::string alice_seed = "alice";
    std::string bob_seed = "bob";
    std::string backend = "ideal";
    bool timelocked = false;       ///< covenant: refund branches on TX1 outputs
    bool covenant_spends = true;   ///< covenant: run TX2/TX3 inside the session
    bool introspection = false;    ///< report exposes x, y
    bool auto_fund = true;         ///< parties mint their own deposit when missing
    Cheat cheat = Cheat::None;
    std::optional<std::size_t> x; ///< 0-based; otherwise derived from the seed
    std::optional<std::size_t> y;
    bool interactive_alice = false; ///< wait for choose/reveal decisions
    bool interactive_bob = false;
    std::string session_id;        ///< hex; derived from the alice seed when empty

    Amount deposit_amount() const;
    std::uint64_t t2_height() const { return t2.value_or(t1 + 10); }
    std::string resolved_session_id() const;
    /// Throws Error(BadConfig).
    void validate(std::uint64_t height = 0) const;

    /// Shared, non-secret part sent to the peer and stored in transcripts.
    nlohmann::json public_json() const;
    void adopt_public(const nlohmann::json& j);
    /// Full config as posted to the daemon (seeds included, all optional).
    static SessionConfig from_json(const nlohmann::json& j);
};

struct Message {
    std::string type;
    nlohmann::json payload;
};

/// Player input from a human or script.
struct Decision {
    enum class Kind { Choose, Reveal } kind = Kind::Choose;
    std::size_t index = 0; ///< 0-based
};

struct AbortInfo {
    Errc code = Errc::ProtocolViolation;
    Role by = Role::Challenger; ///< party that detected it
    std::uint64_t step = 0;     ///< last step seen by that party
    std::string reason;
    nlohmann::json to_json() const;
};

/// One party's event-driven state machine. Each call consumes one input,
/// updates the party's own ledger replica and returns messages to send.
class Party {
public:
    Party(Role role, SessionConfig cfg, LedgerState initial);
    virtual ~Party() = default;

    Role role() const { return role_; }
    const SessionConfig& config() const { return cfg_; }

    std::vector<Message> start();
    std::vector<Message> handle(const net::Envelope& env);
    /// Peer silent past the deadline: abort and take the reclaim path.
    std::vector<Message> timeout();
    /// Throws Error(OutOfOrder) when the phase does not accept the decision.
    std::vector<Message> decide(const Decision& d);

    bool finished() const { return finished_; }
    bool awaiting_decision() const { return awaiting_; }
    const std::optional<AbortInfo>& abort_info() const { return abort_; }
    const std::string& phase() const { return phase_; }

    const LedgerState& ledger() const { return ledger_; }
    /// Ledger events since the last call, in order.
    std::vector<nlohmann::json> take_ledger_events();

    /// What this party's player may see; never includes peer secrets and
    /// never the party's own key material.
    virtual nlohmann::json visible_state() const;

    void bind_session(const std::string& id) { session_id_ = id; }
    const std::string& session_id() const { return session_id_; }
    std::uint64_t last_step() const { return last_step_; }
    /// Wraps an outgoing message with the next step number and digest.
    net::Envelope seal(const Message& m);
    /// Aborts from outside the state machine (e.g. transport failures).
    std::vector<Message> fail(Errc code, const std::string& reason);

    /// Whether the accepter won, once this party knows.
    std::optional<bool> verdict() const { return verdict_; }
    bool timelock_reclaimed() const { return timelock_reclaimed_; }
    /// This party's own selection (x or y), once made.
    std::optional<std::size_t> choice() const { return choice_; }
    /// True once a scripted misbehaving party has gone silent.
    bool stalled() const { return stall_code_.has_value(); }

protected:
    virtual std::vector<Message> on_start() { return {}; }
    virtual std::vector<Message> on_message(const std::string& type, const nlohmann::json& payload) = 0;
    virtual std::vector<Message> on_decision(const Decision& d);
    /// Recover this party's own funds after an abort.
    virtual void reclaim() {}

    void set_phase(std::string p) { phase_ = std::move(p); }
    void finish() { finished_ = true; }
    void await_decision(Decision::Kind kind)
    {
        awaiting_ = true;
        expected_ = kind;
    }
    /// Scripted silence; a later timeout is reported with `code`.
    void stall(Errc code)
    {
        stall_code_ = code;
        set_phase("stalled");
    }

    void apply(const Transaction& tx);
    void advance_to(std::uint64_t height);
    /// Mints the deposit for `key` unless it already exists; returns the outpoint.
    ledger::OutPoint ensure_funding(const GroupPoint& pk, Role owner, Amount amount);
    /// The deposit output for `key` if it is on this party's ledger and unspent.
    std::optional<ledger::OutPoint> find_funding(const GroupPoint& pk, Role owner, Amount amount) const;
    /// Adds a peer's funding output announced in a message.
    void import_funding(const nlohmann::json& funding);
    nlohmann::json funding_json(const ledger::OutPoint& op) const;
    /// Spends an unspent P2PKH output owned by `key` to `to`.
    void sweep(const ledger::OutPoint& op, const KeyPair& key, const crypto::Address& to);

    Bytes session_bytes() const;
    proofs::ProofBackend& backend();
    nlohmann::json proof_entry(const proofs::Statement& stmt, const proofs::Proof& proof,
                               const Bytes& context = {}) const;
    /// Checks the entry's statement equals `expected` and the proof verifies.
    bool check_proof(const nlohmann::json& entry, const proofs::Statement& expected, const Bytes& context = {});
    std::size_t derive_choice(const std::string& seed, const char* label) const;

    SessionConfig cfg_;
    LedgerState ledger_;
    std::optional<bool> verdict_;
    bool timelock_reclaimed_ = false;
    std::optional<std::size_t> choice_;

private:
    template <class F> std::vector<Message> guarded(F&& fn);
    std::vector<Message> abort_locally(Errc code, const std::string& reason);

    Decision::Kind expected_ = Decision::Kind::Choose;
    std::optional<Errc> stall_code_;

    Role role_;
    std::string phase_ = "setup";
    bool finished_ = false;
    bool awaiting_ = false;
    std::optional<AbortInfo> abort_;
    std::vector<nlohmann::json> events_;
    std::string session_id_;
    std::uint64_t last_step_ = 0;
    std::unique_ptr<proofs::ProofBackend> backend_;
};

// ---- covenant spends ----

struct CovenantAliceState {
    KeyPair key;
    crypto::Address refund;
    Hash256 tx1{};
    bool timelocked = false;
};

struct CovenantBobState {
    KeyPair key;
    GroupPoint C;
    crypto::Address refund;
    Hash256 tx1{};
    bool timelocked = false;
};

struct SpendResult {
    LedgerState ledger;
    Transaction tx;
    GroupPoint revealed; ///< key found in the spend witness
};

/// TX2: spends TX1 output 0, revealing P_a in the witness.
SpendResult covenant_spend_alice(const CovenantAliceState& state, const LedgerState& ledger);
/// TX3: finds TX2 on the ledger, extracts P_a and spends TX1 output 1 with
/// hash_p(P_a) + sk_b. Throws Error(NotYetRevealed) while TX2 is absent.
SpendResult covenant_spend_bob(const CovenantBobState& state, const LedgerState& ledger);

// ---- sessions ----

std::unique_ptr<Party> make_party(Role role, const SessionConfig& cfg, const LedgerState& initial);

/// `base` plus both parties' deposit outputs, minted the way the parties
/// look for them.
LedgerState with_deposits(const SessionConfig& cfg, LedgerState base = {});

/// Covenant parties expose their spend state for harness-driven spends.
const CovenantAliceState* covenant_alice_state(const Party& p);
const CovenantBobState* covenant_bob_state(const Party& p);

enum class Winner { Accepter, Challenger, ChallengerAfterTimelock };
std::string_view winner_name(Winner w);

struct OutcomeReport {
    Flow flow = Flow::Thimbles;
    bool completed = false;
    std::optional<bool> accepter_won;
    std::optional<AbortInfo> abort;
    bool reclaimed = false; ///< timelock refund executed after an abort
    std::uint64_t final_height = 0;
    /// Ground truth, only when the session ran with introspection.
    std::optional<std::size_t> x;
    std::optional<std::size_t> y;

    nlohmann::json to_json() const;
};

/// Throws Error(Incomplete) when neither a verdict nor a reclaimed abort exists.
Winner adjudicate(const OutcomeReport& report);

struct Transcript {
    static constexpr int kVersion = 1;
    std::string session_id;
    nlohmann::json config;
    LedgerState initial;
    std::vector<nlohmann::json> events;
    nlohmann::json outcome;

    nlohmann::json to_json() const;
    static Transcript from_json(const nlohmann::json& j);
    std::vector<net::Envelope> envelopes() const;
};

struct SessionResult {
    OutcomeReport report;
    Transcript transcript;
    /// All ledger events merged in transcript order.
    LedgerState ledger;
    std::unique_ptr<Party> alice;
    std::unique_ptr<Party> bob;
};

struct RunOptions {
    bool record = true;
    net::Millis latency{0};
};

/// Both parties of one session in-process over a duplex channel, advanced a
/// step at a time so a host can interleave player decisions.
class LiveSession {
public:
    /// Validates the config and starts both parties.
    explicit LiveSession(const SessionConfig& cfg, const LedgerState& initial = {}, const RunOptions& opts = {});
    ~LiveSession();
    LiveSession(const LiveSession&) = delete;
    LiveSession& operator=(const LiveSession&) = delete;

    const std::string& session_id() const;
    const SessionConfig& config() const;
    Party& party(Role r);
    const Party& party(Role r) const;
    /// Transcript events so far.
    const std::vector<nlohmann::json>& events() const;

    /// Delivers every deliverable envelope; false when nothing moved.
    bool pump();
    /// Nothing in flight in either direction.
    bool quiet() const;
    bool done() const;
    /// Player input for `r`. Throws Error(OutOfOrder) out of phase.
    void decide(Role r, const Decision& d);
    /// Quiet channel with nobody able to move: the waiting party times out.
    void expire();
    /// `r` missed its decision deadline: the peer times out and reclaims,
    /// and `r` aborts and recovers its own funds.
    void expire_decision(Role r);

    /// Runs to completion, expiring quiet channels, and returns the result.
    /// The session is spent afterwards.
    SessionResult finish();
    /// Result of a session that is already done. The session is spent afterwards.
    SessionResult result();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Runs both parties in-process over a duplex channel, pumping messages on
/// the calling thread. A stall with nothing in flight counts as a peer timeout.
SessionResult run_session(const SessionConfig& cfg, const LedgerState& initial = {}, const RunOptions& opts = {});

SessionResult covenant_run(const SessionConfig& cfg, const LedgerState& initial = {});
SessionResult oprand_run(const SessionConfig& cfg);
SessionResult thimbles_run(const SessionConfig& cfg, const LedgerState& initial = {});

/// Drives one party over a transport until it finishes (threaded or
/// cross-process use). Envelopes and the party's ledger events are appended
/// to `events` when given. `first` is an envelope the caller already read,
/// e.g. to learn the flow before building the party.
void drive(Party& party, net::Transport& transport, net::Millis deadline, std::vector<nlohmann::json>* events = nullptr,
           const net::Envelope* first = nullptr);

OutcomeReport make_report(const SessionConfig& cfg, const Party* alice, const Party* bob);

/// Applies the ledger events of a transcript in order, deduplicating
/// transactions applied by both replicas. Throws on an invalid transition.
LedgerState merge_ledger(const LedgerState& initial, const std::vector<nlohmann::json>& events);

struct ReplayResult {
    bool ok = true;
    std::optional<std::size_t> failed_event;
    std::string reason;
    std::size_t proofs_checked = 0;
    std::size_t envelopes_checked = 0;
    std::size_t ledger_events_checked = 0;
};

/// Re-verifies envelope digests, step ordering, every embedded proof, and
/// every ledger transition per replica.
ReplayResult replay(const Transcript& t);

/// Human-readable account of a transcript, one line per event.
std::vector<std::string> narrate(const Transcript& t);

/// Allowed payload keys per message type.
nlohmann::json message_schema();
/// Throws Error(ProtocolViolation) if the payload has unknown or missing keys.
void check_schema(const std::string& type, const nlohmann::json& payload);

} // namespace randlock::protocol
