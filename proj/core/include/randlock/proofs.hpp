// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <randlock/bytes.hpp>
#include <randlock/keys.hpp>
#include <randlock/transition.hpp>

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace randlock::proofs {

using crypto::Address;
using crypto::GroupPoint;
using crypto::Scalar;
using crypto::Signature;

/// How an assembled key is pinned down publicly. Game flows use the
/// hash160 address; the bare OP_RAND emulation uses a hash_p digest.
class KeyCommitment {
public:
    enum class Kind : std::uint8_t { Address = 1, Digest = 2 };

    KeyCommitment() = default;
    static KeyCommitment address(const Address& a);
    static KeyCommitment digest(const Scalar& d);
    static KeyCommitment of(Kind kind, const GroupPoint& key);

    Kind kind() const { return kind_; }
    /// The committed bytes: 20-byte address or 32-byte digest. This is
    /// also the message signed by σ in the RR relation.
    const Bytes& bytes() const { return bytes_; }
    bool matches(const GroupPoint& key) const;

    nlohmann::json to_json() const;
    static KeyCommitment from_json(const nlohmann::json& j);

    friend bool operator==(const KeyCommitment&, const KeyCommitment&) = default;

private:
    Kind kind_ = Kind::Address;
    Bytes bytes_ = Bytes(20, 0);
};

struct RcStatement {
    Address addr_a;
    GroupPoint C;
    friend bool operator==(const RcStatement&, const RcStatement&) = default;
};

struct RaStatement {
    std::vector<GroupPoint> H_list;
    GroupPoint P_a;
    KeyCommitment addr_a;
    friend bool operator==(const RaStatement&, const RaStatement&) = default;
};

struct RrStatement {
    KeyCommitment addr_b;
    std::vector<GroupPoint> H_list;
    friend bool operator==(const RrStatement&, const RrStatement&) = default;
};

/// Layer ℓ lists the k^ℓ node addresses of the trace tree in path order.
struct TraceStatement {
    std::vector<std::vector<Address>> addr_list;
    GroupPoint P_a;
    std::vector<trace::TransitionFn> fns;
    /// hash_p of the state bytes when layer 0 is hashlocked.
    std::optional<Scalar> state_lock;
    friend bool operator==(const TraceStatement&, const TraceStatement&) = default;
};

struct DLogStatement {
    GroupPoint P;
    friend bool operator==(const DLogStatement&, const DLogStatement&) = default;
};

using Statement = std::variant<RcStatement, RaStatement, RrStatement, TraceStatement, DLogStatement>;

struct RcWitness {
    GroupPoint P_a;
};
struct RaWitness {
    std::vector<Scalar> a;
    std::size_t x = 0; ///< 0-based
};
struct RrWitness {
    GroupPoint P_b;
    Signature sigma;
    std::size_t y = 0; ///< 0-based
};
struct TraceWitness {
    Scalar s;
};
struct DLogWitness {
    Scalar sk;
};

using WitnessData = std::variant<RcWitness, RaWitness, RrWitness, TraceWitness, DLogWitness>;

bool holds_rc(const RcStatement& stmt, const RcWitness& wit);
bool holds_ra(const RaStatement& stmt, const RaWitness& wit);
bool holds_rr(const RrStatement& stmt, const RrWitness& wit);
bool holds_trace(const TraceStatement& stmt, const TraceWitness& wit);
bool holds_dlog(const DLogStatement& stmt, const DLogWitness& wit);
/// Dispatches on the statement kind; a witness of the wrong kind never holds.
bool holds(const Statement& stmt, const WitnessData& wit);

std::string_view relation_name(const Statement& stmt);
Bytes serialize(const Statement& stmt);
Hash256 statement_digest(const Statement& stmt);
nlohmann::json to_json(const Statement& stmt);
Statement statement_from_json(const nlohmann::json& j);

struct Proof {
    static constexpr std::uint8_t kVersion = 1;

    std::string backend;
    Hash256 statement_digest{};
    Bytes attestation;

    std::string to_hex() const;
    static Proof from_hex(std::string_view hex);

    friend bool operator==(const Proof&, const Proof&) = default;
};

class ProofBackend {
public:
    virtual ~ProofBackend() = default;
    virtual std::string_view tag() const = 0;
    virtual Proof prove(const Statement& stmt, const WitnessData& wit) = 0;
    virtual bool verify(const Statement& stmt, const Proof& proof) const = 0;
};

/// Ideal-functionality stand-in for a zero-knowledge proof system. Proving
/// checks the relation with the witness and issues a MAC over the statement
/// digest; verifying checks the MAC. The key is derived from the session id,
/// so anyone holding the transcript can re-verify, which is what replay needs
/// and is exactly why this is not a real proof system.
class IdealBackend final : public ProofBackend {
public:
    static constexpr std::string_view kTag = "ideal";

    explicit IdealBackend(ByteView session_id);

    std::string_view tag() const override { return kTag; }
    Proof prove(const Statement& stmt, const WitnessData& wit) override;
    bool verify(const Statement& stmt, const Proof& proof) const override;

    /// Digests of statements proven through this instance.
    const std::set<Hash256>& recorded() const { return recorded_; }

private:
    Hash256 key_{};
    std::set<Hash256> recorded_;
};

/// Non-interactive Schnorr proof of knowledge; DLog statements only.
class SchnorrBackend final : public ProofBackend {
public:
    static constexpr std::string_view kTag = "schnorr";

    explicit SchnorrBackend(Bytes context = {}) : context_(std::move(context)) {}

    std::string_view tag() const override { return kTag; }
    Proof prove(const Statement& stmt, const WitnessData& wit) override;
    bool verify(const Statement& stmt, const Proof& proof) const override;

private:
    Bytes context_;
};

/// Throws Error(UnknownBackend) for unrecognised tags.
std::unique_ptr<ProofBackend> make_backend(std::string_view tag, ByteView session_id);

Proof prove(const Statement& stmt, const WitnessData& wit, ProofBackend& backend);
/// False for a proof from another backend or for a different statement.
bool verify(const Statement& stmt, const Proof& proof, const ProofBackend& backend);

Proof dlog_prove(const Scalar& sk, const GroupPoint& P, ByteView context);
bool dlog_verify(const GroupPoint& P, const Proof& proof, ByteView context);

namespace detail {
/// Fiat–Shamir challenge for a DLog transcript.
Scalar dlog_challenge(const GroupPoint& P, const GroupPoint& R, ByteView context);
/// Proof with a caller-chosen nonce; tests use it to exercise extraction.
Proof dlog_prove_with_nonce(const Scalar& sk, const GroupPoint& P, ByteView context, const Scalar& k);
} // namespace detail

} // namespace randlock::proofs
