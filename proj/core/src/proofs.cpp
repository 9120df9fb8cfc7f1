// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/error.hpp>
#include <randlock/hash.hpp>
#include <randlock/json_fields.hpp>
#include <randlock/proofs.hpp>
#include <randlock/statetrace.hpp>

#include <algorithm>

namespace randlock::proofs {

using nlohmann::json;

namespace {

enum RelTag : std::uint8_t { kRC = 1, kRA = 2, kRR = 3, kTrace = 4, kDLog = 5 };

constexpr std::string_view kStatementTag = "randlock/statement";
constexpr std::string_view kIdealKeyTag = "randlock/ideal-key";
constexpr std::string_view kDLogChallengeTag = "randlock/dlog";
constexpr std::string_view kDLogNonceTag = "randlock/dlog-nonce";

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

void put_point(ByteWriter& w, const GroupPoint& p)
{
    auto c = p.compress();
    w.raw(c);
}

void put_commitment(ByteWriter& w, const KeyCommitment& c)
{
    w.u8(static_cast<std::uint8_t>(c.kind())).blob(c.bytes());
}

void put_points(ByteWriter& w, const std::vector<GroupPoint>& pts)
{
    w.varint(pts.size());
    for (const auto& p : pts) put_point(w, p);
}

// Every H_i in the list well-formed, and the list long enough to be a choice.
bool usable_list(const std::vector<GroupPoint>& H)
{
    if (H.size() < 2) return false;
    return std::none_of(H.begin(), H.end(), [](const GroupPoint& p) { return p.is_identity(); });
}

std::vector<GroupPoint> points_from_json(const json& arr)
{
    std::vector<GroupPoint> out;
    for (const auto& v : arr) {
        if (!v.is_string()) throw Error(Errc::Decode, "point list entries must be strings");
        out.push_back(GroupPoint::from_hex(v.get<std::string>()));
    }
    return out;
}

json points_to_json(const std::vector<GroupPoint>& pts)
{
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(p.to_hex());
    return arr;
}

} // namespace

// ---- KeyCommitment ----

KeyCommitment KeyCommitment::address(const Address& a)
{
    KeyCommitment c;
    c.kind_ = Kind::Address;
    c.bytes_.assign(a.digest().begin(), a.digest().end());
    return c;
}

KeyCommitment KeyCommitment::digest(const Scalar& d)
{
    KeyCommitment c;
    c.kind_ = Kind::Digest;
    auto b = d.to_bytes();
    c.bytes_.assign(b.begin(), b.end());
    return c;
}

KeyCommitment KeyCommitment::of(Kind kind, const GroupPoint& key)
{
    if (kind == Kind::Address) return address(crypto::hash_160(key));
    if (key.is_identity()) throw Error(Errc::IdentityPoint, "cannot commit to the identity");
    return digest(crypto::hash_p(key));
}

bool KeyCommitment::matches(const GroupPoint& key) const
{
    if (key.is_identity()) return false;
    return of(kind_, key) == *this;
}

json KeyCommitment::to_json() const
{
    return {{"kind", kind_ == Kind::Address ? "addr" : "hash"}, {"value", to_hex(bytes_)}};
}

KeyCommitment KeyCommitment::from_json(const json& j)
{
    auto kind = jsonf::str_field(j, "kind");
    auto value = jsonf::hex_field(j, "value");
    if (kind == "addr") {
        if (value.size() != 20) throw Error(Errc::Decode, "address commitment must be 20 bytes");
        ByteArray<20> d{};
        std::copy(value.begin(), value.end(), d.begin());
        return address(Address(d));
    }
    if (kind == "hash") {
        if (value.size() != 32) throw Error(Errc::Decode, "digest commitment must be 32 bytes");
        return digest(Scalar::from_bytes(value));
    }
    throw Error(Errc::Decode, "unknown commitment kind '" + kind + "'");
}

// ---- predicates ----

bool holds_rc(const RcStatement& stmt, const RcWitness& wit)
{
    if (wit.P_a.is_identity()) return false;
    return crypto::hash_160(wit.P_a) == stmt.addr_a && GroupPoint::base_mul(crypto::hash_p(wit.P_a)) == stmt.C;
}

bool holds_ra(const RaStatement& stmt, const RaWitness& wit)
{
    const auto n = stmt.H_list.size();
    if (!usable_list(stmt.H_list) || wit.a.size() != n || wit.x >= n) return false;
    std::set<ByteArray<33>> seen;
    GroupPoint A_x;
    for (std::size_t i = 0; i < n; ++i) {
        if (wit.a[i].is_zero()) return false;
        GroupPoint A = GroupPoint::base_mul(wit.a[i]);
        if (!seen.insert(A.compress()).second) return false;
        if (GroupPoint::base_mul(crypto::hash_p(A)) != stmt.H_list[i]) return false;
        if (i == wit.x) A_x = A;
    }
    return stmt.addr_a.matches(stmt.P_a + A_x);
}

bool holds_rr(const RrStatement& stmt, const RrWitness& wit)
{
    if (!usable_list(stmt.H_list) || wit.y >= stmt.H_list.size()) return false;
    if (!crypto::sig_ver(wit.P_b, stmt.addr_b.bytes(), wit.sigma)) return false;
    return stmt.addr_b.matches(wit.P_b + stmt.H_list[wit.y]);
}

bool holds_trace(const TraceStatement& stmt, const TraceWitness& wit)
{
    if (stmt.addr_list.empty() || stmt.P_a.is_identity()) return false;
    if (stmt.state_lock) {
        auto b = wit.s.to_bytes();
        if (crypto::hash_p(ByteView(b)) != *stmt.state_lock) return false;
    }
    try {
        auto tree = trace::build_tree(stmt.P_a, wit.s, stmt.fns, stmt.addr_list.size() - 1);
        return tree.addresses() == stmt.addr_list;
    } catch (const Error&) {
        return false;
    }
}

bool holds_dlog(const DLogStatement& stmt, const DLogWitness& wit)
{
    return !stmt.P.is_identity() && GroupPoint::base_mul(wit.sk) == stmt.P;
}

bool holds(const Statement& stmt, const WitnessData& wit)
{
    return std::visit(overloaded{
                          [](const RcStatement& s, const RcWitness& w) { return holds_rc(s, w); },
                          [](const RaStatement& s, const RaWitness& w) { return holds_ra(s, w); },
                          [](const RrStatement& s, const RrWitness& w) { return holds_rr(s, w); },
                          [](const TraceStatement& s, const TraceWitness& w) { return holds_trace(s, w); },
                          [](const DLogStatement& s, const DLogWitness& w) { return holds_dlog(s, w); },
                          [](const auto&, const auto&) { return false; },
                      },
                      stmt, wit);
}

// ---- statement encoding ----

std::string_view relation_name(const Statement& stmt)
{
    static constexpr std::string_view names[] = {"rc", "ra", "rr", "trace", "dlog"};
    return names[stmt.index()];
}

Bytes serialize(const Statement& stmt)
{
    ByteWriter w;
    std::visit(overloaded{
                   [&](const RcStatement& s) {
                       w.u8(kRC).raw(s.addr_a.digest());
                       put_point(w, s.C);
                   },
                   [&](const RaStatement& s) {
                       w.u8(kRA);
                       put_points(w, s.H_list);
                       put_point(w, s.P_a);
                       put_commitment(w, s.addr_a);
                   },
                   [&](const RrStatement& s) {
                       w.u8(kRR);
                       put_commitment(w, s.addr_b);
                       put_points(w, s.H_list);
                   },
                   [&](const TraceStatement& s) {
                       w.u8(kTrace);
                       put_point(w, s.P_a);
                       w.varint(s.fns.size());
                       for (const auto& f : s.fns) w.raw(f.mul.to_bytes()).raw(f.add.to_bytes());
                       w.varint(s.addr_list.size());
                       for (const auto& layer : s.addr_list) {
                           w.varint(layer.size());
                           for (const auto& a : layer) w.raw(a.digest());
                       }
                       w.u8(s.state_lock ? 1 : 0);
                       if (s.state_lock) w.raw(s.state_lock->to_bytes());
                   },
                   [&](const DLogStatement& s) {
                       w.u8(kDLog);
                       put_point(w, s.P);
                   },
               },
               stmt);
    return std::move(w).bytes();
}

Hash256 statement_digest(const Statement& stmt)
{
    return crypto::tagged_sha256(kStatementTag, serialize(stmt));
}

json to_json(const Statement& stmt)
{
    json j = std::visit(
        overloaded{
            [](const RcStatement& s) -> json { return {{"addr_a", s.addr_a.to_hex()}, {"C", s.C.to_hex()}}; },
            [](const RaStatement& s) -> json {
                return {{"H", points_to_json(s.H_list)}, {"P_a", s.P_a.to_hex()}, {"addr_a", s.addr_a.to_json()}};
            },
            [](const RrStatement& s) -> json { return {{"addr_b", s.addr_b.to_json()}, {"H", points_to_json(s.H_list)}}; },
            [](const TraceStatement& s) -> json {
                json fns = json::array();
                for (const auto& f : s.fns) fns.push_back(f.spec());
                json layers = json::array();
                for (const auto& layer : s.addr_list) {
                    json l = json::array();
                    for (const auto& a : layer) l.push_back(a.to_hex());
                    layers.push_back(l);
                }
                return {{"P_a", s.P_a.to_hex()},
                        {"fns", fns},
                        {"addr_list", layers},
                        {"state_lock", s.state_lock ? json(s.state_lock->to_hex()) : json(nullptr)}};
            },
            [](const DLogStatement& s) -> json { return {{"P", s.P.to_hex()}}; },
        },
        stmt);
    j["relation"] = relation_name(stmt);
    return j;
}

Statement statement_from_json(const json& j)
{
    using namespace jsonf;
    auto rel = str_field(j, "relation");
    if (rel == "rc") return RcStatement{Address::from_hex(str_field(j, "addr_a")), GroupPoint::from_hex(str_field(j, "C"))};
    if (rel == "ra") {
        return RaStatement{points_from_json(array_field(j, "H")), GroupPoint::from_hex(str_field(j, "P_a")),
                           KeyCommitment::from_json(field(j, "addr_a"))};
    }
    if (rel == "rr") return RrStatement{KeyCommitment::from_json(field(j, "addr_b")), points_from_json(array_field(j, "H"))};
    if (rel == "trace") {
        TraceStatement s;
        s.P_a = GroupPoint::from_hex(str_field(j, "P_a"));
        for (const auto& f : array_field(j, "fns")) {
            if (!f.is_string()) throw Error(Errc::Decode, "transition specs must be strings");
            try {
                s.fns.push_back(trace::TransitionFn::parse(f.get<std::string>()));
            } catch (const Error& e) {
                throw Error(Errc::Decode, e.what());
            }
        }
        for (const auto& layer : array_field(j, "addr_list")) {
            if (!layer.is_array()) throw Error(Errc::Decode, "addr_list layers must be arrays");
            std::vector<Address> l;
            for (const auto& a : layer) {
                if (!a.is_string()) throw Error(Errc::Decode, "addresses must be strings");
                l.push_back(Address::from_hex(a.get<std::string>()));
            }
            s.addr_list.push_back(std::move(l));
        }
        const auto& lock = field(j, "state_lock");
        if (!lock.is_null()) {
            if (!lock.is_string()) throw Error(Errc::Decode, "state_lock must be a string");
            s.state_lock = Scalar::from_hex(lock.get<std::string>());
        }
        return s;
    }
    if (rel == "dlog") return DLogStatement{GroupPoint::from_hex(str_field(j, "P"))};
    throw Error(Errc::Decode, "unknown relation '" + rel + "'");
}

// ---- Proof ----

std::string Proof::to_hex() const
{
    ByteWriter w;
    w.u8(kVersion).blob(as_bytes(backend)).raw(statement_digest).blob(attestation);
    return randlock::to_hex(w.bytes());
}

Proof Proof::from_hex(std::string_view hex)
{
    Bytes raw = randlock::from_hex(hex);
    ByteReader r(raw);
    if (r.u8() != kVersion) throw Error(Errc::Decode, "unsupported proof version");
    Proof p;
    Bytes tag = r.blob();
    p.backend.assign(tag.begin(), tag.end());
    auto d = r.raw(32);
    std::copy(d.begin(), d.end(), p.statement_digest.begin());
    p.attestation = r.blob();
    if (!r.empty()) throw Error(Errc::Decode, "trailing bytes after proof");
    return p;
}

// ---- ideal backend ----

namespace {

Hash256 ideal_mac(const Hash256& key, const Hash256& digest)
{
    return crypto::hmac_sha256(key, digest);
}

} // namespace

IdealBackend::IdealBackend(ByteView session_id)
    : key_(crypto::tagged_sha256(kIdealKeyTag, session_id))
{
}

Proof IdealBackend::prove(const Statement& stmt, const WitnessData& wit)
{
    if (!holds(stmt, wit)) {
        throw Error(Errc::RelationUnsatisfied, std::string("witness does not satisfy relation ") +
                                                   std::string(relation_name(stmt)));
    }
    Proof p;
    p.backend = kTag;
    p.statement_digest = statement_digest(stmt);
    auto mac = ideal_mac(key_, p.statement_digest);
    p.attestation.assign(mac.begin(), mac.end());
    recorded_.insert(p.statement_digest);
    return p;
}

bool IdealBackend::verify(const Statement& stmt, const Proof& proof) const
{
    if (proof.backend != kTag) return false;
    auto digest = statement_digest(stmt);
    if (proof.statement_digest != digest) return false;
    auto mac = ideal_mac(key_, digest);
    return proof.attestation.size() == mac.size() && std::equal(mac.begin(), mac.end(), proof.attestation.begin());
}

// ---- schnorr backend ----

namespace detail {

Scalar dlog_challenge(const GroupPoint& P, const GroupPoint& R, ByteView context)
{
    ByteWriter w;
    w.str(kDLogChallengeTag).raw(serialize(DLogStatement{P}));
    put_point(w, R);
    w.raw(context);
    return crypto::hash_p(w.bytes());
}

Proof dlog_prove_with_nonce(const Scalar& sk, const GroupPoint& P, ByteView context, const Scalar& k)
{
    GroupPoint R = GroupPoint::base_mul(k);
    Scalar s = k + dlog_challenge(P, R, context) * sk;
    Proof p;
    p.backend = SchnorrBackend::kTag;
    p.statement_digest = statement_digest(DLogStatement{P});
    auto r = R.compress();
    auto sb = s.to_bytes();
    p.attestation.assign(r.begin(), r.end());
    p.attestation.insert(p.attestation.end(), sb.begin(), sb.end());
    return p;
}

} // namespace detail

Proof dlog_prove(const Scalar& sk, const GroupPoint& P, ByteView context)
{
    if (!holds_dlog(DLogStatement{P}, DLogWitness{sk})) throw Error(Errc::BadWitness, "P is not sk·G");
    auto skb = sk.to_bytes();
    ByteWriter w;
    w.str(kDLogNonceTag).raw(skb).raw(serialize(DLogStatement{P})).raw(context);
    return detail::dlog_prove_with_nonce(sk, P, context, crypto::hash_p(w.bytes()));
}

bool dlog_verify(const GroupPoint& P, const Proof& proof, ByteView context)
{
    if (proof.backend != SchnorrBackend::kTag || P.is_identity()) return false;
    if (proof.statement_digest != statement_digest(DLogStatement{P})) return false;
    if (proof.attestation.size() != 65) return false;
    try {
        GroupPoint R = GroupPoint::from_compressed(ByteView(proof.attestation).first(33));
        Scalar s = Scalar::from_bytes(ByteView(proof.attestation).subspan(33));
        Scalar e = detail::dlog_challenge(P, R, context);
        return GroupPoint::base_mul_add(s, -e, P) == R;
    } catch (const Error&) {
        return false;
    }
}

Proof SchnorrBackend::prove(const Statement& stmt, const WitnessData& wit)
{
    const auto* s = std::get_if<DLogStatement>(&stmt);
    if (!s) throw Error(Errc::UnknownBackend, "schnorr backend only proves dlog statements");
    if (!holds(stmt, wit)) throw Error(Errc::RelationUnsatisfied, "witness does not satisfy relation dlog");
    return dlog_prove(std::get<DLogWitness>(wit).sk, s->P, context_);
}

bool SchnorrBackend::verify(const Statement& stmt, const Proof& proof) const
{
    const auto* s = std::get_if<DLogStatement>(&stmt);
    return s && dlog_verify(s->P, proof, context_);
}

// ---- dispatch ----

std::unique_ptr<ProofBackend> make_backend(std::string_view tag, ByteView session_id)
{
    if (tag == IdealBackend::kTag) return std::make_unique<IdealBackend>(session_id);
    if (tag == SchnorrBackend::kTag) return std::make_unique<SchnorrBackend>(Bytes(session_id.begin(), session_id.end()));
    throw Error(Errc::UnknownBackend, "unknown proof backend '" + std::string(tag) + "'");
}

Proof prove(const Statement& stmt, const WitnessData& wit, ProofBackend& backend)
{
    return backend.prove(stmt, wit);
}

bool verify(const Statement& stmt, const Proof& proof, const ProofBackend& backend)
{
    if (proof.backend != backend.tag()) return false;
    return backend.verify(stmt, proof);
}

} // namespace randlock::proofs
