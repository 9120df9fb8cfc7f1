// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/error.hpp>
#include <randlock/net/daemon.hpp>
#include <randlock/protocol.hpp>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include <deque>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

namespace randlock::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using nlohmann::json;
using protocol::Role;

namespace {

class WsSession;

struct HostedSession {
    std::string id;
    std::unique_ptr<protocol::LiveSession> live;
    std::optional<protocol::SessionResult> result;
    std::vector<std::weak_ptr<WsSession>> subscribers;
    std::unique_ptr<asio::steady_timer> timer;
    std::optional<Role> timer_role;

    const protocol::Party& party(Role r) const
    {
        if (result) return r == Role::Challenger ? *result->alice : *result->bob;
        return live->party(r);
    }
    const std::vector<json>& events() const { return result ? result->transcript.events : live->events(); }
    protocol::SessionConfig cfg;

    json state(Role r) const
    {
        const auto& p = party(r);
        json j{{"session_id", id},
               {"role", protocol::role_name(r)},
               {"flow", protocol::flow_name(cfg.flow)},
               {"n", cfg.n},
               {"phase", p.phase()},
               {"awaiting_decision", p.awaiting_decision()},
               {"finished", p.finished()},
               {"event_count", events().size()},
               {"view", p.visible_state()}};
        if (result) j["outcome"] = result->report.to_json();
        return j;
    }
};

int status_for(Errc code)
{
    switch (code) {
    case Errc::SessionUnknown: return 404;
    case Errc::OutOfOrder:
    case Errc::Incomplete: return 409;
    default: return 400;
    }
}

json error_json(const Error& e)
{
    return {{"error", std::string(errc_name(e.code()))}, {"message", e.what()}};
}

struct Target {
    std::vector<std::string> parts;
    std::map<std::string, std::string> query;
};

Target parse_target(std::string_view target)
{
    Target t;
    auto q = target.find('?');
    std::string_view path = target.substr(0, q);
    std::string_view query = q == std::string_view::npos ? std::string_view{} : target.substr(q + 1);
    std::size_t pos = 0;
    while (pos < path.size()) {
        auto next = path.find('/', pos);
        if (next == std::string_view::npos) next = path.size();
        if (next > pos) t.parts.emplace_back(path.substr(pos, next - pos));
        pos = next + 1;
    }
    pos = 0;
    while (pos < query.size()) {
        auto next = query.find('&', pos);
        if (next == std::string_view::npos) next = query.size();
        auto kv = query.substr(pos, next - pos);
        auto eq = kv.find('=');
        if (eq == std::string_view::npos) t.query[std::string(kv)] = "";
        else t.query[std::string(kv.substr(0, eq))] = std::string(kv.substr(eq + 1));
        pos = next + 1;
    }
    return t;
}

std::string content_type(const std::filesystem::path& p)
{
    static const std::map<std::string, std::string> types{{".html", "text/html"},
                                                          {".js", "application/javascript"},
                                                          {".css", "text/css"},
                                                          {".json", "application/json"},
                                                          {".svg", "image/svg+xml"}};
    auto it = types.find(p.extension().string());
    return it == types.end() ? "application/octet-stream" : it->second;
}

json envelope_schema()
{
    return {{"type", "object"},
            {"additionalProperties", false},
            {"required", {"session_id", "step", "sender", "type", "payload_hex", "digest"}},
            {"properties",
             {{"session_id", {{"type", "string"}, {"pattern", "^[0-9a-f]{32}$"}}},
              {"step", {{"type", "integer"}, {"minimum", 1}}},
              {"sender", {{"enum", {"alice", "bob"}}}},
              {"type", {{"type", "string"}}},
              {"payload_hex", {{"type", "string"}, {"pattern", "^([0-9a-f]{2})*$"}}},
              {"digest", {{"type", "string"}, {"pattern", "^[0-9a-f]{64}$"}}}}}};
}

} // namespace

struct Daemon::Impl : std::enable_shared_from_this<Daemon::Impl> {
    DaemonConfig cfg;
    asio::io_context io;
    tcp::acceptor acceptor{io};
    std::thread thread;
    std::map<std::string, std::shared_ptr<HostedSession>> sessions;
    std::mt19937_64 ids{std::random_device{}()};
    bool stopped = false;

    void do_accept();
    http::response<http::string_body> handle(const http::request<http::string_body>& req);
    void upgrade(tcp::socket socket, http::request<http::string_body> req);

    std::shared_ptr<HostedSession> find(const std::string& id)
    {
        auto it = sessions.find(id);
        if (it == sessions.end()) throw Error(Errc::SessionUnknown, "no session " + id);
        return it->second;
    }

    json create(const json& body);
    void advance(const std::shared_ptr<HostedSession>& s);
    void arm(const std::shared_ptr<HostedSession>& s, Role r);
    void act(const std::shared_ptr<HostedSession>& s, Role r, const json& action);
    void broadcast(const HostedSession& s);
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket socket, std::shared_ptr<Daemon::Impl> daemon, std::shared_ptr<HostedSession> session,
              std::optional<Role> role, std::size_t from)
        : ws_(std::move(socket)), daemon_(std::move(daemon)), session_(std::move(session)), role_(role), cursor_(from)
    {
    }

    void start(http::request<http::string_body> req)
    {
        req_ = std::move(req);
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req_, [self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->session_->subscribers.push_back(self);
            self->sync();
            self->do_read();
        });
    }

    /// Sends whatever the client has not seen yet.
    void sync()
    {
        const auto& events = session_->events();
        bool changed = false;
        for (; cursor_ < events.size(); ++cursor_) {
            send({{"kind", "event"}, {"index", cursor_}, {"event", events[cursor_]}});
            changed = true;
        }
        if (role_ && (changed || !state_sent_)) {
            send({{"kind", "state"}, {"state", session_->state(*role_)}});
            state_sent_ = true;
        }
        if (session_->result && !outcome_sent_) {
            send({{"kind", "outcome"}, {"outcome", session_->result->report.to_json()}});
            outcome_sent_ = true;
        }
    }

    void send(const json& j)
    {
        queue_.push_back(j.dump());
        if (!writing_) do_write();
    }

private:
    void do_read()
    {
        ws_.async_read(buf_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return;
            std::string text = beast::buffers_to_string(self->buf_.data());
            self->buf_.consume(self->buf_.size());
            self->on_text(text);
            self->do_read();
        });
    }

    void on_text(const std::string& text)
    {
        json action;
        try {
            action = json::parse(text);
            if (!role_) throw Error(Errc::BadConfig, "connect with ?role=alice|bob to act");
            daemon_->act(session_, *role_, action);
            send({{"kind", "ack"}, {"action", action.value("action", "")}});
        } catch (const Error& e) {
            send({{"kind", "error"}, {"code", std::string(errc_name(e.code()))}, {"message", e.what()}});
        } catch (const std::exception& e) {
            send({{"kind", "error"}, {"code", "Decode"}, {"message", e.what()}});
        }
        // Acks go out before the events the action caused.
        daemon_->broadcast(*session_);
    }

    void do_write()
    {
        writing_ = true;
        ws_.text(true);
        ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->queue_.pop_front();
            if (ec || self->queue_.empty()) {
                self->writing_ = false;
                return;
            }
            self->do_write();
        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    std::shared_ptr<Daemon::Impl> daemon_;
    std::shared_ptr<HostedSession> session_;
    std::optional<Role> role_;
    std::size_t cursor_;
    bool state_sent_ = false;
    bool outcome_sent_ = false;
    http::request<http::string_body> req_;
    beast::flat_buffer buf_;
    std::deque<std::string> queue_;
    bool writing_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket socket, std::shared_ptr<Daemon::Impl> daemon)
        : stream_(std::move(socket)), daemon_(std::move(daemon))
    {
    }

    void run() { do_read(); }

private:
    void do_read()
    {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buf_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return;
            self->on_request();
        });
    }

    void on_request()
    {
        if (websocket::is_upgrade(req_)) {
            stream_.expires_never();
            daemon_->upgrade(stream_.release_socket(), std::move(req_));
            return;
        }
        auto res = std::make_shared<http::response<http::string_body>>(daemon_->handle(req_));
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
            if (ec || res->need_eof()) {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                return;
            }
            self->do_read();
        });
    }

    beast::tcp_stream stream_;
    std::shared_ptr<Daemon::Impl> daemon_;
    beast::flat_buffer buf_;
    http::request<http::string_body> req_;
};

} // namespace

void Daemon::Impl::do_accept()
{
    acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
        if (ec) return; // closed
        std::make_shared<HttpSession>(std::move(socket), self)->run();
        self->do_accept();
    });
}

json Daemon::Impl::create(const json& body)
{
    auto cfg = protocol::SessionConfig::from_json(body);
    if (sessions.count(cfg.resolved_session_id())) {
        if (!cfg.session_id.empty()) throw Error(Errc::BadConfig, "session id already in use");
        // Same seeds as an earlier session: pick a fresh id.
        do {
            std::array<std::uint8_t, 16> entropy;
            for (auto& b : entropy) b = static_cast<std::uint8_t>(ids());
            cfg.session_id = new_session_id(entropy);
        } while (sessions.count(cfg.session_id));
    }
    auto s = std::make_shared<HostedSession>();
    s->cfg = cfg;
    s->live = std::make_unique<protocol::LiveSession>(cfg);
    s->id = s->live->session_id();
    s->timer = std::make_unique<asio::steady_timer>(io);
    sessions[s->id] = s;
    advance(s);
    return {{"session_id", s->id},
            {"flow", protocol::flow_name(cfg.flow)},
            {"state", "/session/" + s->id + "/state"},
            {"events", "/session/" + s->id + "/events"}};
}

void Daemon::Impl::advance(const std::shared_ptr<HostedSession>& s)
{
    while (!s->result) {
        if (s->live->pump()) continue;
        if (s->live->done()) {
            s->result = s->live->result();
            s->live.reset();
            s->timer->cancel();
            break;
        }
        std::optional<Role> waiting;
        for (Role r : {Role::Challenger, Role::Accepter}) {
            const auto& p = s->live->party(r);
            if (p.awaiting_decision() && !p.finished()) waiting = r;
        }
        if (waiting) {
            if (s->timer_role != waiting) arm(s, *waiting);
            break;
        }
        s->live->expire();
    }
    broadcast(*s);
}

void Daemon::Impl::arm(const std::shared_ptr<HostedSession>& s, Role r)
{
    s->timer_role = r;
    s->timer->expires_after(cfg.decision_timeout);
    s->timer->async_wait([self = shared_from_this(), s, r](beast::error_code ec) {
        if (ec || s->result || s->timer_role != r) return;
        s->timer_role.reset();
        if (!s->live->party(r).awaiting_decision()) return;
        s->live->expire_decision(r);
        self->advance(s);
    });
}

void Daemon::Impl::act(const std::shared_ptr<HostedSession>& s, Role r, const json& action)
{
    if (!action.is_object() || !action.contains("action") || !action["action"].is_string()) {
        throw Error(Errc::Decode, "expected {\"action\": ...}");
    }
    if (s->result) throw Error(Errc::OutOfOrder, "the session is over");
    const std::string kind = action["action"];
    protocol::Decision d;
    if (kind == "choose") {
        if (!action.contains("index") || !action["index"].is_number_unsigned() || action["index"].get<std::size_t>() < 1) {
            throw Error(Errc::BadConfig, "choose needs a 1-based \"index\"");
        }
        d.kind = protocol::Decision::Kind::Choose;
        d.index = action["index"].get<std::size_t>() - 1;
    } else if (kind == "reveal") {
        d.kind = protocol::Decision::Kind::Reveal;
    } else {
        throw Error(Errc::Decode, "unknown action '" + kind + "'");
    }
    s->live->decide(r, d);
    if (s->timer_role == r) {
        s->timer_role.reset();
        s->timer->cancel();
    }
    advance(s);
}

void Daemon::Impl::broadcast(const HostedSession& s)
{
    for (auto& w : s.subscribers) {
        if (auto ws = w.lock()) ws->sync();
    }
}

http::response<http::string_body> Daemon::Impl::handle(const http::request<http::string_body>& req)
{
    auto reply = [&](int status, const json& body) {
        http::response<http::string_body> res{static_cast<http::status>(status), req.version()};
        res.set(http::field::content_type, "application/json");
        res.set(http::field::access_control_allow_origin, "*");
        res.keep_alive(req.keep_alive());
        res.body() = body.dump();
        res.prepare_payload();
        return res;
    };
    const Target t = parse_target(std::string_view(req.target().data(), req.target().size()));
    try {
        const auto& p = t.parts;
        if (req.method() == http::verb::post && p == std::vector<std::string>{"session"}) {
            json body;
            try {
                body = req.body().empty() ? json::object() : json::parse(req.body());
            } catch (const std::exception& e) {
                throw Error(Errc::Decode, std::string("body is not JSON: ") + e.what());
            }
            return reply(201, create(body));
        }
        if (req.method() == http::verb::get) {
            if (p == std::vector<std::string>{"schema"}) {
                return reply(200, {{"envelope", envelope_schema()}, {"messages", protocol::message_schema()}});
            }
            if (p.size() == 3 && p[0] == "session" && p[2] == "state") {
                auto s = find(p[1]);
                auto it = t.query.find("role");
                if (it == t.query.end()) throw Error(Errc::BadConfig, "state needs ?role=alice|bob");
                return reply(200, s->state(protocol::parse_role(it->second)));
            }
            if (p.size() == 3 && p[0] == "session" && p[2] == "transcript") {
                auto s = find(p[1]);
                if (!s->result) throw Error(Errc::Incomplete, "the session is still running");
                return reply(200, s->result->transcript.to_json());
            }
            if (cfg.static_dir && (p.empty() || p[0] != "session")) {
                std::filesystem::path rel;
                for (const auto& part : p) {
                    if (part == ".." || part == ".") return reply(404, {{"error", "NotFound"}});
                    rel /= part;
                }
                if (p.empty()) rel = "index.html";
                std::ifstream in(*cfg.static_dir / rel, std::ios::binary);
                if (in) {
                    std::stringstream ss;
                    ss << in.rdbuf();
                    http::response<http::string_body> res{http::status::ok, req.version()};
                    res.set(http::field::content_type, content_type(rel));
                    res.keep_alive(req.keep_alive());
                    res.body() = ss.str();
                    res.prepare_payload();
                    return res;
                }
            }
        }
        return reply(404, {{"error", "NotFound"}, {"message", "no route for " + std::string(req.target().data(), req.target().size())}});
    } catch (const Error& e) {
        return reply(status_for(e.code()), error_json(e));
    }
}

void Daemon::Impl::upgrade(tcp::socket socket, http::request<http::string_body> req)
{
    const Target t = parse_target(std::string_view(req.target().data(), req.target().size()));
    const auto& p = t.parts;
    std::shared_ptr<HostedSession> s;
    std::optional<Role> role;
    std::size_t from = 0;
    try {
        if (!(p.size() == 3 && p[0] == "session" && p[2] == "events")) throw Error(Errc::SessionUnknown, "no such endpoint");
        s = find(p[1]);
        if (auto it = t.query.find("role"); it != t.query.end()) role = protocol::parse_role(it->second);
        if (auto it = t.query.find("from"); it != t.query.end()) from = std::stoul(it->second);
    } catch (const std::exception&) {
        // Refuse the upgrade with a plain 404.
        auto stream = std::make_shared<beast::tcp_stream>(std::move(socket));
        auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found, req.version());
        res->set(http::field::content_type, "application/json");
        res->body() = json{{"error", "SessionUnknown"}}.dump();
        res->prepare_payload();
        http::async_write(*stream, *res, [stream, res](beast::error_code, std::size_t) {});
        return;
    }
    std::make_shared<WsSession>(std::move(socket), shared_from_this(), s, role, from)->start(std::move(req));
}

Daemon::Daemon(DaemonConfig cfg) : impl_(std::make_shared<Impl>())
{
    impl_->cfg = std::move(cfg);
}

Daemon::~Daemon() { stop(); }

void Daemon::start()
{
    auto& d = *impl_;
    beast::error_code ec;
    tcp::endpoint ep(asio::ip::make_address(d.cfg.address, ec), d.cfg.port);
    if (ec) throw Error(Errc::BadConfig, "bad listen address " + d.cfg.address);
    d.acceptor.open(ep.protocol(), ec);
    if (!ec) d.acceptor.set_option(tcp::acceptor::reuse_address(true), ec);
    if (!ec) d.acceptor.bind(ep, ec);
    if (!ec) d.acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
        throw Error(Errc::PortInUse,
                    "cannot listen on " + d.cfg.address + ":" + std::to_string(d.cfg.port) + ": " + ec.message());
    }
    d.do_accept();
    d.thread = std::thread([impl = impl_] { impl->io.run(); });
}

std::uint16_t Daemon::port() const
{
    return impl_->acceptor.local_endpoint().port();
}

void Daemon::wait()
{
    if (impl_->thread.joinable()) impl_->thread.join();
}

void Daemon::stop()
{
    if (!impl_ || impl_->stopped) return;
    impl_->stopped = true;
    asio::post(impl_->io, [impl = impl_] {
        beast::error_code ec;
        impl->acceptor.close(ec);
        for (auto& [id, s] : impl->sessions) s->timer->cancel();
        impl->io.stop();
    });
    if (impl_->thread.joinable() && impl_->thread.get_id() != std::this_thread::get_id()) impl_->thread.join();
    // Break the session <-> daemon reference cycles held by handlers.
    impl_->sessions.clear();
}

} // namespace randlock::net
