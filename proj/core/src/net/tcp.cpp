// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/error.hpp>
#include <randlock/net/tcp.hpp>

#include <boost/asio.hpp>

#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>
#include <variant>

namespace randlock::net {

namespace asio = boost::asio;
using asio::ip::tcp;
using Clock = std::chrono::steady_clock;

struct TcpTransport::Impl {
    asio::io_context io;
    tcp::socket socket{io};
    std::mutex write_mu;

    std::mutex mu;
    std::condition_variable cv;
    // Parsed envelope, or the decode error to raise on receipt.
    std::deque<std::variant<Envelope, Error>> inbox;
    bool closed = false;
    std::thread reader;

    void read_loop()
    {
        asio::streambuf buf;
        for (;;) {
            boost::system::error_code ec;
            std::size_t n = asio::read_until(socket, buf, '\n', ec);
            if (ec) break;
            std::string line(asio::buffers_begin(buf.data()), asio::buffers_begin(buf.data()) + n - 1);
            buf.consume(n);
            if (line.empty()) continue;
            std::variant<Envelope, Error> item = Error(Errc::Decode, "unreadable envelope");
            try {
                item = Envelope::from_json(nlohmann::json::parse(line));
            } catch (const Error& e) {
                item = e;
            } catch (const std::exception& e) {
                item = Error(Errc::Decode, std::string("unreadable envelope: ") + e.what());
            }
            {
                std::lock_guard lock(mu);
                inbox.push_back(std::move(item));
            }
            cv.notify_all();
        }
        {
            std::lock_guard lock(mu);
            closed = true;
        }
        cv.notify_all();
    }
};

TcpTransport::TcpTransport(std::unique_ptr<Impl> impl) : impl_(std::move(impl))
{
    impl_->reader = std::thread([this] { impl_->read_loop(); });
}

TcpTransport::~TcpTransport() { close(); }

void TcpTransport::close()
{
    if (!impl_) return;
    boost::system::error_code ec;
    impl_->socket.shutdown(tcp::socket::shutdown_both, ec);
    if (impl_->reader.joinable()) impl_->reader.join();
    impl_->socket.close(ec);
}

void TcpTransport::send(const Envelope& env)
{
    const std::string line = canonical(env.to_json()) + "\n";
    std::lock_guard lock(impl_->write_mu);
    boost::system::error_code ec;
    asio::write(impl_->socket, asio::buffer(line), ec);
    if (ec) throw Error(Errc::PeerTimeout, "connection to peer lost: " + ec.message());
}

Envelope TcpTransport::recv(Millis deadline)
{
    const auto give_up = Clock::now() + deadline;
    std::unique_lock lock(impl_->mu);
    impl_->cv.wait_until(lock, give_up, [&] { return !impl_->inbox.empty() || impl_->closed; });
    if (impl_->inbox.empty()) {
        if (impl_->closed) throw Error(Errc::PeerTimeout, "peer closed the connection");
        throw Error(Errc::PeerTimeout, "no message from peer before the deadline");
    }
    auto item = std::move(impl_->inbox.front());
    impl_->inbox.pop_front();
    lock.unlock();
    if (auto* err = std::get_if<Error>(&item)) throw *err;
    Envelope env = std::get<Envelope>(std::move(item));
    accept(env);
    return env;
}

std::optional<Envelope> TcpTransport::poll()
{
    {
        std::lock_guard lock(impl_->mu);
        if (impl_->inbox.empty()) return std::nullopt;
    }
    return recv(Millis(0));
}

bool TcpTransport::pending() const
{
    std::lock_guard lock(impl_->mu);
    return !impl_->inbox.empty();
}

struct TcpListener::Impl {
    asio::io_context io;
    tcp::acceptor acceptor{io};
};

TcpListener::TcpListener(std::uint16_t port, const std::string& address) : impl_(std::make_unique<Impl>())
{
    boost::system::error_code ec;
    tcp::endpoint ep(asio::ip::make_address(address, ec), port);
    if (ec) throw Error(Errc::BadConfig, "bad listen address " + address);
    auto& a = impl_->acceptor;
    a.open(ep.protocol(), ec);
    if (!ec) a.set_option(tcp::acceptor::reuse_address(true), ec);
    if (!ec) a.bind(ep, ec);
    if (!ec) a.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) throw Error(Errc::PortInUse, "cannot listen on " + address + ":" + std::to_string(port) + ": " + ec.message());
}

TcpListener::~TcpListener() = default;

std::uint16_t TcpListener::port() const { return impl_->acceptor.local_endpoint().port(); }

std::unique_ptr<TcpTransport> TcpListener::accept(Millis deadline)
{
    auto impl = std::make_unique<TcpTransport::Impl>();
    bool done = false;
    boost::system::error_code result;
    impl_->acceptor.async_accept(impl->socket, [&](const boost::system::error_code& ec) {
        done = true;
        result = ec;
    });
    impl_->io.restart();
    impl_->io.run_for(deadline);
    if (!done) {
        impl_->acceptor.cancel();
        impl_->io.restart();
        impl_->io.run();
        throw Error(Errc::PeerTimeout, "no peer connected before the deadline");
    }
    if (result) throw Error(Errc::PeerTimeout, "accept failed: " + result.message());
    impl->socket.set_option(tcp::no_delay(true));
    return std::make_unique<TcpTransport>(std::move(impl));
}

std::unique_ptr<TcpTransport> tcp_connect(const std::string& host, std::uint16_t port, Millis deadline)
{
    const auto give_up = Clock::now() + deadline;
    auto impl = std::make_unique<TcpTransport::Impl>();
    tcp::resolver resolver(impl->io);
    boost::system::error_code ec;
    auto endpoints = resolver.resolve(host, std::to_string(port), ec);
    if (ec) throw Error(Errc::BadConfig, "cannot resolve " + host + ": " + ec.message());
    for (;;) {
        asio::connect(impl->socket, endpoints, ec);
        if (!ec) break;
        if (Clock::now() >= give_up) {
            throw Error(Errc::PeerTimeout, "cannot reach " + host + ":" + std::to_string(port) + ": " + ec.message());
        }
        impl->socket.close(ec);
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    impl->socket.set_option(tcp::no_delay(true));
    return std::make_unique<TcpTransport>(std::move(impl));
}

} // namespace randlock::net
