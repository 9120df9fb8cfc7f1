// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/error.hpp>
#include <randlock/transport.hpp>

#include <condition_variable>
#include <deque>
#include <mutex>

namespace randlock::net {

void Transport::accept(const Envelope& env)
{
    check_envelope(env, session_);
    if (session_.empty()) session_ = env.session_id;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Queue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::pair<Clock::time_point, Envelope>> items;
};

class DuplexEnd final : public Transport {
public:
    DuplexEnd(std::shared_ptr<Queue> in, std::shared_ptr<Queue> out, Millis latency)
        : in_(std::move(in)), out_(std::move(out)), latency_(latency)
    {
    }

    void send(const Envelope& env) override
    {
        {
            std::lock_guard lock(out_->mu);
            out_->items.emplace_back(Clock::now() + latency_, env);
        }
        out_->cv.notify_all();
    }

    Envelope recv(Millis deadline) override
    {
        const auto give_up = Clock::now() + deadline;
        std::unique_lock lock(in_->mu);
        for (;;) {
            auto now = Clock::now();
            if (!in_->items.empty() && in_->items.front().first <= now) {
                Envelope env = std::move(in_->items.front().second);
                in_->items.pop_front();
                lock.unlock();
                accept(env);
                return env;
            }
            if (now >= give_up) throw Error(Errc::PeerTimeout, "no message from peer before the deadline");
            auto wake = give_up;
            if (!in_->items.empty()) wake = std::min(wake, in_->items.front().first);
            in_->cv.wait_until(lock, wake);
        }
    }

    std::optional<Envelope> poll() override
    {
        std::unique_lock lock(in_->mu);
        if (in_->items.empty() || in_->items.front().first > Clock::now()) return std::nullopt;
        Envelope env = std::move(in_->items.front().second);
        in_->items.pop_front();
        lock.unlock();
        accept(env);
        return env;
    }

    bool pending() const override
    {
        std::lock_guard lock(in_->mu);
        return !in_->items.empty();
    }

private:
    std::shared_ptr<Queue> in_;
    std::shared_ptr<Queue> out_;
    Millis latency_;
};

} // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_duplex(Millis latency)
{
    auto ab = std::make_shared<Queue>();
    auto ba = std::make_shared<Queue>();
    return {std::make_unique<DuplexEnd>(ba, ab, latency), std::make_unique<DuplexEnd>(ab, ba, latency)};
}

} // namespace randlock::net
