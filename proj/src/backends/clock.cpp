#include "motionagent/backends/clock.hpp"

#include <algorithm>
#include <optional>
#include <thread>

namespace motionagent::backends {

namespace {
thread_local const Clock* tl_adopted = nullptr;
} // namespace

void RealClock::sleep_until(TimePoint t) { std::this_thread::sleep_until(t); }

void RealClock::wait_until(TimePoint deadline, std::uint64_t seen_epoch) {
    std::unique_lock lk(mu_);
    cv_.wait_until(lk, deadline, [&] { return epoch_ != seen_epoch; });
}

std::uint64_t RealClock::epoch() const {
    std::lock_guard lk(mu_);
    return epoch_;
}

void RealClock::notify() {
    {
        std::lock_guard lk(mu_);
        ++epoch_;
    }
    cv_.notify_all();
}

ClockHandle real_clock() {
    static ClockHandle clock = std::make_shared<RealClock>();
    return clock;
}

TimePoint SimulatedClock::now() const {
    std::lock_guard lk(mu_);
    return now_;
}

std::uint64_t SimulatedClock::epoch() const {
    std::lock_guard lk(mu_);
    return epoch_;
}

void SimulatedClock::attach() {
    std::lock_guard lk(mu_);
    ++participants_;
}

void SimulatedClock::detach() {
    std::lock_guard lk(mu_);
    --participants_;
    advance_locked();
}

void SimulatedClock::adopt() { tl_adopted = this; }

void SimulatedClock::release() {
    if (tl_adopted == this) tl_adopted = nullptr;
}

void SimulatedClock::sleep_until(TimePoint t) {
    std::unique_lock lk(mu_);
    if (t <= now_) return;
    const bool implicit = tl_adopted != this;
    if (implicit) ++participants_;
    Blocked self{t, false, 0, false};
    blocked_list_.push_back(&self);
    ++blocked_;
    advance_locked();
    cv_.wait(lk, [&] { return self.woken; });
    blocked_list_.remove(&self);
    if (implicit) {
        --participants_;
        advance_locked();
    }
}

void SimulatedClock::wait_until(TimePoint deadline, std::uint64_t seen_epoch) {
    std::unique_lock lk(mu_);
    if (epoch_ != seen_epoch || now_ >= deadline) return;
    const bool implicit = tl_adopted != this;
    if (implicit) ++participants_;
    Blocked self{deadline, true, seen_epoch, false};
    blocked_list_.push_back(&self);
    ++blocked_;
    advance_locked();
    cv_.wait(lk, [&] { return self.woken; });
    blocked_list_.remove(&self);
    if (implicit) {
        --participants_;
        advance_locked();
    }
}

void SimulatedClock::notify() {
    std::lock_guard lk(mu_);
    ++epoch_;
    for (auto* b : blocked_list_) {
        if (b->waiter && !b->woken && b->seen_epoch != epoch_) {
            b->woken = true;
            --blocked_;
        }
    }
    cv_.notify_all();
}

void SimulatedClock::advance_locked() {
    while (blocked_ > 0 && blocked_ >= participants_) {
        std::optional<TimePoint> next_sleeper;
        std::optional<TimePoint> next_waiter;
        for (const auto* b : blocked_list_) {
            if (b->woken) continue;
            auto& slot = b->waiter ? next_waiter : next_sleeper;
            slot = slot ? std::min(*slot, b->wake) : b->wake;
        }
        if (!next_sleeper && !next_waiter) return;
        const bool wake_sleepers = next_sleeper && (!next_waiter || *next_sleeper <= *next_waiter);
        now_ = std::max(now_, wake_sleepers ? *next_sleeper : *next_waiter);
        for (auto* b : blocked_list_) {
            if (!b->woken && b->waiter != wake_sleepers && b->wake <= now_) {
                b->woken = true;
                --blocked_;
            }
        }
        cv_.notify_all();
    }
}

} // namespace motionagent::backends
