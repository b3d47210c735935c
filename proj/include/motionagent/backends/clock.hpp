#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>

namespace motionagent::backends {

using Duration = std::chrono::steady_clock::duration;
using TimePoint = std::chrono::steady_clock::time_point;

/// Time source for latency simulation and deadline waits.
///
/// Worker threads that take part in a simulated schedule are counted as
/// participants; the simulated clock only moves forward once every
/// participant is blocked in `sleep_until` or `wait_until`. The real clock
/// ignores participant bookkeeping.
class Clock {
public:
    virtual ~Clock() = default;

    virtual TimePoint now() const = 0;
    virtual void sleep_until(TimePoint t) = 0;
    void sleep_for(Duration d) { sleep_until(now() + d); }

    /// Returns once `deadline` is reached or `notify()` has been called since
    /// `seen_epoch` was read from `epoch()`.
    virtual void wait_until(TimePoint deadline, std::uint64_t seen_epoch) = 0;
    virtual std::uint64_t epoch() const = 0;
    virtual void notify() = 0;

    /// Pre-registers a participant on behalf of a thread about to start.
    virtual void attach() {}
    /// Called by that thread (from `adopt`) when it finishes.
    virtual void detach() {}
    /// Marks the calling thread as an attached participant.
    virtual void adopt() {}
    virtual void release() {}

    /// RAII participant registration for the calling thread.
    class Participation {
    public:
        explicit Participation(Clock& c) : clock_(c) {
            clock_.attach();
            clock_.adopt();
        }
        ~Participation() {
            clock_.release();
            clock_.detach();
        }
        Participation(const Participation&) = delete;
        Participation& operator=(const Participation&) = delete;

    private:
        Clock& clock_;
    };
};

using ClockHandle = std::shared_ptr<Clock>;

class RealClock final : public Clock {
public:
    TimePoint now() const override { return std::chrono::steady_clock::now(); }
    void sleep_until(TimePoint t) override;
    void wait_until(TimePoint deadline, std::uint64_t seen_epoch) override;
    std::uint64_t epoch() const override;
    void notify() override;

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::uint64_t epoch_ = 0;
};

ClockHandle real_clock();

/// Discrete-event clock. Time starts at the steady_clock epoch and jumps to
/// the next pending wake-up whenever all participants are blocked. Plain
/// sleepers due at an instant are released before deadline waiters due at
/// the same instant, so a response landing exactly on a deadline counts.
class SimulatedClock final : public Clock {
public:
    TimePoint now() const override;
    void sleep_until(TimePoint t) override;
    void wait_until(TimePoint deadline, std::uint64_t seen_epoch) override;
    std::uint64_t epoch() const override;
    void notify() override;

    void attach() override;
    void detach() override;
    void adopt() override;
    void release() override;

    /// Elapsed simulated time since construction.
    Duration elapsed() const { return now() - TimePoint{}; }

private:
    struct Blocked {
        TimePoint wake;
        bool waiter = false;
        std::uint64_t seen_epoch = 0;
        bool woken = false;
    };

    void advance_locked();

    mutable std::mutex mu_;
    std::condition_variable cv_;
    TimePoint now_{};
    std::uint64_t epoch_ = 0;
    int participants_ = 0;
    int blocked_ = 0;
    std::list<Blocked*> blocked_list_;
};

} // namespace motionagent::backends
