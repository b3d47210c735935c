#include "motionagent/backends/fan_out.hpp"

#include <mutex>
#include <thread>

namespace motionagent::backends {

std::string_view to_string(OutcomeStatus s) noexcept {
    switch (s) {
        case OutcomeStatus::Ok: return "ok";
        case OutcomeStatus::Failed: return "failed";
        case OutcomeStatus::TimedOut: return "timed_out";
    }
    return "timed_out";
}

json to_json(const FanOutOutcome& o) {
    json j = {{"model_id", o.model_id}, {"status", std::string(to_string(o.status))}};
    if (o.error_code) {
        j["error"] = {{"code", std::string(to_string(*o.error_code))}, {"message", o.error_message}};
    }
    return j;
}

size_t FanOutResult::ok_count() const {
    size_t n = 0;
    for (const auto& o : outcomes) n += o.status == OutcomeStatus::Ok;
    return n;
}

namespace {

struct SharedState {
    std::mutex mu;
    std::vector<FanOutOutcome> outcomes;
    std::vector<bool> done;
    size_t remaining = 0;
    bool closed = false;
};

} // namespace

FanOutResult fan_out(const std::vector<BackendHandle>& backends, const ModelRequest& request,
                     Duration deadline, size_t quorum, const ClockHandle& clock) {
    if (backends.empty() || quorum < 1 || quorum > backends.size()) {
        throw Error(ErrorCode::InvalidArgument, "fan_out requires 1 <= quorum <= number of backends");
    }

    Clock::Participation self(*clock);
    const TimePoint start = clock->now();
    const TimePoint until = start + deadline;

    auto state = std::make_shared<SharedState>();
    state->outcomes.resize(backends.size());
    state->done.assign(backends.size(), false);
    state->remaining = backends.size();
    for (size_t i = 0; i < backends.size(); ++i) state->outcomes[i].model_id = backends[i]->model_id();

    auto shared_request = std::make_shared<const ModelRequest>(request);
    for (size_t i = 0; i < backends.size(); ++i) {
        clock->attach();
        std::thread([state, shared_request, backend = backends[i], clock, i] {
            clock->adopt();
            FanOutOutcome outcome;
            outcome.model_id = backend->model_id();
            try {
                outcome.response = backend->invoke(*shared_request);
                outcome.status = OutcomeStatus::Ok;
            } catch (const Error& e) {
                outcome.status = OutcomeStatus::Failed;
                outcome.error_code = e.code();
                outcome.error_message = e.message();
            } catch (const std::exception& e) {
                outcome.status = OutcomeStatus::Failed;
                outcome.error_code = ErrorCode::TransportError;
                outcome.error_message = e.what();
            }
            {
                std::lock_guard lk(state->mu);
                if (!state->closed) {
                    state->outcomes[i] = std::move(outcome);
                    state->done[i] = true;
                    --state->remaining;
                }
            }
            clock->notify();
            clock->release();
            clock->detach();
        }).detach();
    }

    for (;;) {
        const auto seen = clock->epoch();
        {
            std::lock_guard lk(state->mu);
            if (state->remaining == 0) break;
        }
        if (clock->now() >= until) break;
        clock->wait_until(until, seen);
    }

    FanOutResult result;
    {
        std::lock_guard lk(state->mu);
        state->closed = true;
        result.outcomes = state->outcomes;
        for (size_t i = 0; i < result.outcomes.size(); ++i) {
            if (!state->done[i]) result.outcomes[i].status = OutcomeStatus::TimedOut;
        }
    }
    result.elapsed = clock->now() - start;

    if (result.ok_count() < quorum) {
        json outcomes = json::array();
        for (const auto& o : result.outcomes) outcomes.push_back(to_json(o));
        const auto elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(result.elapsed).count();
        throw Error(ErrorCode::QuorumNotMet,
                    std::to_string(result.ok_count()) + " of " + std::to_string(backends.size()) +
                        " responses, quorum " + std::to_string(quorum),
                    {{"outcomes", outcomes}, {"elapsed_ms", elapsed_ms}});
    }
    return result;
}

} // namespace motionagent::backends
