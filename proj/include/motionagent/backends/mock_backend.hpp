#pragma once

#include "motionagent/backends/backend.hpp"
#include "motionagent/backends/clock.hpp"
#include "motionagent/common/error.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

namespace motionagent::backends {

/// One scripted reaction. A step applies when its schema tag matches, its
/// `match` substring (if any) occurs in the canonical request payload, and
/// it still has uses left (`times` unset means unlimited).
struct MockStep {
    std::optional<std::string> match;
    std::optional<int> times;
    std::string text;
    json fields = json::object();
    std::chrono::milliseconds latency{0};
    std::optional<ErrorCode> fail;
    std::string fail_message = "scripted failure";
};

struct MockScript {
    /// schema tag -> ordered steps; the tag "*" matches any request.
    std::map<std::string, std::vector<MockStep>> steps;

    MockScript& on(const std::string& tag, MockStep step) {
        steps[tag].push_back(std::move(step));
        return *this;
    }
    MockScript& respond(const std::string& tag, std::string text, std::optional<int> times = std::nullopt) {
        MockStep s;
        s.text = std::move(text);
        s.times = times;
        return on(tag, std::move(s));
    }
    MockScript& fail(const std::string& tag, ErrorCode code, std::optional<int> times = std::nullopt) {
        MockStep s;
        s.fail = code;
        s.times = times;
        return on(tag, std::move(s));
    }
};

MockScript mock_script_from_json(const json& j);

/// Shared, ordered log of backend activity across several mocks.
class CallLog {
public:
    void append(std::string entry);
    std::vector<std::string> entries() const;

private:
    mutable std::mutex mu_;
    std::vector<std::string> entries_;
};

class MockBackend final : public Backend {
public:
    using Responder = std::function<ModelResponse(const ModelRequest&)>;

    MockBackend(std::string model_id, BackendKind kind, MockScript script,
                ClockHandle clock = real_clock(), std::shared_ptr<CallLog> log = nullptr);

    /// Fully programmable mock; used where responses depend on the request.
    MockBackend(std::string model_id, BackendKind kind, Responder responder,
                ClockHandle clock = real_clock(), std::shared_ptr<CallLog> log = nullptr);

    ModelResponse invoke(const ModelRequest& request) override;

    std::vector<ModelRequest> requests() const;
    size_t call_count() const;

private:
    struct Slot {
        MockStep step;
        int used = 0;
    };

    std::optional<MockStep> take_step(const ModelRequest& request);

    std::map<std::string, std::vector<Slot>> slots_;
    Responder responder_;
    ClockHandle clock_;
    std::shared_ptr<CallLog> log_;
    mutable std::mutex mu_;
    std::vector<ModelRequest> requests_;
};

} // namespace motionagent::backends
