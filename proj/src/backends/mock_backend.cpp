#include "motionagent/backends/mock_backend.hpp"

#include "motionagent/common/text.hpp"

namespace motionagent::backends {

namespace {

ErrorCode failure_from_string(const std::string& s) {
    const auto v = text::to_lower(s);
    if (v == "timeout") return ErrorCode::Timeout;
    if (v == "transport") return ErrorCode::TransportError;
    if (v == "malformed") return ErrorCode::MalformedResponse;
    throw Error(ErrorCode::ConfigInvalid, "unknown mock failure kind '" + s + "'");
}

} // namespace

MockScript mock_script_from_json(const json& j) {
    MockScript script;
    const auto& responses = j.contains("responses") ? j.at("responses") : j;
    for (const auto& [tag, steps] : responses.items()) {
        if (!steps.is_array()) throw Error(ErrorCode::ConfigInvalid, "mock steps for '" + tag + "' must be a list");
        for (const auto& s : steps) {
            MockStep step;
            if (s.is_string()) {
                step.text = s.get<std::string>();
            } else {
                if (s.contains("match")) step.match = s.at("match").get<std::string>();
                if (s.contains("times")) step.times = s.at("times").get<int>();
                step.text = value_or(s, "text", std::string{});
                step.fields = value_or(s, "fields", json::object());
                step.latency = std::chrono::milliseconds(value_or(s, "latency_ms", 0));
                if (s.contains("fail")) {
                    step.fail = failure_from_string(s.at("fail").get<std::string>());
                    step.fail_message = value_or(s, "message", std::string("scripted failure"));
                }
            }
            script.steps[tag].push_back(std::move(step));
        }
    }
    return script;
}

void CallLog::append(std::string entry) {
    std::lock_guard lk(mu_);
    entries_.push_back(std::move(entry));
}

std::vector<std::string> CallLog::entries() const {
    std::lock_guard lk(mu_);
    return entries_;
}

MockBackend::MockBackend(std::string model_id, BackendKind kind, MockScript script,
                         ClockHandle clock, std::shared_ptr<CallLog> log)
    : Backend({std::move(model_id), kind, TransportKind::Mock}),
      clock_(std::move(clock)),
      log_(std::move(log)) {
    for (auto& [tag, steps] : script.steps) {
        for (auto& s : steps) slots_[tag].push_back({std::move(s), 0});
    }
}

MockBackend::MockBackend(std::string model_id, BackendKind kind, Responder responder,
                         ClockHandle clock, std::shared_ptr<CallLog> log)
    : Backend({std::move(model_id), kind, TransportKind::Mock}),
      responder_(std::move(responder)),
      clock_(std::move(clock)),
      log_(std::move(log)) {}

std::optional<MockStep> MockBackend::take_step(const ModelRequest& request) {
    const std::string payload = canonical_dump(request.payload);
    for (const auto* tag : {&request.schema_tag, static_cast<const std::string*>(nullptr)}) {
        auto it = slots_.find(tag ? *tag : std::string("*"));
        if (it == slots_.end()) continue;
        for (auto& slot : it->second) {
            if (slot.step.times && slot.used >= *slot.step.times) continue;
            if (slot.step.match && !text::contains(payload, *slot.step.match)) continue;
            ++slot.used;
            return slot.step;
        }
    }
    return std::nullopt;
}

ModelResponse MockBackend::invoke(const ModelRequest& request) {
    if (log_) log_->append("invoke:" + model_id() + ":" + request.schema_tag);
    std::optional<MockStep> step;
    {
        std::lock_guard lk(mu_);
        requests_.push_back(request);
        if (!responder_) step = take_step(request);
    }

    ModelResponse response;
    if (responder_) {
        response = responder_(request);
    } else {
        if (!step) {
            throw Error(ErrorCode::ScriptExhausted,
                        "mock '" + model_id() + "' has no script entry for '" + request.schema_tag + "'");
        }
        if (step->latency.count() > 0) clock_->sleep_for(step->latency);
        if (step->fail) throw Error(*step->fail, model_id() + ": " + step->fail_message);
        response.text = step->text;
        response.fields = step->fields;
        response.latency = step->latency;
    }
    if (log_) log_->append("return:" + model_id() + ":" + request.schema_tag);
    return response;
}

std::vector<ModelRequest> MockBackend::requests() const {
    std::lock_guard lk(mu_);
    return requests_;
}

size_t MockBackend::call_count() const {
    std::lock_guard lk(mu_);
    return requests_.size();
}

} // namespace motionagent::backends
