#include "motionagent/backends/cassette.hpp"

#include "motionagent/common/error.hpp"

namespace motionagent::backends {

void to_json(json& j, const CassetteEntry& e) {
    j = json{{"fingerprint", e.fingerprint},
             {"schema_tag", e.schema_tag},
             {"response_text", e.response_text},
             {"structured_fields", e.structured_fields},
             {"latency_ms", e.latency_ms}};
}

void from_json(const json& j, CassetteEntry& e) {
    e.fingerprint = j.at("fingerprint").get<std::string>();
    e.schema_tag = j.at("schema_tag").get<std::string>();
    e.response_text = j.at("response_text").get<std::string>();
    e.structured_fields = value_or(j, "structured_fields", json::object());
    e.latency_ms = value_or(j, "latency_ms", std::int64_t{0});
}

std::vector<CassetteEntry> load_cassette(const std::filesystem::path& path) {
    std::vector<CassetteEntry> entries;
    try {
        for_each_jsonl(
            path, [&](size_t, const json& j) { entries.push_back(j.get<CassetteEntry>()); },
            [&](size_t line, const std::string& why) {
                throw Error(ErrorCode::CassetteMismatch,
                            path.string() + ":" + std::to_string(line) + ": " + why);
            });
    } catch (const std::system_error& e) {
        throw Error(ErrorCode::CassetteMismatch, e.what());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CassetteMismatch, path.string() + ": " + e.what());
    }
    return entries;
}

RecordingBackend::RecordingBackend(BackendHandle inner, const std::filesystem::path& sink)
    : Backend({inner->model_id(), inner->kind(), TransportKind::Recording}), inner_(std::move(inner)) {
    std::error_code ec;
    if (sink.has_parent_path()) std::filesystem::create_directories(sink.parent_path(), ec);
    out_.open(sink, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorCode::SinkUnwritable, "cannot open cassette sink " + sink.string());
}

ModelResponse RecordingBackend::invoke(const ModelRequest& request) {
    ModelResponse response = inner_->invoke(request);
    CassetteEntry entry{fingerprint(request), request.schema_tag, response.text, response.fields,
                        static_cast<std::int64_t>(response.latency.count())};
    std::lock_guard lk(mu_);
    out_ << canonical_dump(json(entry)) << '\n';
    out_.flush();
    if (!out_) throw Error(ErrorCode::SinkUnwritable, "cassette write failed for " + model_id());
    return response;
}

ReplayBackend::ReplayBackend(std::string model_id, BackendKind kind, const std::filesystem::path& cassette)
    : Backend({std::move(model_id), kind, TransportKind::Replay}), path_(cassette) {
    for (auto& e : load_cassette(cassette)) {
        auto key = e.fingerprint;
        by_fingerprint_[key].push_back(std::move(e));
    }
}

ModelResponse ReplayBackend::invoke(const ModelRequest& request) {
    const auto fp = fingerprint(request);
    std::lock_guard lk(mu_);
    auto it = by_fingerprint_.find(fp);
    if (it == by_fingerprint_.end() || it->second.empty()) {
        throw Error(ErrorCode::CassetteMismatch,
                    model_id() + ": no recorded response for " + request.schema_tag + " request " + fp.substr(0, 12),
                    json{{"fingerprint", fp}, {"cassette", path_.string()}});
    }
    CassetteEntry entry = std::move(it->second.front());
    it->second.pop_front();
    ModelResponse response;
    response.text = std::move(entry.response_text);
    response.fields = std::move(entry.structured_fields);
    response.latency = std::chrono::milliseconds(entry.latency_ms);
    return response;
}

size_t ReplayBackend::remaining() const {
    std::lock_guard lk(mu_);
    size_t n = 0;
    for (const auto& [_, q] : by_fingerprint_) n += q.size();
    return n;
}

BackendHandle record_cassette(BackendHandle backend, const std::filesystem::path& sink) {
    const auto t = backend->info().transport;
    if (t == TransportKind::Replay || t == TransportKind::Recording) {
        throw Error(ErrorCode::PreconditionViolation,
                    "cannot record a " + std::string(to_string(t)) + " backend");
    }
    return std::make_shared<RecordingBackend>(std::move(backend), sink);
}

} // namespace motionagent::backends
