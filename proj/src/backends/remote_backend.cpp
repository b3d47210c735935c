#include "motionagent/backends/remote_backend.hpp"

#include "motionagent/common/error.hpp"

#include <httplib.h>

#include <cstdlib>

namespace motionagent::backends {

namespace {

enum class AttemptResult { Done, Transient };

} // namespace

RemoteBackend::RemoteBackend(std::string model_id, BackendKind kind, RemoteEndpoint endpoint)
    : Backend({std::move(model_id), kind, TransportKind::Remote}), endpoint_(std::move(endpoint)) {
    if (endpoint_.timeout.count() <= 0) {
        throw Error(ErrorCode::ConfigInvalid, this->model_id() + ": remote timeout must be positive");
    }
    const auto scheme_end = endpoint_.url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::ConfigInvalid, this->model_id() + ": endpoint '" + endpoint_.url + "' lacks a scheme");
    }
    const auto path_start = endpoint_.url.find('/', scheme_end + 3);
    scheme_host_port_ = endpoint_.url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : endpoint_.url.substr(path_start);
    if (!endpoint_.auth_env.empty()) {
        const char* token = std::getenv(endpoint_.auth_env.c_str());
        if (!token) {
            throw Error(ErrorCode::ConfigInvalid,
                        this->model_id() + ": auth variable " + endpoint_.auth_env + " is not set");
        }
        token_ = token;
    }
}

json RemoteBackend::build_body(const std::string& model_id, const ModelRequest& request) {
    json body = {{"model", model_id},
                 {"schema", request.schema_tag},
                 {"messages",
                  json::array({{{"role", "system"}, {"content", request.role_prompt}},
                               {{"role", "user"}, {"content", canonical_dump(request.payload)}}})}};
    if (request.payload.is_object() && request.payload.contains("media")) body["media"] = request.payload["media"];
    return body;
}

ModelResponse RemoteBackend::parse_body(const std::string& body) {
    auto j = json::parse(body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::MalformedResponse, "response is not JSON");
    try {
        ModelResponse r;
        r.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (auto it = j.find("fields"); it != j.end() && it->is_object()) r.fields = *it;
        if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
            r.prompt_tokens = value_or(*it, "prompt_tokens", std::int64_t{0});
            r.completion_tokens = value_or(*it, "completion_tokens", std::int64_t{0});
        }
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedResponse, std::string("missing choices[0].message.content: ") + e.what());
    }
}

ModelResponse RemoteBackend::invoke(const ModelRequest& request) {
    const std::string body = canonical_dump(build_body(model_id(), request));
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(endpoint_.timeout);
    client.set_read_timeout(endpoint_.timeout);
    client.set_write_timeout(endpoint_.timeout);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

    std::string last_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto started = std::chrono::steady_clock::now();
        auto res = client.Post(path_, headers, body, "application/json");
        const auto took = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout ||
                ((err == httplib::Error::Read || err == httplib::Error::Write) && took >= endpoint_.timeout * 9 / 10)) {
                throw Error(ErrorCode::Timeout, model_id() + ": no response within " +
                                                    std::to_string(endpoint_.timeout.count()) + " ms");
            }
            last_error = httplib::to_string(err);
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            throw Error(ErrorCode::TransportError, model_id() + ": HTTP " + std::to_string(res->status));
        }
        ModelResponse response = parse_body(res->body);
        response.latency = took;
        return response;
    }
    throw Error(ErrorCode::TransportError, model_id() + ": " + last_error + " (after retry)");
}

} // namespace motionagent::backends
