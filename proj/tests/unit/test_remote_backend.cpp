#include <doctest.h>

#include "motionagent/backends/remote_backend.hpp"
#include "motionagent/common/error.hpp"
#include "motionagent/common/json_util.hpp"

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

using namespace motionagent;
using namespace motionagent::backends;

namespace {

class LocalServer {
public:
    explicit LocalServer(httplib::Server::Handler handler) {
        server_.Post("/v1/chat", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat"; }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::string reply(const std::string& content) {
    return json{{"choices", json::array({{{"message", {{"content", content}}}}})},
                {"fields", {{"count", 4}}},
                {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 3}}}}
        .dump();
}

const ModelRequest kRequest{"be precise", {{"question", "how many?"}}, "analyze"};

} // namespace

TEST_CASE("remote backend posts the request and parses the reply") {
    json seen;
    std::string auth;
    LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(reply("four"), "application/json");
    });
    ::setenv("MA_TEST_TOKEN", "s3cret", 1);
    RemoteBackend backend("remote-llm", BackendKind::Reasoner, {server.url(), "MA_TEST_TOKEN", std::chrono::milliseconds(2000)});
    auto r = backend.invoke(kRequest);
    CHECK(r.text == "four");
    CHECK(r.fields["count"] == 4);
    CHECK(r.prompt_tokens == 12);
    CHECK(r.completion_tokens == 3);
    CHECK(auth == "Bearer s3cret");
    CHECK(seen["model"] == "remote-llm");
    CHECK(seen["schema"] == "analyze");
    CHECK(seen["messages"][0]["content"] == "be precise");
}

TEST_CASE("remote backend retries once on a server error") {
    std::atomic<int> calls{0};
    LocalServer server([&](const httplib::Request&, httplib::Response& res) {
        if (calls++ == 0) {
            res.status = 503;
            return;
        }
        res.set_content(reply("ok"), "application/json");
    });
    RemoteBackend backend("m", BackendKind::Reasoner, {server.url(), "", std::chrono::milliseconds(2000)});
    CHECK(backend.invoke(kRequest).text == "ok");
    CHECK(calls == 2);
}

TEST_CASE("remote backend gives up after the retry") {
    std::atomic<int> calls{0};
    LocalServer server([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 500;
    });
    RemoteBackend backend("m", BackendKind::Reasoner, {server.url(), "", std::chrono::milliseconds(2000)});
    try {
        backend.invoke(kRequest);
        FAIL("expected TransportError");
    } catch (const motionagent::Error& e) {
        CHECK(e.code() == ErrorCode::TransportError);
    }
    CHECK(calls == 2);
}

TEST_CASE("remote backend does not retry client errors") {
    std::atomic<int> calls{0};
    LocalServer server([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 400;
    });
    RemoteBackend backend("m", BackendKind::Reasoner, {server.url(), "", std::chrono::milliseconds(2000)});
    CHECK_THROWS_AS(backend.invoke(kRequest), motionagent::Error);
    CHECK(calls == 1);
}

TEST_CASE("remote backend times out without retrying") {
    std::atomic<int> calls{0};
    LocalServer server([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(600));
        res.set_content(reply("late"), "application/json");
    });
    RemoteBackend backend("m", BackendKind::Reasoner, {server.url(), "", std::chrono::milliseconds(200)});
    try {
        backend.invoke(kRequest);
        FAIL("expected Timeout");
    } catch (const motionagent::Error& e) {
        CHECK(e.code() == ErrorCode::Timeout);
    }
    CHECK(calls == 1);
}

TEST_CASE("remote backend rejects malformed replies") {
    LocalServer server([&](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices": []})", "application/json");
    });
    RemoteBackend backend("m", BackendKind::Reasoner, {server.url(), "", std::chrono::milliseconds(2000)});
    try {
        backend.invoke(kRequest);
        FAIL("expected MalformedResponse");
    } catch (const motionagent::Error& e) {
        CHECK(e.code() == ErrorCode::MalformedResponse);
    }
}

TEST_CASE("remote backend configuration errors") {
    ::unsetenv("MA_TEST_MISSING");
    CHECK_THROWS_AS(RemoteBackend("m", BackendKind::Reasoner, {"http://x/y", "MA_TEST_MISSING", std::chrono::milliseconds(10)}), motionagent::Error);
    CHECK_THROWS_AS(RemoteBackend("m", BackendKind::Reasoner, {"no-scheme", "", std::chrono::milliseconds(10)}), motionagent::Error);
    CHECK_THROWS_AS(RemoteBackend("m", BackendKind::Reasoner, {"http://x/y", "", std::chrono::milliseconds(0)}), motionagent::Error);
}
