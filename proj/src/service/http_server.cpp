#include "motionagent/service/http_server.hpp"

#include "motionagent/common/text.hpp"

#include <httplib.h>

#include <thread>

namespace motionagent::service {

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::SessionNotFound:
        case ErrorCode::TurnNotFound:
        case ErrorCode::UnknownTool: return 404;
        case ErrorCode::MediaTooLarge: return 413;
        case ErrorCode::Unauthorized: return 401;
        case ErrorCode::Conflict:
        case ErrorCode::DuplicateToolId: return 409;
        case ErrorCode::StorageError: return 500;
        default: return 400;
    }
}

std::string sse_frame(const std::string& event, const json& data) {
    return "event: " + event + "\ndata: " + data.dump(-1, ' ', false, json::error_handler_t::replace) + "\n\n";
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
}

void send_error(httplib::Response& res, const Error& e) { send_json(res, http_status(e.code()), {{"error", e.to_json()}}); }

struct TurnInput {
    UserQuery query;
    std::optional<std::string> media_bytes;
    std::string media_name;
    std::optional<Modality> media_kind;
};

TurnInput parse_turn_request(const httplib::Request& req) {
    TurnInput in;
    json q;
    if (req.is_multipart_form_data()) {
        if (!req.has_file("query")) throw Error(ErrorCode::InvalidArgument, "multipart turn needs a 'query' part");
        q = json::parse(req.get_file_value("query").content, nullptr, false);
        if (req.has_file("media")) {
            const auto media = req.get_file_value("media");
            in.media_bytes = media.content;
            in.media_name = media.filename;
        }
        if (req.has_file("media_kind")) q["media_kind"] = req.get_file_value("media_kind").content;
    } else {
        q = json::parse(req.body, nullptr, false);
    }
    if (q.is_discarded() || !q.is_object()) throw Error(ErrorCode::InvalidArgument, "query must be a JSON object");
    if (!q.contains("text") || !q["text"].is_string()) throw Error(ErrorCode::InvalidArgument, "query.text is required");
    in.query.text = q["text"].get<std::string>();
    try {
        if (q.contains("attachments")) in.query.attachments = q["attachments"].get<std::vector<MediaRef>>();
        if (q.contains("media_kind")) in.media_kind = modality_from_string(q["media_kind"].get<std::string>());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed query: ") + e.what());
    }
    in.query.validate();
    return in;
}

std::string bearer(const httplib::Request& req) {
    const auto h = req.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    return text::starts_with(h, prefix) ? text::trim(h.substr(prefix.size())) : std::string();
}

} // namespace

struct HttpServer::Impl {
    std::shared_ptr<Service> service;
    httplib::Server server;
    std::thread thread;

    void require_admin(const httplib::Request& req) {
        if (!service->authorized(bearer(req))) throw Error(ErrorCode::Unauthorized, "admin token missing or wrong");
    }

    template <typename Fn>
    httplib::Server::Handler guarded(Fn fn) {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const Error& e) {
                send_error(res, e);
            }
        };
    }

    void routes() {
        server.set_payload_max_length(service->options().media_limit_bytes + (1u << 20));
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            send_json(res, 500, {{"error", {{"code", "Internal"}, {"message", what}}}});
        });

        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"status", "ok"}}); });

        server.Post("/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
            send_json(res, 201, to_json(service->create_session()));
        }));

        server.Get(R"(/sessions/([A-Za-z0-9_-]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, to_json(service->get_session(req.matches[1])));
        }));

        server.Get(R"(/sessions/([A-Za-z0-9_-]+)/turns/(\d{1,9})/trace)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const auto n = static_cast<std::uint32_t>(std::stoul(req.matches[2]));
                       res.status = 200;
                       res.set_content(service->get_trace(req.matches[1], n), "application/json");
                   }));

        server.Post(R"(/sessions/([A-Za-z0-9_-]+)/turns)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            if (!service->store().exists(id)) throw Error(ErrorCode::SessionNotFound, "no session '" + id + "'");
            auto in = parse_turn_request(req);
            if (in.media_bytes) {
                in.query.attachments.push_back(service->store_media(*in.media_bytes, in.media_name, in.media_kind));
            }
            auto lease = std::make_shared<Service::TurnLease>(service->begin_turn(id));
            auto svc = service;
            auto query = std::make_shared<UserQuery>(std::move(in.query));
            res.set_header("Cache-Control", "no-cache");
            res.set_chunked_content_provider(
                "text/event-stream", [svc, lease, query](size_t, httplib::DataSink& sink) {
                    bool ended = false;
                    auto emit = [&sink, &ended](const std::string& event, const json& data) {
                        ended = ended || event == "answer" || event == "failure";
                        const auto frame = sse_frame(event, data);
                        sink.write(frame.data(), frame.size());
                    };
                    try {
                        svc->run_turn(*lease, *query, emit);
                    } catch (const Error& e) {
                        if (!ended) emit("failure", {{"code", to_string(e.code())}, {"message", e.message()}});
                    } catch (const std::exception& e) {
                        if (!ended) emit("failure", {{"code", "Internal"}, {"message", e.what()}});
                    }
                    sink.done();
                    return true;
                });
        }));

        server.Get("/admin/tools", guarded([this](const httplib::Request& req, httplib::Response& res) {
            require_admin(req);
            send_json(res, 200, service->list_tools());
        }));

        server.Post("/admin/tools", guarded([this](const httplib::Request& req, httplib::Response& res) {
            require_admin(req);
            auto entry = json::parse(req.body, nullptr, false);
            if (entry.is_discarded()) throw Error(ErrorCode::InvalidArgument, "body must be a JSON tool entry");
            send_json(res, 201, service->register_tool(entry));
        }));

        server.Delete(R"(/admin/tools/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            require_admin(req);
            send_json(res, 200, service->disable_tool(req.matches[1]));
        }));

        server.Delete("/admin/tools", guarded([this](const httplib::Request& req, httplib::Response& res) {
            require_admin(req);
            auto body = json::parse(req.body, nullptr, false);
            std::string tool_id = req.get_param_value("tool_id");
            if (tool_id.empty() && body.is_object()) tool_id = body.value("tool_id", std::string());
            if (tool_id.empty()) throw Error(ErrorCode::InvalidArgument, "tool_id is required");
            send_json(res, 200, service->disable_tool(tool_id));
        }));
    }
};

HttpServer::HttpServer(std::shared_ptr<Service> service) : impl_(std::make_unique<Impl>()) {
    impl_->service = std::move(service);
    impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound <= 0) throw Error(ErrorCode::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

int HttpServer::start(const std::string& host, int port) {
    const int bound = bind(host, port);
    impl_->thread = std::thread([this] { listen(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

} // namespace motionagent::service
