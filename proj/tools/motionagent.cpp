#include "motionagent/agents/engine.hpp"
#include "motionagent/bench/dataset.hpp"
#include "motionagent/bench/runner.hpp"
#include "motionagent/common/error.hpp"
#include "motionagent/config/engine_config.hpp"
#include "motionagent/service/http_server.hpp"
#include "motionagent/service/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace motionagent;
namespace fs = std::filesystem;

namespace {

enum Exit { kAnswered = 0, kFailed = 1, kConfigInvalid = 2, kError = 3 };

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << bytes;
    if (!out.flush()) throw Error(ErrorCode::StorageError, "cannot write " + p.string());
}

struct RunArgs {
    std::string config, query, media, media_kind, trace;
    std::optional<std::uint64_t> seed;
};

int cmd_run(const RunArgs& a) {
    auto cfg = config::load_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    auto rt = config::build_runtime(cfg);

    UserQuery q;
    q.text = a.query;
    // Same session id and media identity the service would assign to the
    // first turn of its first session.
    q.session_id = service::SessionIdGenerator::nth(cfg.seed, 0);
    q.turn_index = 0;
    if (!a.media.empty()) {
        const auto bytes = read_file(a.media);
        const auto kind = a.media_kind.empty() ? infer_modality_from_filename(a.media) : modality_from_string(a.media_kind);
        q.attachments.push_back(content_addressed_media(bytes, kind));
    }

    auto out = agents::run_session_turn(q, *rt.engine);
    if (!a.trace.empty()) write_file(a.trace, agents::serialize_trace(out.trace));
    if (out.answered()) {
        std::cout << out.answer->text << "\n";
        return kAnswered;
    }
    std::cerr << "turn failed: " << to_string(out.failure->code()) << ": " << out.failure->message() << "\n";
    return kFailed;
}

struct BenchArgs {
    std::string dataset, format, config, out, record_dir;
    std::optional<std::uint64_t> seed;
    size_t concurrency = 1;
};

int cmd_bench(const BenchArgs& a) {
    auto cfg = config::load_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    config::RuntimeOptions ro;
    if (!a.record_dir.empty()) ro.record_dir = fs::path(a.record_dir);
    auto rt = config::build_runtime(cfg, ro);

    const auto format = bench::bench_format_from_string(a.format);
    const auto cases = bench::load_dataset(a.dataset, format);

    bench::BenchOptions opts;
    opts.concurrency = a.concurrency;
    opts.seed = cfg.seed;
    opts.rubric_version = cfg.rubric_version;
    opts.prompts = cfg.prompts;
    opts.metadata = rt.bench_metadata();
    size_t done = 0;
    opts.on_case = [&](const bench::CaseResult& r) {
        ++done;
        std::cerr << "[" << done << "/" << cases.size() << "] " << r.case_id << (r.failed ? " failed" : "") << "\n";
    };
    const auto report = bench::run_benchmark(cases, format, *rt.engine, rt.judge, opts);
    write_file(a.out, bench::serialize_report(report));
    std::cout << bench::render_table(report);
    return 0;
}

int cmd_serve(const std::string& config_path, const std::string& host, int port) {
    auto cfg = config::load_config(config_path);
    auto rt = std::make_shared<config::Runtime>(config::build_runtime(cfg));
    auto svc = std::make_shared<service::Service>(rt, service::service_options_from(cfg));

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    service::HttpServer server(svc);
    const int bound = server.start(host, port);
    std::cout << "listening on " << host << ":" << bound << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-agent motion question answering"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Answer one query without the HTTP layer");
    run_cmd->add_option("--config", run.config, "Engine config JSON")->required();
    run_cmd->add_option("--query", run.query, "Question text")->required();
    run_cmd->add_option("--media", run.media, "Motion or video file");
    run_cmd->add_option("--media-kind", run.media_kind, "motion, video or motion_video");
    run_cmd->add_option("--trace", run.trace, "Write the trace JSON here");
    run_cmd->add_option("--seed", run.seed, "Override the config seed");

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark dataset");
    bench_cmd->add_option("--dataset", bench_args.dataset, "JSONL dataset")->required();
    bench_cmd->add_option("--format", bench_args.format, "movid, babelqa, mvbench or repcount")->required();
    bench_cmd->add_option("--config", bench_args.config, "Engine config JSON")->required();
    bench_cmd->add_option("--out", bench_args.out, "Report JSON path")->required();
    bench_cmd->add_option("--seed", bench_args.seed, "Override the config seed");
    bench_cmd->add_option("--record-dir", bench_args.record_dir, "Record every backend exchange as cassettes");
    bench_cmd->add_option("--concurrency", bench_args.concurrency, "Cases in flight")->check(CLI::PositiveNumber);

    std::string serve_config, host = "127.0.0.1";
    int port = 8080;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--config", serve_config, "Engine config JSON")->required();
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--port", port, "Port; 0 picks a free one");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return cmd_run(run);
        if (*bench_cmd) return cmd_bench(bench_args);
        if (*serve_cmd) return cmd_serve(serve_config, host, port);
    } catch (const Error& e) {
        std::cerr << to_string(e.code()) << ": " << e.message() << "\n";
        if (e.code() == ErrorCode::ConfigInvalid) {
            if (e.detail().is_array()) {
                for (const auto& issue : e.detail()) std::cerr << "  - " << issue.get<std::string>() << "\n";
            }
            return kConfigInvalid;
        }
        return kError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
