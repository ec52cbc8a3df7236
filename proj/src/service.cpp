#include "toolcal/service.hpp"

#include "toolcal/parse.hpp"
#include "toolcal/profile.hpp"
#include "toolcal/reward.hpp"

#include <atomic>
#include <csignal>
#include <cstring>
#include <iostream>
#include <stdexcept>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

namespace toolcal {

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) {
    g_stop.store(true);
}

json error_response(const json & id, const std::string & code, const std::string & message) {
    return json{{"id", id}, {"error", code}, {"message", message}};
}

}  // namespace

RewardService::RewardService(ShapingConfig cfg, std::vector<ToolSchema> default_schemas)
    : cfg_(std::move(cfg)), default_schemas_(schema_map(default_schemas)) {
    cfg_.validate();
}

json RewardService::handle_request(const json & request) const {
    json id = nullptr;
    if (request.is_object() && request.contains("id")) {
        id = request["id"];
    }
    if (!request.is_object()) {
        return error_response(id, "bad_request", "request must be a JSON object");
    }
    try {
        const std::string kind = request.value("kind", std::string("score"));
        if (kind != "score" && kind != "judge") {
            return error_response(id, "unsupported_kind", "unknown request kind '" + kind + "'");
        }
        if (!request.contains("raw_text") || !request["raw_text"].is_string()) {
            return error_response(id, "bad_request", "missing raw_text");
        }
        if (!request.contains("reference_calls")) {
            return error_response(id, "bad_request", "missing reference_calls");
        }
        const Trajectory traj = parse_trajectory(request["raw_text"].get<std::string>());
        const std::vector<ToolCall> refs = calls_from_json(request["reference_calls"]);
        SchemaMap schemas = default_schemas_;
        if (request.contains("schemas")) {
            for (auto & s : schemas_from_json(request["schemas"])) {
                schemas[s.function_name] = std::move(s);
            }
        }

        const double hardness_value = request.value("hardness", 0.5);
        if (!(hardness_value >= 0.0 && hardness_value <= 1.0)) {
            return error_response(id, "bad_request", "hardness out of [0,1]");
        }
        const int band = request.contains("band")
                             ? request["band"].get<int>()
                             : band_of(hardness_value, cfg_.band_thresholds);
        const std::int64_t step =
            request.contains("step") ? request["step"].get<std::int64_t>() : cfg_.t_warmup;

        if (kind == "judge") {
            const RewardVector v = reward_vector(refs, traj.calls, schemas);
            const JudgeVerdict verdict = stub_judge(traj, v);
            return json{{"id", id}, {"judge", to_json(verdict)}};
        }
        const RewardBreakdown b = composite_reward(traj, refs, schemas, hardness_value, band,
                                                   step, cfg_);
        return json{{"id", id},
                    {"verifier", b.verifier},
                    {"reward", to_json(b)},
                    {"failure", to_json(b.failure)}};
    } catch (const std::exception & e) {
        return error_response(id, "data_error", e.what());
    }
}

std::string RewardService::handle_line(const std::string & line) const {
    json request = json::parse(line, nullptr, false);
    if (request.is_discarded()) {
        return error_response(nullptr, "parse_error", "request line is not valid JSON").dump();
    }
    return handle_request(request).dump();
}

std::size_t serve_stream(const RewardService & service, std::istream & in, std::ostream & out) {
    std::size_t responses = 0;
    std::string line;
    while (!g_stop.load() && std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        out << service.handle_line(line) << "\n" << std::flush;
        responses++;
    }
    return responses;
}

void serve_socket(const RewardService & service, int port) {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) {
        throw std::runtime_error("socket() failed");
    }
    int opt = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &opt, sizeof(opt));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::bind(listener, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) < 0) {
        ::close(listener);
        throw std::runtime_error("bind() failed on port " + std::to_string(port));
    }
    if (::listen(listener, 4) < 0) {
        ::close(listener);
        throw std::runtime_error("listen() failed");
    }

    while (!g_stop.load()) {
        const int client = ::accept(listener, nullptr, nullptr);
        if (client < 0) {
            if (g_stop.load()) break;
            continue;
        }
        std::string buffer;
        char chunk[4096];
        for (;;) {
            const ssize_t n = ::read(client, chunk, sizeof(chunk));
            if (n <= 0) break;
            buffer.append(chunk, static_cast<size_t>(n));
            size_t nl;
            while ((nl = buffer.find('\n')) != std::string::npos) {
                const std::string line = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                if (line.empty()) continue;
                const std::string response = service.handle_line(line) + "\n";
                size_t sent = 0;
                while (sent < response.size()) {
                    const ssize_t w = ::write(client, response.data() + sent, response.size() - sent);
                    if (w <= 0) break;
                    sent += static_cast<size_t>(w);
                }
            }
        }
        ::close(client);
    }
    ::close(listener);
}

}  // namespace toolcal
