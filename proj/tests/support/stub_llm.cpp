#include "support/stub_llm.hpp"

#include <chrono>

#include <httplib.h>

namespace kgqa::testing {

using nlohmann::json;

StubLlmServer::StubLlmServer(Responder responder)
    : responder_(std::move(responder)), server_(std::make_unique<httplib::Server>()) {
    auto handle = [this](const httplib::Request& req, httplib::Response& res, bool openai) {
        if (int ms = delay_ms_.load(); ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        auto body = json::parse(req.body, nullptr, false);
        {
            std::lock_guard lock(mutex_);
            requests_.push_back(body);
            auth_.push_back(req.get_header_value("Authorization"));
        }
        if (int status = status_.load(); status != 0) {
            res.status = status;
            res.set_content(R"({"error":"injected"})", "application/json");
            return;
        }
        if (malformed_) {
            res.set_content("{not json", "application/json");
            return;
        }
        std::string prompt;
        if (openai && body.is_object() && body.contains("messages")) {
            prompt = body["messages"].back().value("content", "");
        } else if (body.is_object()) {
            prompt = body.value("prompt", "");
        }
        const auto text = responder_(prompt);
        json out = openai ? json{{"id", "stub"},
                                 {"object", "chat.completion"},
                                 {"choices", {{{"index", 0},
                                               {"message", {{"role", "assistant"}, {"content", text}}},
                                               {"finish_reason", "stop"}}}}}
                          : json{{"model", body.value("model", "")}, {"response", text}, {"done", true}};
        res.set_content(out.dump(), "application/json");
    };
    server_->Post("/v1/chat/completions",
                  [handle](const httplib::Request& req, httplib::Response& res) { handle(req, res, true); });
    server_->Post("/api/generate",
                  [handle](const httplib::Request& req, httplib::Response& res) { handle(req, res, false); });
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

StubLlmServer::~StubLlmServer() {
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string StubLlmServer::url() const { return "http://127.0.0.1:" + std::to_string(port_); }

std::vector<json> StubLlmServer::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

std::vector<std::string> StubLlmServer::authorization_headers() const {
    std::lock_guard lock(mutex_);
    return auth_;
}

StubLlmServer::Responder constant_response(std::string text) {
    return [text = std::move(text)](const std::string&) { return text; };
}

}  // namespace kgqa::testing
