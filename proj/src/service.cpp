#include "kgqa/service.hpp"

#include <fstream>

#include <httplib.h>

#include "kgqa/executor.hpp"
#include "kgqa/query_checker.hpp"

namespace kgqa::service {

using nlohmann::json;

namespace {

ApiResponse error(int status, const std::string& code, const std::string& message) {
    return {status, {{"error", code}, {"message", message}}};
}

std::optional<json> parse_body(const std::string& body) {
    auto doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
    return doc;
}

}  // namespace

std::vector<std::pair<std::string, llm::LlmConfig>> parse_model_list(const json& doc) {
    std::vector<std::pair<std::string, llm::LlmConfig>> out;
    auto add = [&](const json& m) {
        auto cfg = llm::parse_llm_config(m);
        auto name = m.value("name", cfg.model_name);
        for (const auto& [existing, _] : out) {
            if (existing == name) throw std::invalid_argument("duplicate model name '" + name + "'");
        }
        out.emplace_back(std::move(name), std::move(cfg));
    };
    if (doc.is_object() && doc.contains("models")) {
        const auto& models = doc["models"];
        if (!models.is_array() || models.empty()) throw std::invalid_argument("'models' must be a non-empty array");
        for (const auto& m : models) add(m);
    } else {
        add(doc);
    }
    return out;
}

std::vector<std::pair<std::string, llm::LlmConfig>> load_model_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    auto doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw std::invalid_argument(path.string() + ": invalid JSON");
    return parse_model_list(doc);
}

Service::Service(KnowledgeBase kb, ServiceConfig config) : kb_(std::move(kb)), config_(std::move(config)) {
    if (config_.models.empty()) throw std::invalid_argument("service needs at least one model");
    if (config_.templates.empty()) throw std::invalid_argument("service needs at least one prompt template");
    for (const auto& [name, cfg] : config_.models) {
        clients_[name] = std::make_unique<llm::LlmClient>(cfg, config_.transcripts, config_.transcript_mode);
    }
}

ApiResponse Service::ask(const std::string& body) const {
    const auto req = parse_body(body);
    if (!req) return error(400, "invalid_request", "body must be a JSON object");

    const auto q = req->find("question");
    if (q == req->end() || !q->is_string()) return error(400, "invalid_request", "'question' must be a string");
    const auto question = q->get<std::string>();
    if (question.find_first_not_of(" \t\r\n") == std::string::npos) {
        return error(400, "invalid_request", "'question' must not be empty");
    }

    const auto template_id = req->value("template_id", std::string("zero_shot"));
    const auto* tmpl = llm::find_template(config_.templates, template_id);
    if (!tmpl) {
        std::string valid;
        for (const auto& t : config_.templates) valid += (valid.empty() ? "" : ", ") + t.id;
        return error(400, "unknown_template", "unknown template_id '" + template_id + "'; valid ids: " + valid);
    }

    const auto model = req->value("model", config_.models.front().first);
    const auto client = clients_.find(model);
    if (client == clients_.end()) return error(400, "unknown_model", "unknown model '" + model + "'");

    AnswerOptions options;
    options.generate_sentence = req->value("generate_sentence", false);
    if (config_.answer_templates) options.answer_templates = &*config_.answer_templates;

    const auto trace = answer_question(question, kb_, *client->second, *tmpl, options);
    const bool upstream_down = trace.failure && trace.failure->transport &&
                               (trace.failure->stage == "llm" || trace.failure->stage == "sentence");
    return {upstream_down ? 502 : 200, trace_to_json(trace)};
}

ApiResponse Service::execute(const std::string& body) const {
    const auto req = parse_body(body);
    if (!req) return error(400, "invalid_request", "body must be a JSON object");
    const auto text = req->find("cypher");
    if (text == req->end() || !text->is_string()) return error(400, "invalid_request", "'cypher' must be a string");

    cypher::CypherQuery query;
    try {
        query = cypher::parse_query(text->get<std::string>());
    } catch (const cypher::ParseError& e) {
        return {422, {{"error", "parse_error"}, {"message", e.what()}, {"position", e.position()}}};
    }

    std::vector<ResultRow> rows;
    try {
        rows = execute_query(kb_.graph, query);
    } catch (const ExecutionError& e) {
        return error(422, "execution_error", e.what());
    }
    return {200,
            {{"query", cypher::serialize_query(query)},
             {"query_ast", cypher::query_to_json(query)},
             {"rows", rows},
             {"results", flatten_rows(rows)},
             {"diagnostics", checker::validate_query(query, kb_.schema, kb_.index)}}};
}

ApiResponse Service::schema() const {
    auto body = schema_to_json(kb_.schema);
    body["text"] = kb_.schema_text;
    return {200, std::move(body)};
}

ApiResponse Service::templates() const {
    json list = json::array();
    for (const auto& t : config_.templates) list.push_back({{"id", t.id}, {"body", t.body}});
    return {200, {{"templates", list}}};
}

ApiResponse Service::models() const {
    json list = json::array();
    for (const auto& [name, cfg] : config_.models) {
        list.push_back({{"name", name}, {"model_name", cfg.model_name}, {"backend", llm::to_string(cfg.backend)}});
    }
    return {200, {{"models", list}, {"default", config_.models.front().first}}};
}

ApiResponse Service::health() const {
    return {200, {{"status", "ok"}, {"graph_nodes", kb_.graph.node_count()}}};
}

void Service::mount(httplib::Server& server) const {
    const auto origin = config_.cors_origin;
    auto reply = [](httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json; charset=utf-8");
    };

    server.set_default_headers({{"Access-Control-Allow-Origin", origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/api/ask", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, ask(req.body));
    });
    server.Post("/api/execute", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, execute(req.body));
    });
    server.Get("/api/schema", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, schema()); });
    server.Get("/api/templates",
               [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, templates()); });
    server.Get("/api/models", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, models()); });
    server.Get("/api/health", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, health()); });

    server.set_exception_handler([reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string msg = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            msg = e.what();
        } catch (...) {
        }
        reply(res, error(500, "internal_error", msg));
    });

    if (config_.static_dir && !server.set_mount_point("/", config_.static_dir->string())) {
        throw std::invalid_argument("static dir does not exist: " + config_.static_dir->string());
    }
}

}  // namespace kgqa::service
