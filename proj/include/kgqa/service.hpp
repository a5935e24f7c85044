#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgqa/graph_store.hpp"
#include "kgqa/llm_gateway.hpp"
#include "kgqa/pipeline.hpp"

namespace httplib {
class Server;
}

namespace kgqa::service {

struct ServiceConfig {
    std::vector<llm::PromptTemplate> templates;
    // First entry is the default model.
    std::vector<std::pair<std::string, llm::LlmConfig>> models;
    std::optional<AnswerTemplates> answer_templates;
    std::shared_ptr<llm::TranscriptStore> transcripts;
    llm::TranscriptMode transcript_mode = llm::TranscriptMode::Off;
    std::string cors_origin = "*";
    std::optional<std::filesystem::path> static_dir;
};

/// Accepts a single model object or {"models": [...]} with optional "name" keys.
std::vector<std::pair<std::string, llm::LlmConfig>> parse_model_list(const nlohmann::json& doc);
std::vector<std::pair<std::string, llm::LlmConfig>> load_model_list(const std::filesystem::path& path);

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

/// JSON API over one read-only knowledge base.
///
/// POST /api/ask      {question, model?, template_id?, generate_sentence?} → trace
/// GET  /api/schema   → {text, node_labels, relation_triples, self_bidirectional}
/// GET  /api/templates, GET /api/models, GET /api/health
/// POST /api/execute  {cypher} → {query, query_ast, rows, results, diagnostics}
///
/// Handlers take the raw request body so they can be exercised without sockets.
/// AST JSON: each pattern is an array alternating {type:"node", variable,
/// label, name} and {type:"rel", relation, direction}; direction is
/// "left_to_right" or "right_to_left".
class Service {
public:
    Service(KnowledgeBase kb, ServiceConfig config);

    ApiResponse ask(const std::string& body) const;
    ApiResponse execute(const std::string& body) const;
    ApiResponse schema() const;
    ApiResponse templates() const;
    ApiResponse models() const;
    ApiResponse health() const;

    /// Registers the routes, CORS handling and the optional static mount.
    void mount(httplib::Server& server) const;

    const KnowledgeBase& knowledge_base() const { return kb_; }

private:
    KnowledgeBase kb_;
    ServiceConfig config_;
    std::map<std::string, std::unique_ptr<llm::LlmClient>> clients_;
};

}  // namespace kgqa::service
