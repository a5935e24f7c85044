#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgqa/cypher.hpp"
#include "kgqa/graph_store.hpp"
#include "kgqa/llm_gateway.hpp"
#include "kgqa/query_checker.hpp"

namespace kgqa {

struct StageFailure {
    std::string stage;  // llm | extract | check | execute | sentence
    std::string message;
    bool transport = false;  // the LLM call itself failed (network, timeout, HTTP status, replay miss)
};

struct PipelineTrace {
    std::string question;
    std::string template_id;
    std::string model_name;
    std::string rendered_prompt;
    std::string raw_llm_output;
    std::optional<std::string> extracted_cypher;
    std::optional<checker::RepairReport> repair_report;
    std::optional<cypher::CypherQuery> repaired_ast;
    std::optional<std::string> executed_query;
    std::vector<std::string> results;
    std::optional<std::string> answer_sentence;
    std::optional<StageFailure> failure;
};

/// Prompts used for the final natural-language sentence.
struct AnswerTemplates {
    std::string with_results;  // {question}, {results}
    std::string no_results;    // {question}
};

AnswerTemplates load_answer_templates(const std::filesystem::path& dir);

/// Fills the answer prompt; results are listed one per line, verbatim.
std::string compose_answer_prompt(const AnswerTemplates& templates, const std::string& question,
                                  const std::vector<std::string>& results);

std::string generate_answer_sentence(const std::string& question, const std::vector<std::string>& results,
                                     const llm::LlmClient& llm, const AnswerTemplates& templates);

struct AnswerOptions {
    bool generate_sentence = false;
    const AnswerTemplates* answer_templates = nullptr;  // required when generate_sentence
};

/// prompt → completion → extraction → check/repair → execution → sentence.
/// Nothing escapes: the first failing stage lands in trace.failure and the
/// later stages stay empty. A report with unresolved defects stops before
/// execution.
PipelineTrace answer_question(const std::string& question, const KnowledgeBase& kb, const llm::LlmClient& llm,
                              const llm::PromptTemplate& tmpl, const AnswerOptions& options = {});

nlohmann::json trace_to_json(const PipelineTrace& trace);

}  // namespace kgqa
