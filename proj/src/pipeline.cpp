#include "kgqa/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "kgqa/executor.hpp"

namespace kgqa {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing template file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
    for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
        text.replace(pos, from.size(), to);
    }
    return text;
}

std::string describe_unresolved(const checker::RepairReport& report) {
    std::string msg = "query has unresolved defects: ";
    for (std::size_t i = 0; i < report.unresolved.size(); ++i) {
        if (i > 0) msg += "; ";
        msg += std::string(checker::to_string(report.unresolved[i].kind)) + " (" + report.unresolved[i].detail + ")";
    }
    return msg;
}

}  // namespace

AnswerTemplates load_answer_templates(const std::filesystem::path& dir) {
    return {read_file(dir / "answer_sentence.txt"), read_file(dir / "answer_sentence_empty.txt")};
}

std::string compose_answer_prompt(const AnswerTemplates& templates, const std::string& question,
                                  const std::vector<std::string>& results) {
    if (results.empty()) return replace_all(templates.no_results, "{question}", question);
    std::string listing;
    for (const auto& r : results) listing += "- " + r + "\n";
    // Substitute results first so a question containing "{results}" stays literal.
    auto prompt = replace_all(templates.with_results, "{results}", listing);
    return replace_all(std::move(prompt), "{question}", question);
}

std::string generate_answer_sentence(const std::string& question, const std::vector<std::string>& results,
                                     const llm::LlmClient& llm, const AnswerTemplates& templates) {
    return llm.complete(compose_answer_prompt(templates, question, results));
}

PipelineTrace answer_question(const std::string& question, const KnowledgeBase& kb, const llm::LlmClient& llm,
                              const llm::PromptTemplate& tmpl, const AnswerOptions& options) {
    PipelineTrace trace;
    trace.question = question;
    trace.template_id = tmpl.id;
    trace.model_name = llm.config().model_name;
    trace.rendered_prompt = llm::render_prompt(tmpl, kb.schema_text, question);

    try {
        trace.raw_llm_output = llm.complete(trace.rendered_prompt);
    } catch (const llm::LlmError& e) {
        trace.failure = StageFailure{"llm", e.what(), e.transport_level()};
        return trace;
    }

    try {
        trace.extracted_cypher = cypher::extract_cypher_block(trace.raw_llm_output);
    } catch (const cypher::ExtractionError& e) {
        trace.failure = StageFailure{"extract", e.what()};
        return trace;
    }

    trace.repair_report = checker::check_and_repair(*trace.extracted_cypher, kb.schema, kb.index);
    if (!trace.repair_report->unresolved.empty()) {
        trace.failure = StageFailure{"check", describe_unresolved(*trace.repair_report)};
        return trace;
    }

    try {
        auto query = cypher::parse_query(trace.repair_report->output_query);
        trace.results = flatten_rows(execute_query(kb.graph, query));
        trace.repaired_ast = std::move(query);
        trace.executed_query = trace.repair_report->output_query;
    } catch (const std::exception& e) {
        trace.failure = StageFailure{"execute", e.what()};
        return trace;
    }

    if (options.generate_sentence) {
        if (!options.answer_templates) {
            trace.failure = StageFailure{"sentence", "no answer-sentence templates configured"};
            return trace;
        }
        try {
            trace.answer_sentence = generate_answer_sentence(question, trace.results, llm, *options.answer_templates);
        } catch (const llm::LlmError& e) {
            trace.failure = StageFailure{"sentence", e.what(), e.transport_level()};
        }
    }
    return trace;
}

json trace_to_json(const PipelineTrace& trace) {
    auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
    json j = {
        {"question", trace.question},
        {"template_id", trace.template_id},
        {"model_name", trace.model_name},
        {"rendered_prompt", trace.rendered_prompt},
        {"raw_llm_output", trace.raw_llm_output},
        {"extracted_cypher", opt(trace.extracted_cypher)},
        {"repair_report", trace.repair_report ? checker::report_to_json(*trace.repair_report) : json(nullptr)},
        {"query_ast", trace.repaired_ast ? cypher::query_to_json(*trace.repaired_ast) : json(nullptr)},
        {"executed_query", opt(trace.executed_query)},
        {"results", trace.results},
        {"answer_sentence", opt(trace.answer_sentence)},
        {"failure", nullptr},
    };
    if (trace.failure) {
        j["failure"] = {{"stage", trace.failure->stage},
                        {"message", trace.failure->message},
                        {"transport", trace.failure->transport}};
    }
    return j;
}

}  // namespace kgqa
