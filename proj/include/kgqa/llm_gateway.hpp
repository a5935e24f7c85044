#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace kgqa::llm {

// ---------------------------------------------------------------------------
// Prompt templates
// ---------------------------------------------------------------------------

/// The eight generation prompts, in file order.
inline constexpr std::string_view kTemplateIds[] = {
    "zero_shot", "one_shot", "few_shot", "simple", "syntax_emphasis", "social_engineering", "expert_role",
    "llama3_custom",
};

struct PromptTemplate {
    std::string id;
    std::string body;
};

class TemplateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads `<dir>/<id>.txt` for every id in kTemplateIds. Each body must contain
/// `{schema}` and `{question}` exactly once.
std::vector<PromptTemplate> load_templates(const std::filesystem::path& dir);
PromptTemplate load_template_file(const std::string& id, const std::filesystem::path& file);
const PromptTemplate* find_template(const std::vector<PromptTemplate>& templates, std::string_view id);

/// Format-string style substitution: `{schema}` and `{question}` are replaced,
/// `{{` and `}}` collapse to literal braces, substituted text is not rescanned.
std::string render_prompt(const PromptTemplate& tmpl, std::string_view schema_text, std::string_view question);

// ---------------------------------------------------------------------------
// Completion backends
// ---------------------------------------------------------------------------

enum class Backend { OpenAiCompatible, Ollama, Replay };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view name);

struct LlmConfig {
    Backend backend = Backend::Replay;
    std::string endpoint_url;
    std::string model_name;
    double temperature = 0.0;
    std::optional<std::string> api_key;
    std::chrono::seconds timeout{120};
    std::optional<int> max_tokens;
};

/// Reads {backend, endpoint_url, model_name, temperature, timeout_seconds,
/// max_tokens, api_key}. A missing api_key falls back to $LLM_API_KEY.
LlmConfig parse_llm_config(const nlohmann::json& doc);

enum class LlmErrorKind { Network, Timeout, HttpStatus, ReplayMiss, BadResponse };

class LlmError : public std::runtime_error {
public:
    LlmError(LlmErrorKind kind, const std::string& message, int status = 0, std::string body = {});

    LlmErrorKind kind() const { return kind_; }
    int status() const { return status_; }
    const std::string& body() const { return body_; }
    bool transport_level() const { return kind_ != LlmErrorKind::BadResponse; }

private:
    LlmErrorKind kind_;
    int status_;
    std::string body_;
};

std::string_view to_string(LlmErrorKind kind);

// ---------------------------------------------------------------------------
// Transcripts
// ---------------------------------------------------------------------------

struct TranscriptEntry {
    std::string prompt_hash;
    std::string model_name;
    std::string prompt;
    std::string response;
    std::string recorded_at;
};

/// Hex SHA-256 over model name and prompt.
std::string prompt_hash(std::string_view model_name, std::string_view prompt);

/// Append-only JSON-lines store. Reads are concurrent; appends serialize.
/// A later line for the same hash shadows an earlier one.
class TranscriptStore {
public:
    TranscriptStore() = default;
    explicit TranscriptStore(std::filesystem::path file);

    std::optional<TranscriptEntry> find(const std::string& hash) const;
    void append(TranscriptEntry entry);
    std::size_t size() const;
    const std::optional<std::filesystem::path>& file() const { return file_; }

private:
    std::optional<std::filesystem::path> file_;
    mutable std::mutex mutex_;
    std::map<std::string, TranscriptEntry> entries_;
};

enum class TranscriptMode { Off, Record, Replay };

/// One model endpoint plus optional transcript handling.
///
/// Replay mode answers from the store and never touches the network,
/// whatever the configured backend. Record mode performs the live call and
/// appends the exchange.
class LlmClient {
public:
    LlmClient(LlmConfig config, std::shared_ptr<TranscriptStore> store = nullptr,
              TranscriptMode mode = TranscriptMode::Off);

    std::string complete(const std::string& prompt) const;

    const LlmConfig& config() const { return config_; }
    TranscriptMode mode() const { return mode_; }

private:
    std::string call_backend(const std::string& prompt) const;

    LlmConfig config_;
    std::shared_ptr<TranscriptStore> store_;
    TranscriptMode mode_;
};

/// Request body and response-text extraction for each wire format.
nlohmann::json openai_request_body(const LlmConfig& config, const std::string& prompt);
nlohmann::json ollama_request_body(const LlmConfig& config, const std::string& prompt);
std::string openai_response_text(const std::string& body);
std::string ollama_response_text(const std::string& body);

}  // namespace kgqa::llm
