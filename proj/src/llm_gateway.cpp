#include "kgqa/llm_gateway.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <httplib.h>

namespace kgqa::llm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

PromptTemplate load_template_file(const std::string& id, const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw TemplateError("missing template file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    PromptTemplate t{id, buf.str()};
    for (std::string_view placeholder : {"{schema}", "{question}"}) {
        const auto n = count_occurrences(t.body, placeholder);
        if (n != 1) {
            throw TemplateError("template '" + id + "' must contain " + std::string(placeholder) +
                                " exactly once, found " + std::to_string(n));
        }
    }
    return t;
}

std::vector<PromptTemplate> load_templates(const fs::path& dir) {
    std::vector<PromptTemplate> out;
    for (auto id : kTemplateIds) {
        out.push_back(load_template_file(std::string(id), dir / (std::string(id) + ".txt")));
    }
    return out;
}

const PromptTemplate* find_template(const std::vector<PromptTemplate>& templates, std::string_view id) {
    for (const auto& t : templates) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

std::string render_prompt(const PromptTemplate& tmpl, std::string_view schema_text, std::string_view question) {
    const std::string_view body = tmpl.body;
    std::string out;
    out.reserve(body.size() + schema_text.size() + question.size());
    for (std::size_t i = 0; i < body.size();) {
        auto rest = body.substr(i);
        if (rest.starts_with("{{")) {
            out += '{';
            i += 2;
        } else if (rest.starts_with("}}")) {
            out += '}';
            i += 2;
        } else if (rest.starts_with("{schema}")) {
            out += schema_text;
            i += 8;
        } else if (rest.starts_with("{question}")) {
            out += question;
            i += 10;
        } else {
            out += body[i++];
        }
    }
    return out;
}

std::string_view to_string(Backend backend) {
    switch (backend) {
        case Backend::OpenAiCompatible: return "openai_compatible";
        case Backend::Ollama: return "ollama";
        case Backend::Replay: return "replay";
    }
    return "?";
}

Backend parse_backend(std::string_view name) {
    if (name == "openai_compatible" || name == "openai") return Backend::OpenAiCompatible;
    if (name == "ollama") return Backend::Ollama;
    if (name == "replay") return Backend::Replay;
    throw std::invalid_argument("unknown LLM backend '" + std::string(name) + "'");
}

LlmConfig parse_llm_config(const json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("LLM config must be a JSON object");
    LlmConfig cfg;
    cfg.backend = parse_backend(doc.value("backend", std::string("replay")));
    cfg.endpoint_url = doc.value("endpoint_url", std::string());
    cfg.model_name = doc.value("model_name", std::string());
    if (cfg.model_name.empty()) throw std::invalid_argument("LLM config requires model_name");
    cfg.temperature = doc.value("temperature", 0.0);
    if (cfg.temperature < 0) throw std::invalid_argument("temperature must be >= 0");
    cfg.timeout = std::chrono::seconds(doc.value("timeout_seconds", 120));
    if (auto it = doc.find("max_tokens"); it != doc.end() && !it->is_null()) cfg.max_tokens = it->get<int>();
    if (auto it = doc.find("api_key"); it != doc.end() && it->is_string()) {
        cfg.api_key = it->get<std::string>();
    } else if (const char* env = std::getenv("LLM_API_KEY"); env && *env) {
        cfg.api_key = env;
    }
    if (cfg.backend != Backend::Replay && cfg.endpoint_url.empty()) {
        throw std::invalid_argument("LLM config for '" + cfg.model_name + "' requires endpoint_url");
    }
    return cfg;
}

LlmError::LlmError(LlmErrorKind kind, const std::string& message, int status, std::string body)
    : std::runtime_error(message), kind_(kind), status_(status), body_(std::move(body)) {}

std::string_view to_string(LlmErrorKind kind) {
    switch (kind) {
        case LlmErrorKind::Network: return "network";
        case LlmErrorKind::Timeout: return "timeout";
        case LlmErrorKind::HttpStatus: return "http_status";
        case LlmErrorKind::ReplayMiss: return "replay_miss";
        case LlmErrorKind::BadResponse: return "bad_response";
    }
    return "?";
}

std::string prompt_hash(std::string_view model_name, std::string_view prompt) {
    std::string material;
    material.reserve(model_name.size() + prompt.size() + 1);
    material += model_name;
    material += '\0';
    material += prompt;
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(material.data(), material.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

TranscriptStore::TranscriptStore(fs::path file) : file_(std::move(file)) {
    std::ifstream in(*file_);
    if (!in) return;  // a missing file is an empty store
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto j = json::parse(line);
            TranscriptEntry e{j.at("prompt_hash").get<std::string>(), j.value("model_name", std::string()),
                              j.at("prompt").get<std::string>(), j.at("response").get<std::string>(),
                              j.value("recorded_at", std::string())};
            entries_[e.prompt_hash] = std::move(e);
        } catch (const json::exception& ex) {
            throw std::runtime_error(file_->string() + ":" + std::to_string(line_no) + ": " + ex.what());
        }
    }
}

std::optional<TranscriptEntry> TranscriptStore::find(const std::string& hash) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(hash);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void TranscriptStore::append(TranscriptEntry entry) {
    std::lock_guard lock(mutex_);
    if (file_) {
        if (file_->has_parent_path()) fs::create_directories(file_->parent_path());
        std::ofstream out(*file_, std::ios::app | std::ios::binary);
        json j = {{"prompt_hash", entry.prompt_hash},
                  {"model_name", entry.model_name},
                  {"prompt", entry.prompt},
                  {"response", entry.response},
                  {"recorded_at", entry.recorded_at}};
        out << j.dump() << '\n';
        if (!out) throw std::runtime_error("failed appending to " + file_->string());
    }
    entries_[entry.prompt_hash] = std::move(entry);
}

std::size_t TranscriptStore::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string base_path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    SplitUrl out;
    out.origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    out.base_path = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!out.base_path.empty() && out.base_path.back() == '/') out.base_path.pop_back();
    return out;
}

}  // namespace

json openai_request_body(const LlmConfig& config, const std::string& prompt) {
    json body = {{"model", config.model_name},
                 {"temperature", config.temperature},
                 {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
    if (config.max_tokens) body["max_tokens"] = *config.max_tokens;
    return body;
}

json ollama_request_body(const LlmConfig& config, const std::string& prompt) {
    json options = {{"temperature", config.temperature}};
    if (config.max_tokens) options["num_predict"] = *config.max_tokens;
    return {{"model", config.model_name}, {"prompt", prompt}, {"stream", false}, {"options", options}};
}

std::string openai_response_text(const std::string& body) {
    try {
        auto j = json::parse(body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw LlmError(LlmErrorKind::BadResponse, std::string("unexpected chat completion payload: ") + e.what(), 200,
                       body);
    }
}

std::string ollama_response_text(const std::string& body) {
    try {
        return json::parse(body).at("response").get<std::string>();
    } catch (const json::exception& e) {
        throw LlmError(LlmErrorKind::BadResponse, std::string("unexpected generate payload: ") + e.what(), 200, body);
    }
}

LlmClient::LlmClient(LlmConfig config, std::shared_ptr<TranscriptStore> store, TranscriptMode mode)
    : config_(std::move(config)), store_(std::move(store)), mode_(mode) {
    if (config_.backend == Backend::Replay) mode_ = TranscriptMode::Replay;
    if (mode_ != TranscriptMode::Off && !store_) store_ = std::make_shared<TranscriptStore>();
}

std::string LlmClient::complete(const std::string& prompt) const {
    if (mode_ == TranscriptMode::Replay) {
        const auto hash = prompt_hash(config_.model_name, prompt);
        auto entry = store_->find(hash);
        if (!entry) {
            throw LlmError(LlmErrorKind::ReplayMiss,
                           "no recorded response for model '" + config_.model_name + "' (prompt hash " + hash + ")");
        }
        return entry->response;
    }
    auto response = call_backend(prompt);
    if (mode_ == TranscriptMode::Record) {
        store_->append({prompt_hash(config_.model_name, prompt), config_.model_name, prompt, response,
                        utc_timestamp()});
    }
    return response;
}

std::string LlmClient::call_backend(const std::string& prompt) const {
    const bool openai = config_.backend == Backend::OpenAiCompatible;
    const auto url = split_url(config_.endpoint_url);
    const std::string path = url.base_path + (openai ? "/v1/chat/completions" : "/api/generate");
    const json body = openai ? openai_request_body(config_, prompt) : ollama_request_body(config_, prompt);

    httplib::Client client(url.origin);
    if (!client.is_valid()) throw LlmError(LlmErrorKind::Network, "invalid endpoint URL '" + config_.endpoint_url + "'");
    const auto secs = static_cast<time_t>(config_.timeout.count());
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_write_timeout(secs, 0);
    httplib::Headers headers;
    if (config_.api_key) headers.emplace("Authorization", "Bearer " + *config_.api_key);

    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        const auto err = res.error();
        const auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                              ? LlmErrorKind::Timeout
                              : LlmErrorKind::Network;
        throw LlmError(kind, "request to " + config_.endpoint_url + path + " failed: " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300) {
        throw LlmError(LlmErrorKind::HttpStatus,
                       "HTTP " + std::to_string(res->status) + " from " + config_.endpoint_url + path + ": " + res->body,
                       res->status, res->body);
    }
    return openai ? openai_response_text(res->body) : ollama_response_text(res->body);
}

}  // namespace kgqa::llm
