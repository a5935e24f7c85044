#include "kgqa/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <thread>

#include "kgqa/executor.hpp"

namespace kgqa::bench {

namespace fs = std::filesystem;
using nlohmann::json;

int hops_for_structure(int structure) {
    switch (structure) {
        case 1: return 1;
        case 2:
        case 3: return 2;
        case 4:
        case 5: return 3;
        default: return 0;
    }
}

std::vector<BenchmarkItem> parse_benchmark(const json& doc) {
    if (!doc.is_array()) throw BenchmarkError("benchmark file must hold a JSON array of items");
    if (doc.empty()) throw BenchmarkError("benchmark file contains no items");
    std::vector<BenchmarkItem> items;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& j = doc[i];
        std::string id = "#" + std::to_string(i);
        if (j.is_object()) {
            if (auto it = j.find("id"); it != j.end() && it->is_string()) id = it->get<std::string>();
        }
        auto fail = [&](const std::string& field, const std::string& msg) {
            return BenchmarkError("item " + id + ": field '" + field + "': " + msg);
        };
        if (!j.is_object()) throw fail("*", "expected an object");
        BenchmarkItem item;
        auto str = [&](const char* key) {
            auto it = j.find(key);
            if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
                throw fail(key, "required non-empty string");
            }
            return it->get<std::string>();
        };
        auto integer = [&](const char* key) {
            auto it = j.find(key);
            if (it == j.end() || !it->is_number_integer()) throw fail(key, "required integer");
            return it->get<int>();
        };
        item.id = str("id");
        if (!seen.insert(item.id).second) throw fail("id", "duplicate id");
        item.question = str("question");
        item.structure = integer("structure");
        if (item.structure < 1 || item.structure > 5) throw fail("structure", "must be between 1 and 5");
        item.hops = integer("hops");
        if (item.hops != hops_for_structure(item.structure)) {
            throw fail("hops", "hops=" + std::to_string(item.hops) + " is inconsistent with structure " +
                                   std::to_string(item.structure));
        }
        auto answers = j.find("expected_answers");
        if (answers == j.end() || !answers->is_array()) throw fail("expected_answers", "required array of strings");
        for (const auto& a : *answers) {
            if (!a.is_string()) throw fail("expected_answers", "entries must be strings");
            item.expected_answers.insert(a.get<std::string>());
        }
        if (item.expected_answers.empty()) throw fail("expected_answers", "must not be empty");
        if (auto it = j.find("gold_cypher"); it != j.end() && !it->is_null()) {
            if (!it->is_string()) throw fail("gold_cypher", "must be a string");
            item.gold_cypher = it->get<std::string>();
        }
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<BenchmarkItem> load_benchmark(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw BenchmarkError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw BenchmarkError(path.string() + ": " + e.what());
    }
    return parse_benchmark(doc);
}

json benchmark_to_json(const std::vector<BenchmarkItem>& items) {
    json out = json::array();
    for (const auto& item : items) {
        json j = {{"id", item.id},
                  {"question", item.question},
                  {"structure", item.structure},
                  {"hops", item.hops},
                  {"expected_answers", item.expected_answers}};
        if (item.gold_cypher) j["gold_cypher"] = *item.gold_cypher;
        out.push_back(std::move(j));
    }
    return out;
}

std::string normalize_answer(std::string_view answer) {
    while (!answer.empty() && std::isspace(static_cast<unsigned char>(answer.front()))) answer.remove_prefix(1);
    while (!answer.empty() && std::isspace(static_cast<unsigned char>(answer.back()))) answer.remove_suffix(1);
    std::string out(answer);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool score_answer(const std::vector<std::string>& actual, const std::set<std::string>& expected) {
    std::set<std::string> a;
    for (const auto& s : actual) a.insert(normalize_answer(s));
    std::set<std::string> e;
    for (const auto& s : expected) e.insert(normalize_answer(s));
    return a == e;
}

namespace {

bool raw_query_correct(const PipelineTrace& trace, const KnowledgeBase& kb, const BenchmarkItem& item) {
    if (!trace.extracted_cypher) return false;
    try {
        auto q = cypher::parse_query(*trace.extracted_cypher);
        return score_answer(flatten_rows(execute_query(kb.graph, q)), item.expected_answers);
    } catch (const std::exception&) {
        return false;
    }
}

BenchmarkReport run_one(const std::vector<BenchmarkItem>& items, const RunConfig& config, const KnowledgeBase& kb,
                        const RunOptions& options) {
    llm::LlmClient client(config.llm, options.transcripts, options.transcript_mode);
    BenchmarkReport report;
    report.model_name = config.llm.model_name;
    report.template_id = config.prompt.id;
    report.per_question.resize(items.size());

    auto evaluate = [&](std::size_t i) {
        const auto& item = items[i];
        QuestionOutcome out;
        out.id = item.id;
        out.structure = item.structure;
        out.hops = item.hops;
        out.trace = answer_question(item.question, kb, client, config.prompt);
        out.correct = !out.trace.failure && score_answer(out.trace.results, item.expected_answers);
        out.raw_correct = raw_query_correct(out.trace, kb, item);
        out.corrected_by_checker = out.correct && !out.raw_correct;
        report.per_question[i] = std::move(out);
    };

    const std::size_t workers = std::clamp<std::size_t>(options.concurrency, 1, std::max<std::size_t>(items.size(), 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < items.size(); ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < items.size(); i = next++) evaluate(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    report.total = static_cast<int>(items.size());
    for (const auto& q : report.per_question) {
        auto& hop = report.per_hop[q.hops];
        ++hop.total;
        if (q.correct) {
            ++hop.correct;
            ++report.correct_count;
        }
        if (!q.raw_correct) ++report.correction_stats.wrong_before_checker;
        if (q.corrected_by_checker) ++report.correction_stats.fixed_by_checker;
    }
    const auto& cs = report.correction_stats;
    report.correction_stats.percent_fixed =
        cs.wrong_before_checker == 0 ? 0.0 : 100.0 * cs.fixed_by_checker / cs.wrong_before_checker;
    return report;
}

}  // namespace

std::vector<BenchmarkReport> run_benchmark(const std::vector<BenchmarkItem>& items,
                                           const std::vector<RunConfig>& configs, const KnowledgeBase& kb,
                                           const RunOptions& options) {
    if (configs.empty()) throw BenchmarkError("no benchmark configurations given");
    std::vector<BenchmarkReport> reports;
    reports.reserve(configs.size());
    for (const auto& config : configs) reports.push_back(run_one(items, config, kb, options));
    return reports;
}

BenchConfig parse_bench_config(const json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) throw BenchmarkError("bench config must be a JSON object");
    BenchConfig cfg;
    const auto models = doc.find("models");
    if (models == doc.end() || !models->is_array() || models->empty()) {
        throw BenchmarkError("bench config requires a non-empty 'models' array");
    }
    for (const auto& m : *models) {
        auto llm_cfg = llm::parse_llm_config(m);
        auto name = m.value("name", llm_cfg.model_name);
        if (!cfg.models.emplace(name, std::move(llm_cfg)).second) {
            throw BenchmarkError("duplicate model name '" + name + "' in bench config");
        }
    }
    const auto runs = doc.find("runs");
    if (runs == doc.end() || !runs->is_array() || runs->empty()) {
        throw BenchmarkError("bench config requires a non-empty 'runs' array");
    }
    for (const auto& r : *runs) {
        const auto model = r.value("model", std::string());
        const auto tmpl = r.value("template", std::string());
        if (!cfg.models.contains(model)) throw BenchmarkError("run references unknown model '" + model + "'");
        if (tmpl.empty()) throw BenchmarkError("run for model '" + model + "' has no template");
        cfg.runs.emplace_back(model, tmpl);
    }
    if (auto it = doc.find("templates_dir"); it != doc.end() && it->is_string()) {
        fs::path dir = it->get<std::string>();
        cfg.templates_dir = dir.is_relative() && !base_dir.empty() ? base_dir / dir : dir;
    }
    cfg.concurrency = doc.value("concurrency", std::size_t{1});
    if (cfg.concurrency == 0) cfg.concurrency = 1;
    return cfg;
}

BenchConfig load_bench_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw BenchmarkError("cannot open " + path.string());
    try {
        return parse_bench_config(json::parse(in), path.parent_path());
    } catch (const json::exception& e) {
        throw BenchmarkError(path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw BenchmarkError(path.string() + ": " + e.what());
    }
}

}  // namespace kgqa::bench
