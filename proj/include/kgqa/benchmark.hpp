#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgqa/cypher.hpp"
#include "kgqa/graph_store.hpp"
#include "kgqa/llm_gateway.hpp"
#include "kgqa/pipeline.hpp"

namespace kgqa::bench {

struct BenchmarkItem {
    std::string id;
    std::string question;
    int structure = 1;
    int hops = 1;
    std::set<std::string> expected_answers;
    std::optional<std::string> gold_cypher;
};

class BenchmarkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hop count implied by each question structure (1 → 1, 2–3 → 2, 4–5 → 3).
int hops_for_structure(int structure);

std::vector<BenchmarkItem> parse_benchmark(const nlohmann::json& doc);
std::vector<BenchmarkItem> load_benchmark(const std::filesystem::path& path);
nlohmann::json benchmark_to_json(const std::vector<BenchmarkItem>& items);

/// Set equality after trimming and case-folding.
bool score_answer(const std::vector<std::string>& actual, const std::set<std::string>& expected);
std::string normalize_answer(std::string_view answer);

struct RunConfig {
    llm::LlmConfig llm;
    llm::PromptTemplate prompt;
};

struct QuestionOutcome {
    std::string id;
    int structure = 1;
    int hops = 1;
    bool correct = false;
    bool raw_correct = false;
    bool corrected_by_checker = false;
    PipelineTrace trace;
};

struct HopTally {
    int correct = 0;
    int total = 0;
};

struct CorrectionStats {
    int wrong_before_checker = 0;
    int fixed_by_checker = 0;
    double percent_fixed = 0.0;
};

struct BenchmarkReport {
    std::string model_name;
    std::string template_id;
    std::vector<QuestionOutcome> per_question;
    int correct_count = 0;
    int total = 0;
    std::map<int, HopTally> per_hop;
    CorrectionStats correction_stats;
};

struct RunOptions {
    std::shared_ptr<llm::TranscriptStore> transcripts;
    llm::TranscriptMode transcript_mode = llm::TranscriptMode::Off;
    std::size_t concurrency = 1;
};

/// One report per config. Per-question failures count as incorrect and never
/// abort the run. The raw extracted query is also executed (when it parses)
/// to decide whether the checker turned a wrong answer into a right one.
std::vector<BenchmarkReport> run_benchmark(const std::vector<BenchmarkItem>& items,
                                           const std::vector<RunConfig>& configs, const KnowledgeBase& kb,
                                           const RunOptions& options = {});

/// Writes results.csv, summary.md, summary.json and traces/<run>/<id>.json.
void emit_report(const std::vector<BenchmarkReport>& reports, const std::filesystem::path& out_dir);

std::string render_summary_markdown(const std::vector<BenchmarkReport>& reports);
nlohmann::json summary_json(const std::vector<BenchmarkReport>& reports);
std::string results_csv(const std::vector<BenchmarkReport>& reports);

/// Bench config file: named models and the (model, template) runs to execute.
struct BenchConfig {
    std::map<std::string, llm::LlmConfig> models;
    std::vector<std::pair<std::string, std::string>> runs;  // model name, template id
    std::optional<std::filesystem::path> templates_dir;
    std::size_t concurrency = 1;
};

BenchConfig parse_bench_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
BenchConfig load_bench_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Oracle replay: gold queries with injected defects, for offline evaluation
// of the checker without a live model.
// ---------------------------------------------------------------------------

enum class Mutation { None, WrongLabel, ReversedDirection, BareReturn, Asterisk, TruncatedPath };

std::string_view to_string(Mutation m);
Mutation parse_mutation(std::string_view name);
bool repairable(Mutation m);

/// Applies one defect to a well-formed gold query and returns the query text.
/// WrongLabel and ReversedDirection fall back to BareReturn when the query has
/// no suitable node or relation.
std::string mutate_query(const cypher::CypherQuery& gold, Mutation mutation, const KnowledgeBase& kb);

/// What each item's fake model answers, keyed by rendered prompt.
std::vector<llm::TranscriptEntry> build_oracle_transcripts(const std::vector<BenchmarkItem>& items,
                                                           const KnowledgeBase& kb,
                                                           const llm::PromptTemplate& prompt,
                                                           const std::string& model_name,
                                                           const std::vector<Mutation>& mutations);

/// Cycles WrongLabel, ReversedDirection, BareReturn over the items.
std::vector<Mutation> repairable_mutation_plan(std::size_t count);

/// Every fifth item gets Asterisk, the one after it TruncatedPath; the rest
/// follow the repairable cycle.
std::vector<Mutation> mixed_mutation_plan(std::size_t count);

}  // namespace kgqa::bench
