#include <gtest/gtest.h>

#include "kgqa/benchmark.hpp"
#include "kgqa/executor.hpp"
#include "support/temp_dir.hpp"

using namespace kgqa;
using namespace kgqa::bench;
using nlohmann::json;

namespace {

struct Env {
    KnowledgeBase kb = kgqa::testing::fixture_kb();
    std::vector<BenchmarkItem> items = load_benchmark(kgqa::testing::fixture_dir() / "benchmark.json");
    std::vector<llm::PromptTemplate> templates = llm::load_templates(kgqa::testing::templates_dir());

    const llm::PromptTemplate& tmpl(std::string_view id) const { return *llm::find_template(templates, id); }

    static llm::LlmConfig model(const std::string& name) {
        llm::LlmConfig cfg;
        cfg.model_name = name;
        return cfg;
    }

    RunOptions replay(const std::vector<llm::TranscriptEntry>& entries, std::size_t concurrency = 1) const {
        RunOptions o;
        o.transcripts = std::make_shared<llm::TranscriptStore>();
        for (const auto& e : entries) o.transcripts->append(e);
        o.transcript_mode = llm::TranscriptMode::Replay;
        o.concurrency = concurrency;
        return o;
    }
};

json item_json() {
    return json::parse(R"({"id":"a","question":"q?","structure":1,"hops":1,"expected_answers":["x"]})");
}

std::string parse_error(const json& doc) {
    try {
        parse_benchmark(doc);
    } catch (const BenchmarkError& e) {
        return e.what();
    }
    ADD_FAILURE() << "accepted " << doc.dump();
    return {};
}

}  // namespace

TEST(BenchmarkFile, ShippedSetSpansStructures) {
    Env env;
    ASSERT_EQ(env.items.size(), 50u);
    std::map<int, int> per_structure;
    for (const auto& item : env.items) {
        ++per_structure[item.structure];
        EXPECT_EQ(item.hops, hops_for_structure(item.structure));
        EXPECT_TRUE(item.gold_cypher);
    }
    EXPECT_EQ(per_structure, (std::map<int, int>{{1, 10}, {2, 10}, {3, 10}, {4, 10}, {5, 10}}));
    EXPECT_EQ(env.items[0].question,
              "What are the names of the drugs that are contraindicated when a patient has multiple sclerosis?");
}

TEST(BenchmarkFile, GoldQueriesReproduceExpectedAnswers) {
    // Expected answers were produced by path enumeration in the generator; the
    // executor must agree on every item.
    Env env;
    for (const auto& item : env.items) {
        const auto rows = flatten_rows(execute_query(env.kb.graph, cypher::parse_query(*item.gold_cypher)));
        EXPECT_TRUE(score_answer(rows, item.expected_answers)) << item.id;
    }
}

TEST(BenchmarkFile, EmptyIsAnError) {
    EXPECT_NE(parse_error(json::array()).find("no items"), std::string::npos);
    kgqa::testing::TempDir dir;
    dir.write("empty.json", "");
    EXPECT_THROW(load_benchmark(dir / "empty.json"), BenchmarkError);
    EXPECT_THROW(load_benchmark(dir / "missing.json"), BenchmarkError);
}

TEST(BenchmarkFile, Validation) {
    auto j = item_json();
    j["hops"] = 3;
    EXPECT_NE(parse_error(json::array({j})).find("inconsistent"), std::string::npos);

    j = item_json();
    j["structure"] = 6;
    EXPECT_NE(parse_error(json::array({j})).find("structure"), std::string::npos);

    j = item_json();
    j["expected_answers"] = json::array();
    EXPECT_NE(parse_error(json::array({j})).find("expected_answers"), std::string::npos);

    j = item_json();
    j.erase("question");
    EXPECT_NE(parse_error(json::array({j})).find("item a: field 'question'"), std::string::npos);

    EXPECT_NE(parse_error(json::array({item_json(), item_json()})).find("duplicate"), std::string::npos);
}

TEST(BenchmarkFile, JsonRoundTrip) {
    Env env;
    EXPECT_EQ(benchmark_to_json(parse_benchmark(benchmark_to_json(env.items))), benchmark_to_json(env.items));
}

TEST(Scoring, SetEqualityAfterCaseFold) {
    EXPECT_TRUE(score_answer({"A", "A", "B"}, {"a", "b"}));
    EXPECT_FALSE(score_answer({}, {"a"}));
    EXPECT_FALSE(score_answer({"a", "b", "c"}, {"a", "b"}));
    EXPECT_TRUE(score_answer({"  Interferon Beta-1a "}, {"interferon beta-1a"}));
    EXPECT_FALSE(score_answer({"a"}, {"a", "b"}));
}

TEST(Run, RepairableDefectsAllFixed) {
    Env env;
    const auto entries = build_oracle_transcripts(env.items, env.kb, env.tmpl("zero_shot"), "oracle",
                                                  repairable_mutation_plan(env.items.size()));
    const auto reports =
        run_benchmark(env.items, {{Env::model("oracle"), env.tmpl("zero_shot")}}, env.kb, env.replay(entries));
    ASSERT_EQ(reports.size(), 1u);
    const auto& r = reports[0];
    EXPECT_EQ(r.correct_count, 50);
    EXPECT_EQ(r.total, 50);
    EXPECT_EQ(r.correction_stats.wrong_before_checker, 50);
    EXPECT_EQ(r.correction_stats.fixed_by_checker, 50);
    EXPECT_DOUBLE_EQ(r.correction_stats.percent_fixed, 100.0);
    EXPECT_EQ(r.per_hop.at(1).total, 10);
    EXPECT_EQ(r.per_hop.at(2).total, 20);
    EXPECT_EQ(r.per_hop.at(3).total, 20);
}

TEST(Run, UnmutatedGoldNeedsNoChecker) {
    Env env;
    const auto entries = build_oracle_transcripts(env.items, env.kb, env.tmpl("zero_shot"), "oracle",
                                                  std::vector<Mutation>(env.items.size(), Mutation::None));
    const auto r =
        run_benchmark(env.items, {{Env::model("oracle"), env.tmpl("zero_shot")}}, env.kb, env.replay(entries))[0];
    EXPECT_EQ(r.correct_count, 50);
    EXPECT_EQ(r.correction_stats.wrong_before_checker, 0);
    EXPECT_DOUBLE_EQ(r.correction_stats.percent_fixed, 0.0);
}

TEST(Run, UnrepairableDefectsScoredIncorrect) {
    Env env;
    const auto plan = mixed_mutation_plan(env.items.size());
    const auto entries = build_oracle_transcripts(env.items, env.kb, env.tmpl("zero_shot"), "oracle", plan);
    const auto r =
        run_benchmark(env.items, {{Env::model("oracle"), env.tmpl("zero_shot")}}, env.kb, env.replay(entries))[0];
    int affected = 0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto& q = r.per_question[i];
        if (repairable(plan[i])) {
            EXPECT_TRUE(q.correct) << q.id;
            continue;
        }
        ++affected;
        EXPECT_FALSE(q.correct) << q.id;
        ASSERT_TRUE(q.trace.failure) << q.id;
        EXPECT_EQ(q.trace.failure->stage, "check");
        ASSERT_TRUE(q.trace.repair_report);
        EXPECT_FALSE(q.trace.repair_report->unresolved.empty());
    }
    EXPECT_EQ(affected, 20);
    EXPECT_EQ(r.correct_count, 30);
}

TEST(Run, UnparseableOutputScoresZero) {
    Env env;
    std::vector<llm::TranscriptEntry> entries;
    for (const auto& item : env.items) {
        const auto prompt = llm::render_prompt(env.tmpl("zero_shot"), env.kb.schema_text, item.question);
        entries.push_back({llm::prompt_hash("junk", prompt), "junk", prompt, "MATCH ((( RETURN", ""});
    }
    const auto r =
        run_benchmark(env.items, {{Env::model("junk"), env.tmpl("zero_shot")}}, env.kb, env.replay(entries))[0];
    EXPECT_EQ(r.correct_count, 0);
    EXPECT_DOUBLE_EQ(r.correction_stats.percent_fixed, 0.0);
}

TEST(Run, ReplayMissesCountAsIncorrect) {
    Env env;
    const auto r = run_benchmark(env.items, {{Env::model("nobody"), env.tmpl("zero_shot")}}, env.kb, env.replay({}))[0];
    EXPECT_EQ(r.correct_count, 0);
    EXPECT_EQ(r.per_question[0].trace.failure->stage, "llm");
}

TEST(Run, EmptyConfigListIsAnError) {
    Env env;
    EXPECT_THROW(run_benchmark(env.items, {}, env.kb), BenchmarkError);
}

TEST(Run, ConcurrencyDoesNotChangeResults) {
    Env env;
    const auto entries = build_oracle_transcripts(env.items, env.kb, env.tmpl("zero_shot"), "oracle",
                                                  mixed_mutation_plan(env.items.size()));
    const std::vector<RunConfig> runs{{Env::model("oracle"), env.tmpl("zero_shot")}};
    const auto serial = run_benchmark(env.items, runs, env.kb, env.replay(entries, 1));
    const auto parallel = run_benchmark(env.items, runs, env.kb, env.replay(entries, 4));
    EXPECT_EQ(summary_json(serial), summary_json(parallel));
    EXPECT_EQ(results_csv(serial), results_csv(parallel));
}

TEST(Report, MultiConfigTablesAndDeterminism) {
    Env env;
    std::vector<llm::TranscriptEntry> entries;
    std::vector<RunConfig> runs;
    for (const auto& [model, plan] :
         {std::pair{std::string("model-a"), repairable_mutation_plan(50)}, std::pair{std::string("model-b"), mixed_mutation_plan(50)}}) {
        for (const char* t : {"zero_shot", "one_shot", "few_shot"}) {
            auto e = build_oracle_transcripts(env.items, env.kb, env.tmpl(t), model, plan);
            entries.insert(entries.end(), e.begin(), e.end());
            runs.push_back({Env::model(model), env.tmpl(t)});
        }
    }
    const auto reports = run_benchmark(env.items, runs, env.kb, env.replay(entries));
    const auto md = render_summary_markdown(reports);
    EXPECT_NE(md.find("| LLM | Zero-shot | One-shot | Few-shot |\n|---|---:|---:|---:|\n| model-a | 50 | 50 | 50 |\n"
                      "| model-b | 30 | 30 | 30 |\n"),
              std::string::npos)
        << md;
    EXPECT_NE(md.find("| Standard | 50 | 30 |"), std::string::npos) << md;
    EXPECT_NE(md.find("| Simplified | - | - |"), std::string::npos) << md;

    kgqa::testing::TempDir dir;
    emit_report(reports, dir / "one");
    emit_report(run_benchmark(env.items, runs, env.kb, env.replay(entries)), dir / "two");
    for (const char* f : {"results.csv", "summary.md", "summary.json"}) {
        EXPECT_EQ(kgqa::testing::read_file(dir / "one" / f), kgqa::testing::read_file(dir / "two" / f)) << f;
    }
    const auto csv = kgqa::testing::read_file(dir / "one" / "results.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "id,model,template,correct,corrected_by_checker");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 50 * 6);
    EXPECT_TRUE(std::filesystem::exists(dir / "one" / "traces" / "model-a__zero_shot" / "s1-01.json"));
    const auto summary = json::parse(kgqa::testing::read_file(dir / "one" / "summary.json"));
    EXPECT_EQ(summary["runs"].size(), 6u);
    EXPECT_EQ(summary["runs"][0]["correction_stats"]["percent_fixed"], 100.0);
}

TEST(Report, EmptyReportListIsAnError) {
    kgqa::testing::TempDir dir;
    EXPECT_THROW(emit_report({}, dir.path()), BenchmarkError);
}

TEST(Config, ParsesRunsAndTemplatesDir) {
    const auto cfg = parse_bench_config(json::parse(R"({
        "templates_dir": "../templates",
        "concurrency": 3,
        "models": [{"name": "gpt", "backend": "openai_compatible", "endpoint_url": "http://x", "model_name": "gpt-4o"},
                   {"backend": "ollama", "endpoint_url": "http://y", "model_name": "llama3:70b"}],
        "runs": [{"model": "gpt", "template": "zero_shot"}, {"model": "llama3:70b", "template": "few_shot"}]
    })"),
                                        "/base/dir");
    EXPECT_EQ(cfg.models.size(), 2u);
    EXPECT_EQ(cfg.models.at("gpt").model_name, "gpt-4o");
    EXPECT_EQ(cfg.runs[1], (std::pair<std::string, std::string>{"llama3:70b", "few_shot"}));
    EXPECT_EQ(cfg.templates_dir, std::filesystem::path("/base/dir/../templates"));
    EXPECT_EQ(cfg.concurrency, 3u);
}

TEST(Config, Rejections) {
    EXPECT_THROW(parse_bench_config(json::parse(R"({"models":[],"runs":[]})")), BenchmarkError);
    EXPECT_THROW(parse_bench_config(json::parse(
                     R"({"models":[{"backend":"replay","model_name":"m"}],"runs":[{"model":"other","template":"t"}]})")),
                 BenchmarkError);
    EXPECT_THROW(parse_bench_config(json::parse(
                     R"({"models":[{"backend":"replay","model_name":"m"},{"backend":"replay","model_name":"m"}],
                        "runs":[{"model":"m","template":"t"}]})")),
                 BenchmarkError);
}

TEST(Oracle, MutationsChangeTheQuery) {
    Env env;
    for (const auto& item : env.items) {
        const auto gold = cypher::parse_query(*item.gold_cypher);
        EXPECT_NE(mutate_query(gold, Mutation::Asterisk, env.kb).find("*"), std::string::npos);
        EXPECT_THROW(cypher::parse_query(mutate_query(gold, Mutation::TruncatedPath, env.kb)), cypher::ParseError);
        EXPECT_EQ(mutate_query(gold, Mutation::None, env.kb), *item.gold_cypher);
    }
    EXPECT_EQ(parse_mutation("reversed_direction"), Mutation::ReversedDirection);
    EXPECT_THROW(parse_mutation("bogus"), std::invalid_argument);
}
