#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "kgqa/benchmark.hpp"
#include "kgqa/fixture.hpp"
#include "kgqa/query_checker.hpp"
#include "kgqa/service.hpp"

namespace fs = std::filesystem;
using namespace kgqa;

namespace {

struct GraphArgs {
    std::string graph;
    std::string transforms;

    void add(CLI::App* cmd) {
        cmd->add_option("--graph", graph, "graph directory (nodes.tsv, edges.tsv) or JSON file")->required();
        cmd->add_option("--transforms", transforms, "transform config JSON");
    }

    KnowledgeBase load() const {
        auto graph_data = load_graph(graph);
        if (!transforms.empty()) {
            auto result = apply_transforms(graph_data, load_transform_config(transforms));
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
            graph_data = std::move(result.graph);
        }
        return KnowledgeBase::from_graph(std::move(graph_data));
    }
};

std::string read_all(std::istream& in) {
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::shared_ptr<llm::TranscriptStore> transcript_store(const std::string& replay, const std::string& record,
                                                       llm::TranscriptMode& mode) {
    if (!replay.empty()) {
        if (!fs::exists(replay)) throw std::invalid_argument("replay transcript not found: " + replay);
        mode = llm::TranscriptMode::Replay;
        return std::make_shared<llm::TranscriptStore>(replay);
    }
    if (!record.empty()) {
        mode = llm::TranscriptMode::Record;
        return std::make_shared<llm::TranscriptStore>(record);
    }
    mode = llm::TranscriptMode::Off;
    return nullptr;
}

int run_bench(const GraphArgs& g, const std::string& questions, const std::string& config_path,
              const std::string& templates_override, const std::string& replay, const std::string& record,
              const std::string& out) {
    const auto kb = g.load();
    const auto items = bench::load_benchmark(questions);
    const auto cfg = bench::load_bench_config(config_path);
    fs::path templates_dir = templates_override;
    if (templates_dir.empty()) {
        if (!cfg.templates_dir) throw std::invalid_argument("no templates dir: pass --templates or set templates_dir");
        templates_dir = *cfg.templates_dir;
    }
    const auto templates = llm::load_templates(templates_dir);

    std::vector<bench::RunConfig> runs;
    for (const auto& [model, tmpl_id] : cfg.runs) {
        const auto* tmpl = llm::find_template(templates, tmpl_id);
        if (!tmpl) throw std::invalid_argument("run references unknown template '" + tmpl_id + "'");
        runs.push_back({cfg.models.at(model), *tmpl});
    }

    bench::RunOptions options;
    options.transcripts = transcript_store(replay, record, options.transcript_mode);
    options.concurrency = cfg.concurrency;
    const auto reports = bench::run_benchmark(items, runs, kb, options);
    bench::emit_report(reports, out);
    for (const auto& r : reports) {
        std::cout << r.model_name << " / " << r.template_id << ": " << r.correct_count << "/" << r.total
                  << " correct\n";
    }
    return 0;
}

std::vector<bench::Mutation> mutation_plan(const std::string& spec, std::size_t n) {
    if (spec == "repairable") return bench::repairable_mutation_plan(n);
    if (spec == "mixed") return bench::mixed_mutation_plan(n);
    return std::vector<bench::Mutation>(n, bench::parse_mutation(spec));
}

int run_oracle(const GraphArgs& g, const std::string& questions, const std::string& templates_dir,
               const std::string& template_id, const std::string& model, const std::string& mutations,
               const std::string& out) {
    const auto kb = g.load();
    const auto items = bench::load_benchmark(questions);
    const auto templates = llm::load_templates(templates_dir);
    const auto* tmpl = llm::find_template(templates, template_id);
    if (!tmpl) throw std::invalid_argument("unknown template '" + template_id + "'");
    const auto entries =
        bench::build_oracle_transcripts(items, kb, *tmpl, model, mutation_plan(mutations, items.size()));
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    std::ofstream(out, std::ios::trunc).close();
    llm::TranscriptStore store(out);
    for (const auto& e : entries) store.append(e);
    std::cout << "wrote " << entries.size() << " transcript entries to " << out << "\n";
    return 0;
}

httplib::Server* g_server = nullptr;

void stop_server(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Natural-language question answering over a property graph"};
    app.require_subcommand(1);

    // bench run
    auto* bench_cmd = app.add_subcommand("bench", "benchmark harness");
    bench_cmd->require_subcommand(1);
    auto* bench_run = bench_cmd->add_subcommand("run", "run the question benchmark");
    GraphArgs bench_graph;
    std::string questions, config_path, templates_dir, replay, record, out;
    bench_graph.add(bench_run);
    bench_run->add_option("--questions", questions, "benchmark JSON")->required();
    bench_run->add_option("--config", config_path, "bench config JSON")->required();
    bench_run->add_option("--templates", templates_dir, "prompt template directory");
    auto* replay_opt = bench_run->add_option("--replay", replay, "answer from this transcript file");
    bench_run->add_option("--record", record, "record live exchanges to this file")->excludes(replay_opt);
    bench_run->add_option("--out", out, "output directory")->required();

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "write replay transcripts from mutated gold queries");
    GraphArgs oracle_graph;
    std::string oracle_template = "zero_shot", oracle_model = "oracle", mutations = "repairable";
    oracle_graph.add(oracle_cmd);
    oracle_cmd->add_option("--questions", questions, "benchmark JSON")->required();
    oracle_cmd->add_option("--templates", templates_dir, "prompt template directory")->required();
    oracle_cmd->add_option("--template", oracle_template, "template id");
    oracle_cmd->add_option("--model", oracle_model, "model name recorded in the transcript");
    oracle_cmd->add_option("--mutations", mutations,
                           "repairable | mixed | none | wrong_label | reversed_direction | bare_return | asterisk | "
                           "truncated_path");
    oracle_cmd->add_option("--out", out, "transcript JSONL file")->required();

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "HTTP API");
    GraphArgs serve_graph;
    std::string llm_config, host = "127.0.0.1", cors = "*", static_dir;
    int port = 8080;
    serve_graph.add(serve_cmd);
    serve_cmd->add_option("--templates", templates_dir, "prompt template directory")->required();
    serve_cmd->add_option("--llm-config", llm_config, "model config JSON")->required();
    serve_cmd->add_option("--port", port, "listen port");
    serve_cmd->add_option("--host", host, "listen address");
    auto* serve_replay = serve_cmd->add_option("--replay", replay, "answer from this transcript file");
    serve_cmd->add_option("--record", record, "record live exchanges to this file")->excludes(serve_replay);
    serve_cmd->add_option("--cors-origin", cors, "Access-Control-Allow-Origin value");
    serve_cmd->add_option("--static-dir", static_dir, "serve UI assets from this directory");

    // check
    auto* check_cmd = app.add_subcommand("check", "check and repair one query (stdin when --query is absent)");
    GraphArgs check_graph;
    std::string query_text;
    check_graph.add(check_cmd);
    check_cmd->add_option("--query", query_text, "Cypher query text");

    // schema
    auto* schema_cmd = app.add_subcommand("schema", "print the prompt schema text");
    GraphArgs schema_graph;
    bool schema_json = false;
    schema_graph.add(schema_cmd);
    schema_cmd->add_flag("--json", schema_json, "print JSON instead");

    // fixture
    auto* fixture_cmd = app.add_subcommand("fixture", "generate the synthetic graph and benchmark");
    std::uint32_t seed = 20240917;
    fixture_cmd->add_option("--out", out, "output directory")->required();
    fixture_cmd->add_option("--seed", seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*bench_run) return run_bench(bench_graph, questions, config_path, templates_dir, replay, record, out);
        if (*oracle_cmd) {
            return run_oracle(oracle_graph, questions, templates_dir, oracle_template, oracle_model, mutations, out);
        }
        if (*check_cmd) {
            const auto kb = check_graph.load();
            if (query_text.empty()) query_text = read_all(std::cin);
            const auto report = checker::check_and_repair(query_text, kb.schema, kb.index);
            std::cout << checker::report_to_json(report).dump(2) << "\n";
            return report.unresolved.empty() ? 0 : 3;
        }
        if (*schema_cmd) {
            const auto kb = schema_graph.load();
            if (schema_json) {
                std::cout << schema_to_json(kb.schema).dump(2) << "\n";
            } else {
                std::cout << kb.schema_text;
            }
            return 0;
        }
        if (*fixture_cmd) {
            const auto f = fixture::generate_fixture(seed);
            fixture::write_fixture(f, out);
            std::cout << "wrote " << f.raw_graph.node_count() << " nodes, " << f.raw_graph.edge_count()
                      << " raw edges and " << f.items.size() << " questions to " << out << "\n";
            return 0;
        }
        if (*serve_cmd) {
            service::ServiceConfig cfg;
            cfg.templates = llm::load_templates(templates_dir);
            cfg.models = service::load_model_list(llm_config);
            if (fs::exists(fs::path(templates_dir) / "answer_sentence.txt")) {
                cfg.answer_templates = load_answer_templates(templates_dir);
            }
            cfg.transcripts = transcript_store(replay, record, cfg.transcript_mode);
            cfg.cors_origin = cors;
            if (!static_dir.empty()) cfg.static_dir = static_dir;
            service::Service svc(serve_graph.load(), std::move(cfg));

            httplib::Server server;
            svc.mount(server);
            g_server = &server;
            std::signal(SIGINT, stop_server);
            std::signal(SIGTERM, stop_server);
            if (!server.bind_to_port(host, port)) {
                std::cerr << "error: cannot bind " << host << ":" << port << "\n";
                return 1;
            }
            std::cout << "listening on http://" << host << ":" << port << std::endl;
            server.listen_after_bind();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
