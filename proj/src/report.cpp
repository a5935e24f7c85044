#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kgqa/benchmark.hpp"

namespace kgqa::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string percent(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", value);
    return buf;
}

std::string percent(int num, int den) { return den == 0 ? "n/a" : percent(100.0 * num / den); }

std::string safe_component(const std::string& s) {
    std::string out;
    for (char c : s) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        out += ok ? c : '_';
    }
    return out.empty() ? "_" : out;
}

std::string run_dir(const BenchmarkReport& r) { return safe_component(r.model_name) + "__" + safe_component(r.template_id); }

std::string trace_path(const BenchmarkReport& r, const QuestionOutcome& q) {
    return "traces/" + run_dir(r) + "/" + safe_component(q.id) + ".json";
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw BenchmarkError("failed writing " + path.string());
}

std::vector<std::string> models_in_order(const std::vector<BenchmarkReport>& reports) {
    std::vector<std::string> models;
    for (const auto& r : reports) {
        if (std::find(models.begin(), models.end(), r.model_name) == models.end()) models.push_back(r.model_name);
    }
    return models;
}

const BenchmarkReport* find_run(const std::vector<BenchmarkReport>& reports, const std::string& model,
                                std::string_view tmpl) {
    for (const auto& r : reports) {
        if (r.model_name == model && r.template_id == tmpl) return &r;
    }
    return nullptr;
}

std::string count_cell(const BenchmarkReport* r) { return r ? std::to_string(r->correct_count) : "-"; }

}  // namespace

std::string results_csv(const std::vector<BenchmarkReport>& reports) {
    std::string out = "id,model,template,correct,corrected_by_checker\n";
    for (const auto& r : reports) {
        for (const auto& q : r.per_question) {
            out += csv_field(q.id) + "," + csv_field(r.model_name) + "," + csv_field(r.template_id) + "," +
                   (q.correct ? "true" : "false") + "," + (q.corrected_by_checker ? "true" : "false") + "\n";
        }
    }
    return out;
}

std::string render_summary_markdown(const std::vector<BenchmarkReport>& reports) {
    std::ostringstream md;
    md << "# Benchmark summary\n\n";

    md << "## Correct answers per configuration\n\n";
    md << "| Model | Template | Correct | Total | Accuracy |\n";
    md << "|---|---|---:|---:|---:|\n";
    for (const auto& r : reports) {
        md << "| " << r.model_name << " | " << r.template_id << " | " << r.correct_count << " | " << r.total
           << " | " << percent(r.correct_count, r.total) << " |\n";
    }

    md << "\n## Percentage of correct answers by hop count\n\n";
    md << "| Model | Template | 1-hop | 2-hop | 3-hop |\n";
    md << "|---|---|---:|---:|---:|\n";
    for (const auto& r : reports) {
        md << "| " << r.model_name << " | " << r.template_id;
        for (int hops = 1; hops <= 3; ++hops) {
            auto it = r.per_hop.find(hops);
            if (it == r.per_hop.end()) {
                md << " | n/a";
            } else {
                md << " | " << percent(it->second.correct, it->second.total) << " (" << it->second.correct << "/"
                   << it->second.total << ")";
            }
        }
        md << " |\n";
    }

    md << "\n## Percentage of corrected wrong queries\n\n";
    md << "| Model | Template | Wrong before checker | Fixed by checker | Percent fixed |\n";
    md << "|---|---|---:|---:|---:|\n";
    for (const auto& r : reports) {
        const auto& cs = r.correction_stats;
        md << "| " << r.model_name << " | " << r.template_id << " | " << cs.wrong_before_checker << " | "
           << cs.fixed_by_checker << " | " << percent(cs.percent_fixed) << " |\n";
    }

    const auto models = models_in_order(reports);

    md << "\n## n-shot comparison\n\n";
    md << "| LLM | Zero-shot | One-shot | Few-shot |\n";
    md << "|---|---:|---:|---:|\n";
    for (const auto& m : models) {
        md << "| " << m << " | " << count_cell(find_run(reports, m, "zero_shot")) << " | "
           << count_cell(find_run(reports, m, "one_shot")) << " | " << count_cell(find_run(reports, m, "few_shot"))
           << " |\n";
    }

    md << "\n## Prompt comparison\n\n";
    md << "| Prompt |";
    for (const auto& m : models) md << " " << m << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < models.size(); ++i) md << "---:|";
    md << "\n";
    static constexpr std::pair<std::string_view, std::string_view> kPromptRows[] = {
        {"Standard", "zero_shot"},
        {"Simplified", "simple"},
        {"Syntax Emphasis", "syntax_emphasis"},
        {"Social Engineering", "social_engineering"},
        {"Expert Role", "expert_role"},
        {"Llama3 Custom", "llama3_custom"},
    };
    for (const auto& [title, tmpl] : kPromptRows) {
        md << "| " << title << " |";
        for (const auto& m : models) md << " " << count_cell(find_run(reports, m, tmpl)) << " |";
        md << "\n";
    }
    return md.str();
}

json summary_json(const std::vector<BenchmarkReport>& reports) {
    json runs = json::array();
    for (const auto& r : reports) {
        json per_hop = json::object();
        for (const auto& [hops, tally] : r.per_hop) {
            per_hop[std::to_string(hops)] = {{"correct", tally.correct}, {"total", tally.total}};
        }
        json questions = json::array();
        for (const auto& q : r.per_question) {
            questions.push_back({{"id", q.id},
                                 {"structure", q.structure},
                                 {"hops", q.hops},
                                 {"correct", q.correct},
                                 {"raw_correct", q.raw_correct},
                                 {"corrected_by_checker", q.corrected_by_checker},
                                 {"failure_stage", q.trace.failure ? json(q.trace.failure->stage) : json(nullptr)},
                                 {"trace", trace_path(r, q)}});
        }
        runs.push_back({{"model", r.model_name},
                        {"template", r.template_id},
                        {"correct_count", r.correct_count},
                        {"total", r.total},
                        {"per_hop", per_hop},
                        {"correction_stats",
                         {{"wrong_before_checker", r.correction_stats.wrong_before_checker},
                          {"fixed_by_checker", r.correction_stats.fixed_by_checker},
                          {"percent_fixed", r.correction_stats.percent_fixed}}},
                        {"per_question", questions}});
    }
    return {{"runs", runs}};
}

void emit_report(const std::vector<BenchmarkReport>& reports, const fs::path& out_dir) {
    if (reports.empty()) throw BenchmarkError("no benchmark reports to emit");
    fs::create_directories(out_dir);
    write_file(out_dir / "results.csv", results_csv(reports));
    write_file(out_dir / "summary.md", render_summary_markdown(reports));
    write_file(out_dir / "summary.json", summary_json(reports).dump(2) + "\n");
    for (const auto& r : reports) {
        for (const auto& q : r.per_question) {
            write_file(out_dir / trace_path(r, q), trace_to_json(q.trace).dump(2) + "\n");
        }
    }
}

}  // namespace kgqa::bench
