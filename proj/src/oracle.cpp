#include "kgqa/benchmark.hpp"

namespace kgqa::bench {

using cypher::CypherQuery;
using cypher::Direction;

std::string_view to_string(Mutation m) {
    switch (m) {
        case Mutation::None: return "none";
        case Mutation::WrongLabel: return "wrong_label";
        case Mutation::ReversedDirection: return "reversed_direction";
        case Mutation::BareReturn: return "bare_return";
        case Mutation::Asterisk: return "asterisk";
        case Mutation::TruncatedPath: return "truncated_path";
    }
    return "?";
}

Mutation parse_mutation(std::string_view name) {
    for (auto m : {Mutation::None, Mutation::WrongLabel, Mutation::ReversedDirection, Mutation::BareReturn,
                   Mutation::Asterisk, Mutation::TruncatedPath}) {
        if (to_string(m) == name) return m;
    }
    throw std::invalid_argument("unknown mutation '" + std::string(name) + "'");
}

bool repairable(Mutation m) {
    return m == Mutation::None || m == Mutation::WrongLabel || m == Mutation::ReversedDirection ||
           m == Mutation::BareReturn;
}

namespace {

bool relabel_named_node(CypherQuery& q, const KnowledgeBase& kb) {
    for (auto& path : q.patterns) {
        for (auto& node : path.nodes) {
            if (!node.name_filter || !node.label) continue;
            const auto& real = kb.index.lookup(*node.name_filter);
            for (const auto& label : kb.schema.node_labels) {
                if (!real.contains(label)) {
                    node.label = label;
                    return true;
                }
            }
        }
    }
    return false;
}

bool reverse_relation(CypherQuery& q, const KnowledgeBase& kb) {
    for (auto& path : q.patterns) {
        for (std::size_t i = 0; i < path.rels.size(); ++i) {
            auto& rel = path.rels[i];
            const auto& a = path.nodes[i].label;
            const auto& b = path.nodes[i + 1].label;
            if (!a || !b || *a == *b) continue;
            const bool ltr = rel.direction == Direction::LeftToRight;
            // The flipped orientation must be absent so the checker can undo it.
            const auto& src = ltr ? *b : *a;
            const auto& dst = ltr ? *a : *b;
            if (kb.schema.has_triple(src, rel.relation, dst)) continue;
            rel.direction = ltr ? Direction::RightToLeft : Direction::LeftToRight;
            return true;
        }
    }
    return false;
}

void bare_return(CypherQuery& q) {
    for (auto& item : q.return_items) item.property.reset();
}

}  // namespace

std::string mutate_query(const CypherQuery& gold, Mutation mutation, const KnowledgeBase& kb) {
    CypherQuery q = gold;
    switch (mutation) {
        case Mutation::None:
            break;
        case Mutation::WrongLabel:
            if (!relabel_named_node(q, kb)) bare_return(q);
            break;
        case Mutation::ReversedDirection:
            if (!reverse_relation(q, kb)) bare_return(q);
            break;
        case Mutation::BareReturn:
            bare_return(q);
            break;
        case Mutation::Asterisk: {
            auto text = cypher::serialize_query(q);
            text.insert(text.find("]-"), "*");
            return text;
        }
        case Mutation::TruncatedPath: {
            const auto text = cypher::serialize_query(q);
            const auto ret = text.find("\nRETURN");
            const auto cut = text.find("-[");
            return text.substr(0, cut + 2) + text.substr(ret);
        }
    }
    return cypher::serialize_query(q);
}

std::vector<Mutation> repairable_mutation_plan(std::size_t count) {
    static constexpr Mutation kCycle[] = {Mutation::WrongLabel, Mutation::ReversedDirection, Mutation::BareReturn};
    std::vector<Mutation> plan;
    plan.reserve(count);
    for (std::size_t i = 0; i < count; ++i) plan.push_back(kCycle[i % 3]);
    return plan;
}

std::vector<Mutation> mixed_mutation_plan(std::size_t count) {
    auto plan = repairable_mutation_plan(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (i % 5 == 0) plan[i] = Mutation::Asterisk;
        if (i % 5 == 1) plan[i] = Mutation::TruncatedPath;
    }
    return plan;
}

std::vector<llm::TranscriptEntry> build_oracle_transcripts(const std::vector<BenchmarkItem>& items,
                                                           const KnowledgeBase& kb,
                                                           const llm::PromptTemplate& prompt,
                                                           const std::string& model_name,
                                                           const std::vector<Mutation>& mutations) {
    if (mutations.size() != items.size()) throw BenchmarkError("one mutation per benchmark item required");
    std::vector<llm::TranscriptEntry> out;
    out.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& item = items[i];
        if (!item.gold_cypher) throw BenchmarkError("item " + item.id + " has no gold_cypher");
        const auto query = mutate_query(cypher::parse_query(*item.gold_cypher), mutations[i], kb);
        // Alternate bare output with chatty fenced output to exercise extraction.
        const auto response = i % 2 == 0 ? query : "Here is the Cypher query:\n```cypher\n" + query + "\n```\n";
        const auto rendered = llm::render_prompt(prompt, kb.schema_text, item.question);
        out.push_back({llm::prompt_hash(model_name, rendered), model_name, rendered, response, ""});
    }
    return out;
}

}  // namespace kgqa::bench
