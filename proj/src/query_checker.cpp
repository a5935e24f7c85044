#include "kgqa/query_checker.hpp"

#include <optional>
#include <set>

namespace kgqa::checker {

using cypher::CypherQuery;
using cypher::Direction;
using cypher::NodePattern;
using cypher::PathPattern;
using cypher::RelPattern;

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::SyntaxReturn: return "SyntaxReturn";
        case Stage::SyntaxBinding: return "SyntaxBinding";
        case Stage::NodeType: return "NodeType";
        case Stage::RelationAdjust: return "RelationAdjust";
        case Stage::RelationDirection: return "RelationDirection";
    }
    return "?";
}

std::string_view to_string(DefectKind kind) {
    switch (kind) {
        case DefectKind::UnknownEntity: return "UnknownEntity";
        case DefectKind::NoCompatibleRelation: return "NoCompatibleRelation";
        case DefectKind::UnknownRelation: return "UnknownRelation";
        case DefectKind::UnboundReturnVariable: return "UnboundReturnVariable";
        case DefectKind::ParseError: return "ParseError";
    }
    return "?";
}

bool RepairReport::parsed() const {
    for (const auto& d : unresolved) {
        if (d.kind == DefectKind::ParseError) return false;
    }
    return true;
}

namespace {

using OptLabel = std::optional<std::string>;

// A node's own label, else the label given to the same variable elsewhere.
OptLabel effective_label(const CypherQuery& q, const NodePattern& node) {
    if (node.label) return node.label;
    if (!node.variable) return std::nullopt;
    for (const auto& p : q.patterns) {
        for (const auto& n : p.nodes) {
            if (n.variable == node.variable && n.label) return n.label;
        }
    }
    return std::nullopt;
}

bool matches(const OptLabel& want, const std::string& have) { return !want || *want == have; }

// Some schema triple (src)-[rel]->(dst), unknown labels acting as wildcards.
bool triple_exists(const GraphSchema& schema, const OptLabel& src, const std::string& rel, const OptLabel& dst) {
    if (src && dst) return schema.has_triple(*src, rel, *dst);
    for (const auto& t : schema.relation_triples) {
        if (t.relation == rel && matches(src, t.source_label) && matches(dst, t.target_label)) return true;
    }
    return false;
}

bool connects(const GraphSchema& schema, const std::string& label, const std::string& rel, const OptLabel& other) {
    return triple_exists(schema, label, rel, other) || triple_exists(schema, other, rel, label);
}

std::set<std::string> compatible_relations(const GraphSchema& schema, const std::string& label, const OptLabel& other) {
    std::set<std::string> out;
    for (const auto& t : schema.relation_triples) {
        if ((t.source_label == label && matches(other, t.target_label)) ||
            (t.target_label == label && matches(other, t.source_label))) {
            out.insert(t.relation);
        }
    }
    return out;
}

std::string node_desc(const NodePattern& n) { return cypher::serialize_node(n); }

std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

}  // namespace

StageResult syntax_node_check(const CypherQuery& query) {
    StageResult r{query, {}, {}};
    auto& q = r.query;

    std::set<std::string> bound;
    std::vector<NodePattern*> anonymous;
    for (auto& p : q.patterns) {
        for (auto& n : p.nodes) {
            if (n.variable) {
                bound.insert(*n.variable);
            } else {
                anonymous.push_back(&n);
            }
        }
    }
    std::vector<const cypher::ReturnItem*> unbound;
    for (const auto& item : q.return_items) {
        if (!bound.contains(item.variable)) unbound.push_back(&item);
    }
    if (unbound.size() == 1 && anonymous.size() == 1) {
        auto& node = *anonymous.front();
        const auto before = node_desc(node);
        node.variable = unbound.front()->variable;
        r.corrections.push_back({Stage::SyntaxBinding,
                                 "bound RETURN variable '" + *node.variable + "' to the only anonymous node",
                                 before, node_desc(node)});
    } else {
        for (const auto* item : unbound) {
            r.unresolved.push_back({DefectKind::UnboundReturnVariable,
                                    "RETURN variable '" + item->variable + "' is not bound in MATCH"});
        }
    }

    for (auto& item : q.return_items) {
        if (item.property == "name") continue;
        const auto before = cypher::serialize_return_item(item);
        const std::string description = item.property
                                            ? "RETURN item projects '" + *item.property + "'; replaced with .name"
                                            : "appended .name to RETURN item '" + item.variable + "'";
        item.property = "name";
        r.corrections.push_back({Stage::SyntaxReturn, description, before, cypher::serialize_return_item(item)});
    }
    return r;
}

StageResult node_type_check(const CypherQuery& query, const EntityIndex& index, const GraphSchema& schema) {
    StageResult r{query, {}, {}};
    auto& q = r.query;
    std::set<const NodePattern*> relabeled;

    for (auto& path : q.patterns) {
        for (std::size_t pos = 0; pos < path.nodes.size(); ++pos) {
            auto& node = path.nodes[pos];
            if (!node.name_filter) continue;
            const auto& labels = index.lookup(*node.name_filter);
            if (labels.empty()) {
                r.unresolved.push_back({DefectKind::UnknownEntity,
                                        "no node named \"" + *node.name_filter + "\" in the knowledge graph"});
                continue;
            }
            if (!node.label || labels.contains(*node.label)) continue;

            // Neighbor labels are read before this node changes.
            std::vector<std::pair<std::size_t, OptLabel>> adjacent;  // rel index, neighbor label
            if (pos > 0) adjacent.emplace_back(pos - 1, effective_label(q, path.nodes[pos - 1]));
            if (pos + 1 < path.nodes.size()) adjacent.emplace_back(pos, effective_label(q, path.nodes[pos + 1]));

            std::set<std::string> preferred;
            for (const auto& label : labels) {
                for (const auto& [rel, other] : adjacent) {
                    if (connects(schema, label, path.rels[rel].relation, other)) {
                        preferred.insert(label);
                        break;
                    }
                }
            }
            const auto& pool = preferred.empty() ? labels : preferred;
            const std::string chosen = *pool.begin();

            std::string description = "\"" + *node.name_filter + "\" is a " + chosen + ", not a " + *node.label;
            if (labels.size() > 1) {
                description += " (ambiguous among " + join(labels) + "; chose " + chosen + ")";
            }
            const auto before = node_desc(node);
            node.label = chosen;
            relabeled.insert(&node);
            r.corrections.push_back({Stage::NodeType, description, before, node_desc(node)});

            for (const auto& [rel_index, other] : adjacent) {
                auto& rel = path.rels[rel_index];
                if (connects(schema, chosen, rel.relation, other)) continue;
                const auto options = compatible_relations(schema, chosen, other);
                if (options.size() == 1) {
                    const auto rel_before = cypher::serialize_rel(rel);
                    rel.relation = *options.begin();
                    r.corrections.push_back({Stage::RelationAdjust,
                                             "relation adjusted to the only one compatible with " + chosen,
                                             rel_before, cypher::serialize_rel(rel)});
                } else if (options.empty()) {
                    r.unresolved.push_back({DefectKind::NoCompatibleRelation,
                                            "no relation connects " + chosen + " to " +
                                                (other ? *other : std::string("any label")) + "; left " +
                                                cypher::serialize_rel(rel) + " unchanged"});
                }
            }
        }
    }

    for (const auto& path : q.patterns) {
        for (const auto& node : path.nodes) {
            if (node.label && !relabeled.contains(&node) && !schema.has_label(*node.label)) {
                r.unresolved.push_back({DefectKind::UnknownEntity, "label '" + *node.label + "' is not in the schema"});
            }
        }
    }
    return r;
}

StageResult relation_direction_check(const CypherQuery& query, const GraphSchema& schema) {
    StageResult r{query, {}, {}};
    auto& q = r.query;
    for (auto& path : q.patterns) {
        for (std::size_t i = 0; i < path.rels.size(); ++i) {
            auto& rel = path.rels[i];
            const bool ltr = rel.direction == Direction::LeftToRight;
            const auto src = effective_label(q, path.nodes[ltr ? i : i + 1]);
            const auto dst = effective_label(q, path.nodes[ltr ? i + 1 : i]);
            const auto shown = cypher::serialize_node(path.nodes[i]) + cypher::serialize_rel(rel) +
                               cypher::serialize_node(path.nodes[i + 1]);
            if (!schema.has_relation(rel.relation)) {
                r.unresolved.push_back({DefectKind::UnknownRelation,
                                        "relation '" + rel.relation + "' is not in the schema: " + shown});
                continue;
            }
            if (triple_exists(schema, src, rel.relation, dst)) continue;
            const bool self_bidirectional =
                src && dst && *src == *dst && schema.self_bidirectional.contains(rel.relation);
            if (!self_bidirectional && triple_exists(schema, dst, rel.relation, src)) {
                const auto before = cypher::serialize_rel(rel);
                rel.direction = ltr ? Direction::RightToLeft : Direction::LeftToRight;
                r.corrections.push_back({Stage::RelationDirection,
                                         "reversed '" + rel.relation + "' to match the schema direction", before,
                                         cypher::serialize_rel(rel)});
                continue;
            }
            r.unresolved.push_back({DefectKind::UnknownRelation,
                                    "relation '" + rel.relation + "' does not connect these labels in either direction: " +
                                        shown});
        }
    }
    return r;
}

RepairReport check_and_repair(std::string_view query_text, const GraphSchema& schema, const EntityIndex& index) {
    RepairReport report;
    report.input_query = std::string(query_text);
    CypherQuery parsed;
    try {
        parsed = cypher::parse_query(query_text);
    } catch (const cypher::ParseError& e) {
        report.unresolved.push_back({DefectKind::ParseError, e.what()});
        report.output_query = report.input_query;
        return report;
    }

    auto absorb = [&](StageResult&& stage) {
        for (auto& c : stage.corrections) report.corrections.push_back(std::move(c));
        for (auto& d : stage.unresolved) report.unresolved.push_back(std::move(d));
        return std::move(stage.query);
    };
    auto q = absorb(syntax_node_check(parsed));
    q = absorb(node_type_check(q, index, schema));
    q = absorb(relation_direction_check(q, schema));
    report.output_query = cypher::serialize_query(q);
    return report;
}

std::vector<std::string> validate_query(const CypherQuery& q, const GraphSchema& schema, const EntityIndex& index) {
    std::vector<std::string> problems;
    std::set<std::string> bound;
    for (const auto& path : q.patterns) {
        for (const auto& n : path.nodes) {
            if (n.variable) bound.insert(*n.variable);
            if (n.label && !schema.has_label(*n.label)) {
                problems.push_back("label '" + *n.label + "' is not in the schema");
            }
            if (n.name_filter) {
                const auto& labels = index.lookup(*n.name_filter);
                if (labels.empty() || (n.label && !labels.contains(*n.label))) {
                    problems.push_back("no node named \"" + *n.name_filter + "\"" +
                                       (n.label ? " with label " + *n.label : std::string()));
                }
            }
        }
        for (std::size_t i = 0; i < path.rels.size(); ++i) {
            const auto& rel = path.rels[i];
            const bool ltr = rel.direction == Direction::LeftToRight;
            const auto src = effective_label(q, path.nodes[ltr ? i : i + 1]);
            const auto dst = effective_label(q, path.nodes[ltr ? i + 1 : i]);
            if (!triple_exists(schema, src, rel.relation, dst)) {
                problems.push_back("no schema triple (" + src.value_or("*") + ")-[" + rel.relation + "]->(" +
                                   dst.value_or("*") + ")");
            }
        }
    }
    for (const auto& item : q.return_items) {
        if (!bound.contains(item.variable)) problems.push_back("RETURN variable '" + item.variable + "' is unbound");
        if (item.property != "name") {
            problems.push_back("RETURN item '" + cypher::serialize_return_item(item) + "' does not project .name");
        }
    }
    return problems;
}

nlohmann::json report_to_json(const RepairReport& report) {
    nlohmann::json corrections = nlohmann::json::array();
    for (const auto& c : report.corrections) {
        corrections.push_back({{"stage", to_string(c.stage)},
                               {"description", c.description},
                               {"before", c.before},
                               {"after", c.after}});
    }
    nlohmann::json unresolved = nlohmann::json::array();
    for (const auto& d : report.unresolved) {
        unresolved.push_back({{"kind", to_string(d.kind)}, {"detail", d.detail}});
    }
    return {{"input_query", report.input_query},
            {"output_query", report.output_query},
            {"corrections", corrections},
            {"unresolved", unresolved}};
}

}  // namespace kgqa::checker
