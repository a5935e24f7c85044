#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgqa/cypher.hpp"
#include "kgqa/graph_store.hpp"

namespace kgqa::checker {

enum class Stage { SyntaxReturn, SyntaxBinding, NodeType, RelationAdjust, RelationDirection };

enum class DefectKind {
    UnknownEntity,
    NoCompatibleRelation,
    UnknownRelation,
    UnboundReturnVariable,
    ParseError,
};

std::string_view to_string(Stage stage);
std::string_view to_string(DefectKind kind);

struct Correction {
    Stage stage;
    std::string description;
    std::string before;
    std::string after;

    bool operator==(const Correction&) const = default;
};

struct UnresolvedDefect {
    DefectKind kind;
    std::string detail;

    bool operator==(const UnresolvedDefect&) const = default;
};

struct RepairReport {
    std::vector<Correction> corrections;
    std::vector<UnresolvedDefect> unresolved;
    std::string input_query;
    std::string output_query;

    bool parsed() const;
};

struct StageResult {
    cypher::CypherQuery query;
    std::vector<Correction> corrections;
    std::vector<UnresolvedDefect> unresolved;
};

/// Adds `.name` to RETURN items and binds unbound RETURN variables to the
/// single anonymous node when that assignment is unambiguous.
StageResult syntax_node_check(const cypher::CypherQuery& query);

/// Relabels name-filtered nodes whose name lives under a different label,
/// then adjusts touching relations when exactly one schema-compatible
/// relation exists for the new label.
StageResult node_type_check(const cypher::CypherQuery& query, const EntityIndex& index,
                            const GraphSchema& schema);

/// Flips relationships whose declared triple exists only in the reverse
/// orientation. Bidirectional self-relations are never flipped.
StageResult relation_direction_check(const cypher::CypherQuery& query, const GraphSchema& schema);

/// Parse, then syntax → node → relation. Never throws on bad input.
RepairReport check_and_repair(std::string_view query_text, const GraphSchema& schema,
                              const EntityIndex& index);

/// Violations of the fully-valid predicate (labels and triples in schema,
/// names under their labels, every return item `v.name` with v bound).
/// Empty means valid.
std::vector<std::string> validate_query(const cypher::CypherQuery& query, const GraphSchema& schema,
                                        const EntityIndex& index);

nlohmann::json report_to_json(const RepairReport& report);

}  // namespace kgqa::checker
