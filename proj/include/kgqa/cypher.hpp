#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace kgqa::cypher {

struct NodePattern {
    std::optional<std::string> variable;
    std::optional<std::string> label;
    std::optional<std::string> name_filter;

    bool operator==(const NodePattern&) const = default;
};

enum class Direction { LeftToRight, RightToLeft };

struct RelPattern {
    std::string relation;
    Direction direction = Direction::LeftToRight;

    bool operator==(const RelPattern&) const = default;
};

/// n nodes joined by n-1 relationships; rels[i] connects nodes[i] and nodes[i+1].
struct PathPattern {
    std::vector<NodePattern> nodes;
    std::vector<RelPattern> rels;

    bool operator==(const PathPattern&) const = default;
};

struct ReturnItem {
    std::string variable;
    std::optional<std::string> property;

    bool operator==(const ReturnItem&) const = default;
};

struct CypherQuery {
    std::vector<PathPattern> patterns;
    std::vector<ReturnItem> return_items;
    bool distinct = false;

    bool operator==(const CypherQuery&) const = default;
};

class ParseError : public std::runtime_error {
public:
    // position is a 0-based byte offset into the input.
    ParseError(std::size_t position, const std::string& message);

    std::size_t position() const { return position_; }
    const std::string& detail() const { return detail_; }

private:
    std::size_t position_;
    std::string detail_;
};

enum class ExtractionFailure { NoMatchFound, NoReturnFound };

class ExtractionError : public std::runtime_error {
public:
    explicit ExtractionError(ExtractionFailure kind);
    ExtractionFailure kind() const { return kind_; }

private:
    ExtractionFailure kind_;
};

/// Pulls the lines from the first MATCH line through the first line containing
/// RETURN out of free-form model output. Throws ExtractionError.
std::string extract_cypher_block(std::string_view llm_output);

/// Parses the MATCH/RETURN subset. Throws ParseError.
CypherQuery parse_query(std::string_view text);

std::string serialize_query(const CypherQuery& query);
std::string serialize_node(const NodePattern& node);
std::string serialize_rel(const RelPattern& rel);
std::string serialize_return_item(const ReturnItem& item);

/// Backtick-quotes a name unless it is a plain, non-reserved identifier.
std::string quote_name(std::string_view name);
bool is_plain_identifier(std::string_view name);
std::string quote_string(std::string_view value);

nlohmann::json query_to_json(const CypherQuery& query);

}  // namespace kgqa::cypher
