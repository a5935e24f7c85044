#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace kgqa {

struct GraphNode {
    std::string id;
    std::string label;
    std::string name;
    std::map<std::string, std::string> extra_properties;

    bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
    std::string source_id;
    std::string relation;
    std::string target_id;

    bool operator==(const GraphEdge&) const = default;
    auto operator<=>(const GraphEdge&) const = default;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable in-memory property graph.
///
/// Construction validates the invariants (unique ids, non-empty label and
/// name, edge endpoints exist) and collapses duplicate triples, keeping the
/// first occurrence. Edge order is the insertion order of first occurrences.
class PropertyGraph {
public:
    PropertyGraph() = default;
    PropertyGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges);

    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    std::optional<std::size_t> find_node(std::string_view id) const;
    const GraphNode& node(std::size_t index) const { return nodes_[index]; }

    // Edge endpoints as node indices, parallel to edges().
    std::size_t edge_source(std::size_t edge) const { return endpoints_[edge].first; }
    std::size_t edge_target(std::size_t edge) const { return endpoints_[edge].second; }

    // Indices into edges() leaving / entering a node.
    const std::vector<std::size_t>& out_edges(std::size_t node) const { return out_[node]; }
    const std::vector<std::size_t>& in_edges(std::size_t node) const { return in_[node]; }

    bool has_edge(std::string_view source_id, std::string_view relation,
                  std::string_view target_id) const;

    bool operator==(const PropertyGraph& other) const {
        return nodes_ == other.nodes_ && edges_ == other.edges_;
    }

private:
    std::vector<GraphNode> nodes_;
    std::vector<GraphEdge> edges_;
    std::vector<std::pair<std::size_t, std::size_t>> endpoints_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
    std::unordered_map<std::string, std::size_t> id_index_;
    std::set<std::tuple<std::size_t, std::string, std::size_t>> triples_;
};

enum class GraphFormat { TriplesTsv, GraphJson };

/// Loads a graph. TriplesTsv expects `path` to be a directory holding
/// nodes.tsv and edges.tsv; GraphJson expects a single JSON document.
PropertyGraph load_graph(const std::filesystem::path& path, GraphFormat format);

/// Directory → TriplesTsv, anything else → GraphJson.
PropertyGraph load_graph(const std::filesystem::path& path);

PropertyGraph parse_graph_json(const nlohmann::json& doc);
nlohmann::json graph_to_json(const PropertyGraph& graph);
void write_graph_tsv(const PropertyGraph& graph, const std::filesystem::path& dir);

struct RelationRename {
    std::string from;
    std::string to;

    bool operator==(const RelationRename&) const = default;
};

struct TransformConfig {
    std::vector<RelationRename> relation_renames;
    bool drop_reverse_duplicates = false;
    std::set<std::string> bidirectional_self_relations;
};

/// Throws GraphError when rename keys repeat.
TransformConfig parse_transform_config(const nlohmann::json& doc);
TransformConfig load_transform_config(const std::filesystem::path& path);

struct TransformResult {
    PropertyGraph graph;
    std::vector<std::string> warnings;
};

TransformResult apply_transforms(const PropertyGraph& graph, const TransformConfig& cfg);

struct RelationTriple {
    std::string source_label;
    std::string relation;
    std::string target_label;

    bool operator==(const RelationTriple&) const = default;
    auto operator<=>(const RelationTriple&) const = default;
};

struct GraphSchema {
    std::set<std::string> node_labels;
    std::set<RelationTriple> relation_triples;
    std::set<std::string> self_bidirectional;

    bool has_label(const std::string& label) const { return node_labels.contains(label); }
    bool has_triple(const std::string& source, const std::string& relation,
                    const std::string& target) const {
        return relation_triples.contains(RelationTriple{source, relation, target});
    }
    bool has_relation(const std::string& relation) const;

    bool operator==(const GraphSchema&) const = default;
};

GraphSchema derive_schema(const PropertyGraph& graph);

/// Canonical schema text fed to prompts: sorted labels with their properties,
/// then one `(:src)-[:rel]->(:dst)` line per triple, sorted.
std::string render_schema_text(const GraphSchema& schema);

nlohmann::json schema_to_json(const GraphSchema& schema);

/// Exact, case-sensitive name → labels lookup.
class EntityIndex {
public:
    EntityIndex() = default;
    explicit EntityIndex(const PropertyGraph& graph);

    const std::set<std::string>& lookup(const std::string& name) const;
    bool contains(const std::string& name, const std::string& label) const;
    std::size_t size() const { return labels_by_name_.size(); }

private:
    std::unordered_map<std::string, std::set<std::string>> labels_by_name_;
};

inline EntityIndex build_entity_index(const PropertyGraph& graph) { return EntityIndex(graph); }

/// Everything derived from one graph, shared read-only by pipeline and service.
struct KnowledgeBase {
    PropertyGraph graph;
    GraphSchema schema;
    EntityIndex index;
    std::string schema_text;

    static KnowledgeBase from_graph(PropertyGraph graph);
};

}  // namespace kgqa
