#include "kgqa/graph_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "kgqa/cypher.hpp"

namespace kgqa {

namespace fs = std::filesystem;
using nlohmann::json;

PropertyGraph::PropertyGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges)
    : nodes_(std::move(nodes)) {
    id_index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (n.id.empty()) throw GraphError("node " + std::to_string(i) + " has an empty id");
        if (n.label.empty()) throw GraphError("node '" + n.id + "' has an empty label");
        if (n.name.empty()) throw GraphError("node '" + n.id + "' has an empty name");
        if (!id_index_.emplace(n.id, i).second) {
            throw GraphError("duplicate node id '" + n.id + "'");
        }
    }
    out_.resize(nodes_.size());
    in_.resize(nodes_.size());
    edges_.reserve(edges.size());
    endpoints_.reserve(edges.size());
    for (auto& e : edges) {
        auto s = id_index_.find(e.source_id);
        if (s == id_index_.end()) throw GraphError("edge references unknown node id '" + e.source_id + "'");
        auto t = id_index_.find(e.target_id);
        if (t == id_index_.end()) throw GraphError("edge references unknown node id '" + e.target_id + "'");
        if (e.relation.empty()) throw GraphError("edge from '" + e.source_id + "' has an empty relation");
        if (!triples_.emplace(s->second, e.relation, t->second).second) continue;
        const std::size_t idx = edges_.size();
        out_[s->second].push_back(idx);
        in_[t->second].push_back(idx);
        endpoints_.emplace_back(s->second, t->second);
        edges_.push_back(std::move(e));
    }
}

std::optional<std::size_t> PropertyGraph::find_node(std::string_view id) const {
    auto it = id_index_.find(std::string(id));
    if (it == id_index_.end()) return std::nullopt;
    return it->second;
}

bool PropertyGraph::has_edge(std::string_view source_id, std::string_view relation,
                             std::string_view target_id) const {
    auto s = find_node(source_id);
    auto t = find_node(target_id);
    if (!s || !t) return false;
    return triples_.contains({*s, std::string(relation), *t});
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

template <typename OnRecord>
void read_tsv(const fs::path& file, std::size_t expected_fields, OnRecord&& on_record) {
    std::ifstream in(file);
    if (!in) throw GraphError("cannot open " + file.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields.size() != expected_fields) {
            throw GraphError(file.filename().string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(expected_fields) + " tab-separated fields, got " +
                             std::to_string(fields.size()));
        }
        for (const auto& f : fields) {
            if (f.empty()) {
                throw GraphError(file.filename().string() + ":" + std::to_string(line_no) +
                                 ": empty field");
            }
        }
        on_record(fields, line_no);
    }
    if (in.bad()) throw GraphError("read failure on " + file.string());
}

PropertyGraph load_tsv(const fs::path& dir) {
    std::vector<GraphNode> nodes;
    std::set<std::string> ids;
    read_tsv(dir / "nodes.tsv", 3, [&](std::vector<std::string>& f, std::size_t line_no) {
        if (!ids.insert(f[0]).second) {
            throw GraphError("nodes.tsv:" + std::to_string(line_no) + ": duplicate node id '" + f[0] + "'");
        }
        nodes.push_back(GraphNode{std::move(f[0]), std::move(f[1]), std::move(f[2]), {}});
    });
    std::vector<GraphEdge> edges;
    read_tsv(dir / "edges.tsv", 3, [&](std::vector<std::string>& f, std::size_t line_no) {
        for (const auto* id : {&f[0], &f[2]}) {
            if (!ids.contains(*id)) {
                throw GraphError("edges.tsv:" + std::to_string(line_no) +
                                 ": edge references unknown node id '" + *id + "'");
            }
        }
        edges.push_back(GraphEdge{std::move(f[0]), std::move(f[1]), std::move(f[2])});
    });
    return PropertyGraph(std::move(nodes), std::move(edges));
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw GraphError(path.string() + ": " + e.what());
    }
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw GraphError(where + ": missing string field '" + key + "'");
    }
    return it->get<std::string>();
}

}  // namespace

PropertyGraph parse_graph_json(const json& doc) {
    if (!doc.is_object()) throw GraphError("graph document must be a JSON object");
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    if (auto it = doc.find("nodes"); it != doc.end()) {
        if (!it->is_array()) throw GraphError("'nodes' must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& n = (*it)[i];
            const std::string where = "nodes[" + std::to_string(i) + "]";
            if (!n.is_object()) throw GraphError(where + ": expected an object");
            GraphNode node{require_string(n, "id", where), require_string(n, "label", where),
                           require_string(n, "name", where), {}};
            if (auto p = n.find("properties"); p != n.end() && !p->is_null()) {
                if (!p->is_object()) throw GraphError(where + ": 'properties' must be an object");
                for (const auto& [k, v] : p->items()) {
                    node.extra_properties[k] = v.is_string() ? v.get<std::string>() : v.dump();
                }
            }
            nodes.push_back(std::move(node));
        }
    }
    if (auto it = doc.find("edges"); it != doc.end()) {
        if (!it->is_array()) throw GraphError("'edges' must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& e = (*it)[i];
            const std::string where = "edges[" + std::to_string(i) + "]";
            if (!e.is_object()) throw GraphError(where + ": expected an object");
            edges.push_back(GraphEdge{require_string(e, "source", where),
                                      require_string(e, "relation", where),
                                      require_string(e, "target", where)});
        }
    }
    return PropertyGraph(std::move(nodes), std::move(edges));
}

PropertyGraph load_graph(const fs::path& path, GraphFormat format) {
    switch (format) {
        case GraphFormat::TriplesTsv:
            if (!fs::is_directory(path)) throw GraphError(path.string() + " is not a directory");
            return load_tsv(path);
        case GraphFormat::GraphJson:
            return parse_graph_json(read_json_file(path));
    }
    throw GraphError("unknown graph format");
}

PropertyGraph load_graph(const fs::path& path) {
    return load_graph(path, fs::is_directory(path) ? GraphFormat::TriplesTsv : GraphFormat::GraphJson);
}

json graph_to_json(const PropertyGraph& graph) {
    json nodes = json::array();
    for (const auto& n : graph.nodes()) {
        json props = json::object();
        for (const auto& [k, v] : n.extra_properties) props[k] = v;
        nodes.push_back({{"id", n.id}, {"label", n.label}, {"name", n.name}, {"properties", props}});
    }
    json edges = json::array();
    for (const auto& e : graph.edges()) {
        edges.push_back({{"source", e.source_id}, {"relation", e.relation}, {"target", e.target_id}});
    }
    return {{"nodes", nodes}, {"edges", edges}};
}

void write_graph_tsv(const PropertyGraph& graph, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream nodes(dir / "nodes.tsv", std::ios::binary);
    for (const auto& n : graph.nodes()) nodes << n.id << '\t' << n.label << '\t' << n.name << '\n';
    std::ofstream edges(dir / "edges.tsv", std::ios::binary);
    for (const auto& e : graph.edges()) {
        edges << e.source_id << '\t' << e.relation << '\t' << e.target_id << '\n';
    }
    if (!nodes || !edges) throw GraphError("failed writing graph to " + dir.string());
}

TransformConfig parse_transform_config(const json& doc) {
    if (!doc.is_object()) throw GraphError("transform config must be a JSON object");
    TransformConfig cfg;
    std::set<std::string> keys;
    if (auto it = doc.find("relation_renames"); it != doc.end()) {
        if (!it->is_array()) throw GraphError("'relation_renames' must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& r = (*it)[i];
            const std::string where = "relation_renames[" + std::to_string(i) + "]";
            if (!r.is_object()) throw GraphError(where + ": expected an object");
            RelationRename rename{require_string(r, "from", where), require_string(r, "to", where)};
            if (rename.from.empty() || rename.to.empty()) throw GraphError(where + ": empty name");
            if (!keys.insert(rename.from).second) {
                throw GraphError(where + ": duplicate rename key '" + rename.from + "'");
            }
            cfg.relation_renames.push_back(std::move(rename));
        }
    }
    // A value that is also a key would chain on re-application.
    for (const auto& r : cfg.relation_renames) {
        if (keys.contains(r.to)) {
            throw GraphError("rename target '" + r.to + "' is also a rename key");
        }
    }
    if (auto it = doc.find("drop_reverse_duplicates"); it != doc.end()) {
        if (!it->is_boolean()) throw GraphError("'drop_reverse_duplicates' must be a boolean");
        cfg.drop_reverse_duplicates = it->get<bool>();
    }
    if (auto it = doc.find("bidirectional_self_relations"); it != doc.end()) {
        if (!it->is_array()) throw GraphError("'bidirectional_self_relations' must be an array");
        for (const auto& v : *it) {
            if (!v.is_string()) throw GraphError("'bidirectional_self_relations' entries must be strings");
            cfg.bidirectional_self_relations.insert(v.get<std::string>());
        }
    }
    return cfg;
}

TransformConfig load_transform_config(const fs::path& path) {
    return parse_transform_config(read_json_file(path));
}

TransformResult apply_transforms(const PropertyGraph& graph, const TransformConfig& cfg) {
    TransformResult result;
    std::map<std::string, std::string> renames;
    for (const auto& r : cfg.relation_renames) renames.emplace(r.from, r.to);

    std::set<std::string> present;
    for (const auto& e : graph.edges()) present.insert(e.relation);
    for (const auto& r : cfg.relation_renames) {
        if (!present.contains(r.from)) {
            result.warnings.push_back("rename key '" + r.from + "' not present in graph");
        }
    }

    std::vector<GraphEdge> edges;
    edges.reserve(graph.edge_count());
    std::set<std::tuple<std::string, std::string, std::string>> kept;
    for (const auto& e : graph.edges()) {
        GraphEdge out = e;
        if (auto it = renames.find(e.relation); it != renames.end()) out.relation = it->second;

        if (cfg.drop_reverse_duplicates && out.source_id != out.target_id &&
            kept.contains({out.target_id, out.relation, out.source_id})) {
            const auto& src_label = graph.node(*graph.find_node(out.source_id)).label;
            const auto& dst_label = graph.node(*graph.find_node(out.target_id)).label;
            const bool self_bidirectional =
                src_label == dst_label && cfg.bidirectional_self_relations.contains(out.relation);
            if (!self_bidirectional) continue;
        }
        kept.emplace(out.source_id, out.relation, out.target_id);
        edges.push_back(std::move(out));
    }
    result.graph = PropertyGraph(graph.nodes(), std::move(edges));
    return result;
}

bool GraphSchema::has_relation(const std::string& relation) const {
    return std::any_of(relation_triples.begin(), relation_triples.end(),
                       [&](const RelationTriple& t) { return t.relation == relation; });
}

GraphSchema derive_schema(const PropertyGraph& graph) {
    GraphSchema schema;
    for (const auto& n : graph.nodes()) schema.node_labels.insert(n.label);
    for (std::size_t i = 0; i < graph.edge_count(); ++i) {
        const auto& e = graph.edges()[i];
        const auto& src = graph.node(graph.edge_source(i)).label;
        const auto& dst = graph.node(graph.edge_target(i)).label;
        schema.relation_triples.insert({src, e.relation, dst});
        if (src == dst && graph.has_edge(e.target_id, e.relation, e.source_id)) {
            schema.self_bidirectional.insert(e.relation);
        }
    }
    return schema;
}

std::string render_schema_text(const GraphSchema& schema) {
    std::string text = "Node properties:\n";
    for (const auto& label : schema.node_labels) {
        text += cypher::quote_name(label) + " {name: STRING}\n";
    }
    text += "\nThe relationships:\n";
    std::vector<std::string> lines;
    lines.reserve(schema.relation_triples.size());
    for (const auto& t : schema.relation_triples) {
        lines.push_back("(:" + cypher::quote_name(t.source_label) + ")-[:" + cypher::quote_name(t.relation) +
                        "]->(:" + cypher::quote_name(t.target_label) + ")");
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) text += l + "\n";
    return text;
}

json schema_to_json(const GraphSchema& schema) {
    json triples = json::array();
    for (const auto& t : schema.relation_triples) {
        triples.push_back({{"source", t.source_label}, {"relation", t.relation}, {"target", t.target_label}});
    }
    return {{"node_labels", schema.node_labels},
            {"relation_triples", triples},
            {"self_bidirectional", schema.self_bidirectional}};
}

EntityIndex::EntityIndex(const PropertyGraph& graph) {
    for (const auto& n : graph.nodes()) labels_by_name_[n.name].insert(n.label);
}

const std::set<std::string>& EntityIndex::lookup(const std::string& name) const {
    static const std::set<std::string> empty;
    auto it = labels_by_name_.find(name);
    return it == labels_by_name_.end() ? empty : it->second;
}

bool EntityIndex::contains(const std::string& name, const std::string& label) const {
    return lookup(name).contains(label);
}

KnowledgeBase KnowledgeBase::from_graph(PropertyGraph graph) {
    KnowledgeBase kb;
    kb.schema = derive_schema(graph);
    kb.index = EntityIndex(graph);
    kb.schema_text = render_schema_text(kb.schema);
    kb.graph = std::move(graph);
    return kb;
}

}  // namespace kgqa
