#include "kgqa/executor.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace kgqa {

using cypher::CypherQuery;
using cypher::Direction;
using cypher::NodePattern;

namespace {

struct PlannedPath {
    const cypher::PathPattern* path;
    std::vector<std::size_t> slots;  // slot per node position
    std::vector<std::size_t> order;  // visiting order of node positions
};

class Matcher {
public:
    Matcher(const PropertyGraph& graph, const CypherQuery& query) : graph_(graph), query_(query) {
        for (const auto& path : query.patterns) {
            PlannedPath planned{&path, {}, {}};
            for (const auto& node : path.nodes) {
                if (node.variable) {
                    auto [it, inserted] = var_slots_.emplace(*node.variable, slot_count_);
                    if (inserted) ++slot_count_;
                    planned.slots.push_back(it->second);
                } else {
                    planned.slots.push_back(slot_count_++);
                }
            }
            paths_.push_back(std::move(planned));
        }
        for (const auto& item : query.return_items) {
            if (!var_slots_.contains(item.variable)) {
                throw ExecutionError("RETURN variable '" + item.variable + "' is not bound in MATCH");
            }
        }
        binding_.assign(slot_count_, std::nullopt);
    }

    std::vector<ResultRow> run() {
        search_path(0);
        std::sort(rows_.begin(), rows_.end());
        if (query_.distinct) rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
        return std::move(rows_);
    }

private:
    bool accepts(const NodePattern& pattern, std::size_t node) const {
        const auto& n = graph_.node(node);
        if (pattern.label && n.label != *pattern.label) return false;
        if (pattern.name_filter && n.name != *pattern.name_filter) return false;
        return true;
    }

    // Starts at an already-bound position if any, else a name-filtered one.
    void plan_order(PlannedPath& p) const {
        const auto n = p.path->nodes.size();
        std::size_t start = n;
        for (std::size_t i = 0; i < n && start == n; ++i) {
            if (binding_[p.slots[i]]) start = i;
        }
        for (std::size_t i = 0; i < n && start == n; ++i) {
            if (p.path->nodes[i].name_filter) start = i;
        }
        if (start == n) start = 0;
        p.order.clear();
        p.order.push_back(start);
        for (std::size_t i = start + 1; i < n; ++i) p.order.push_back(i);
        for (std::size_t i = start; i-- > 0;) p.order.push_back(i);
    }

    void search_path(std::size_t path_index) {
        if (path_index == paths_.size()) {
            emit_row();
            return;
        }
        auto& p = paths_[path_index];
        plan_order(p);
        used_edges_.clear();
        const auto first = p.order.front();
        const auto slot = p.slots[first];
        const auto& pattern = p.path->nodes[first];
        if (binding_[slot]) {
            if (accepts(pattern, *binding_[slot])) extend(path_index, 1);
            return;
        }
        for (std::size_t node = 0; node < graph_.node_count(); ++node) {
            if (!accepts(pattern, node)) continue;
            binding_[slot] = node;
            extend(path_index, 1);
            binding_[slot] = std::nullopt;
        }
    }

    void extend(std::size_t path_index, std::size_t step) {
        auto& p = paths_[path_index];
        if (step == p.order.size()) {
            // used_edges_ belongs to this path; the next path starts fresh.
            auto saved = used_edges_;
            search_path(path_index + 1);
            used_edges_ = std::move(saved);
            return;
        }
        const auto pos = p.order[step];
        const bool moving_right = step > 0 && pos > p.order[0];
        const auto from = moving_right ? pos - 1 : pos + 1;
        const auto& rel = p.path->rels[moving_right ? pos - 1 : pos];
        const auto from_node = *binding_[p.slots[from]];

        // Outgoing from `from` iff the arrow points from `from` toward `pos`.
        const bool outgoing = moving_right == (rel.direction == Direction::LeftToRight);
        const auto& candidates = outgoing ? graph_.out_edges(from_node) : graph_.in_edges(from_node);
        const auto slot = p.slots[pos];
        const auto& pattern = p.path->nodes[pos];
        for (auto edge : candidates) {
            if (graph_.edges()[edge].relation != rel.relation) continue;
            if (std::find(used_edges_.begin(), used_edges_.end(), edge) != used_edges_.end()) continue;
            const auto other = outgoing ? graph_.edge_target(edge) : graph_.edge_source(edge);
            if (!accepts(pattern, other)) continue;
            const bool was_bound = binding_[slot].has_value();
            if (was_bound && *binding_[slot] != other) continue;
            binding_[slot] = other;
            used_edges_.push_back(edge);
            extend(path_index, step + 1);
            used_edges_.pop_back();
            if (!was_bound) binding_[slot] = std::nullopt;
        }
    }

    void emit_row() {
        ResultRow row;
        row.reserve(query_.return_items.size());
        for (const auto& item : query_.return_items) {
            const auto& n = graph_.node(*binding_[var_slots_.at(item.variable)]);
            if (!item.property) {
                row.push_back("(:" + cypher::quote_name(n.label) + " {name:" + cypher::quote_string(n.name) + "})");
            } else if (*item.property == "name") {
                row.push_back(n.name);
            } else {
                auto it = n.extra_properties.find(*item.property);
                row.push_back(it == n.extra_properties.end() ? "null" : it->second);
            }
        }
        rows_.push_back(std::move(row));
    }

    const PropertyGraph& graph_;
    const CypherQuery& query_;
    std::map<std::string, std::size_t> var_slots_;
    std::size_t slot_count_ = 0;
    std::vector<PlannedPath> paths_;
    std::vector<std::optional<std::size_t>> binding_;
    std::vector<std::size_t> used_edges_;
    std::vector<ResultRow> rows_;
};

}  // namespace

std::vector<ResultRow> execute_query(const PropertyGraph& graph, const CypherQuery& query) {
    return Matcher(graph, query).run();
}

std::vector<std::string> flatten_rows(const std::vector<ResultRow>& rows) {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        std::string joined;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) joined += ", ";
            joined += row[i];
        }
        out.push_back(std::move(joined));
    }
    return out;
}

}  // namespace kgqa
