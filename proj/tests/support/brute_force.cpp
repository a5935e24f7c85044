#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "support/generators.hpp"

namespace kgqa::testing {

using cypher::CypherQuery;
using cypher::Direction;
using cypher::NodePattern;

Vocabulary awkward_vocabulary() {
    return {
        {"drug", "disease", "gene/protein", "biological process", "match", "we`ird", "_x1"},
        {"indication", "side effect", "protein-protein interaction", "RETURN", "target", "a`b"},
        {"multiple sclerosis", "POMC", "say \"hi\"", "back\\slash", "it's", "Crohn disease", "x"},
        {"a", "b", "dr", "d", "n1", "`q`", "order", "g2"},
    };
}

namespace {

NodePattern random_node(Rng& rng, const Vocabulary& vocab, std::string var, int label_percent, int name_percent) {
    NodePattern n;
    n.variable = std::move(var);
    if (chance(rng, label_percent)) n.label = pick(rng, vocab.labels);
    if (chance(rng, name_percent)) n.name_filter = pick(rng, vocab.names);
    return n;
}

cypher::RelPattern random_rel(Rng& rng, const Vocabulary& vocab) {
    return {pick(rng, vocab.relations), chance(rng, 50) ? Direction::LeftToRight : Direction::RightToLeft};
}

}  // namespace

CypherQuery random_query(Rng& rng, int structure, const Vocabulary& vocab, int label_percent, int name_percent) {
    // Fresh variables per query; a few positions stay anonymous.
    std::vector<std::string> pool = vocab.variables;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::size_t next = 0;
    auto fresh = [&] { return pool.at(next++); };

    CypherQuery q;
    auto chain = [&](std::size_t hops) {
        cypher::PathPattern p;
        p.nodes.push_back(random_node(rng, vocab, fresh(), label_percent, name_percent));
        for (std::size_t i = 0; i < hops; ++i) {
            p.rels.push_back(random_rel(rng, vocab));
            p.nodes.push_back(random_node(rng, vocab, fresh(), label_percent, name_percent));
        }
        return p;
    };

    switch (structure) {
        case 1: q.patterns.push_back(chain(1)); break;
        case 2: {
            auto p = chain(2);
            p.rels[0].direction = Direction::RightToLeft;
            p.rels[1].direction = Direction::LeftToRight;
            q.patterns.push_back(std::move(p));
            break;
        }
        case 3: q.patterns.push_back(chain(2)); break;
        case 4: q.patterns.push_back(chain(3)); break;
        case 5: {
            auto first = chain(1);
            auto second = chain(2);
            // The second path starts at the first path's end node.
            second.nodes[0] = NodePattern{first.nodes[1].variable, std::nullopt, std::nullopt};
            q.patterns.push_back(std::move(first));
            q.patterns.push_back(std::move(second));
            break;
        }
        default: throw std::invalid_argument("structure must be 1-5");
    }

    std::vector<std::string> bound;
    for (const auto& p : q.patterns) {
        for (const auto& n : p.nodes) {
            if (n.variable && std::find(bound.begin(), bound.end(), *n.variable) == bound.end()) {
                bound.push_back(*n.variable);
            }
        }
    }
    const std::size_t items = 1 + pick_index(rng, 2);
    for (std::size_t i = 0; i < items; ++i) {
        q.return_items.push_back({pick(rng, bound), chance(rng, 80) ? std::optional<std::string>("name")
                                                                     : std::nullopt});
    }
    q.distinct = chance(rng, 20);

    // Drop some variables that RETURN does not need.
    for (auto& p : q.patterns) {
        for (auto& n : p.nodes) {
            if (!n.variable || (!n.label && !n.name_filter)) continue;
            const bool returned = std::any_of(q.return_items.begin(), q.return_items.end(),
                                              [&](const auto& r) { return r.variable == *n.variable; });
            std::size_t uses = 0;
            for (const auto& p2 : q.patterns) {
                for (const auto& n2 : p2.nodes) uses += n2.variable == n.variable;
            }
            if (!returned && uses == 1 && chance(rng, 25)) n.variable.reset();
        }
    }
    return q;
}

PropertyGraph random_graph(Rng& rng, std::size_t max_nodes, std::size_t max_edges, const Vocabulary& vocab) {
    const std::size_t n = 2 + pick_index(rng, max_nodes - 1);
    std::vector<GraphNode> nodes;
    for (std::size_t i = 0; i < n; ++i) {
        GraphNode node{"n" + std::to_string(i), pick(rng, vocab.labels), pick(rng, vocab.names), {}};
        if (chance(rng, 20)) node.extra_properties["code"] = "c" + std::to_string(i);
        nodes.push_back(std::move(node));
    }
    const std::size_t m = pick_index(rng, max_edges + 1);
    std::vector<GraphEdge> edges;
    for (std::size_t i = 0; i < m; ++i) {
        edges.push_back({"n" + std::to_string(pick_index(rng, n)), pick(rng, vocab.relations),
                         "n" + std::to_string(pick_index(rng, n))});
    }
    return PropertyGraph(std::move(nodes), std::move(edges));
}

std::vector<ResultRow> brute_force_execute(const PropertyGraph& graph, const CypherQuery& query) {
    // Each pattern position gets a slot; named variables share theirs.
    std::map<std::string, std::size_t> var_slot;
    std::vector<std::vector<std::size_t>> position_slot;
    std::size_t slots = 0;
    for (const auto& p : query.patterns) {
        auto& row = position_slot.emplace_back();
        for (const auto& n : p.nodes) {
            if (!n.variable) {
                row.push_back(slots++);
            } else {
                auto [it, fresh] = var_slot.emplace(*n.variable, slots);
                if (fresh) ++slots;
                row.push_back(it->second);
            }
        }
    }
    for (const auto& item : query.return_items) {
        if (!var_slot.contains(item.variable)) throw ExecutionError("unbound variable " + item.variable);
    }

    std::map<std::string, std::size_t> rel_id;
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> triples;
    for (std::size_t e = 0; e < graph.edge_count(); ++e) {
        const auto r = rel_id.emplace(graph.edges()[e].relation, rel_id.size()).first->second;
        triples.emplace(graph.edge_source(e), r, graph.edge_target(e));
    }

    auto node_ok = [&](const NodePattern& pat, const GraphNode& node) {
        return (!pat.label || *pat.label == node.label) && (!pat.name_filter || *pat.name_filter == node.name);
    };

    // Candidate nodes per slot: those satisfying every position mapped to it.
    std::vector<std::vector<std::size_t>> candidates(slots);
    for (std::size_t s = 0; s < slots; ++s) {
        for (std::size_t v = 0; v < graph.node_count(); ++v) {
            bool ok = true;
            for (std::size_t p = 0; p < query.patterns.size(); ++p) {
                for (std::size_t i = 0; i < position_slot[p].size(); ++i) {
                    if (position_slot[p][i] == s) ok = ok && node_ok(query.patterns[p].nodes[i], graph.node(v));
                }
            }
            if (ok) candidates[s].push_back(v);
        }
    }

    std::vector<ResultRow> rows;
    for (const auto& c : candidates) {
        if (c.empty()) return rows;
    }
    std::vector<std::size_t> pos(slots, 0);
    auto at = [&](std::size_t slot) { return candidates[slot][pos[slot]]; };

    while (true) {
        bool ok = true;
        for (std::size_t p = 0; p < query.patterns.size() && ok; ++p) {
            const auto& path = query.patterns[p];
            std::set<std::tuple<std::size_t, std::size_t, std::size_t>> used;
            for (std::size_t i = 0; i < path.rels.size() && ok; ++i) {
                const auto a = at(position_slot[p][i]);
                const auto b = at(position_slot[p][i + 1]);
                const auto& rel = path.rels[i];
                auto r = rel_id.find(rel.relation);
                if (r == rel_id.end()) {
                    ok = false;
                    break;
                }
                auto t = rel.direction == Direction::LeftToRight ? std::tuple(a, r->second, b)
                                                                 : std::tuple(b, r->second, a);
                // Triples are unique, so a triple identifies its edge.
                ok = triples.contains(t) && used.insert(t).second;
            }
        }
        if (ok) {
            ResultRow row;
            for (const auto& item : query.return_items) {
                const auto& node = graph.node(at(var_slot.at(item.variable)));
                if (!item.property) {
                    row.push_back("(:" + cypher::quote_name(node.label) + " {name:" + cypher::quote_string(node.name) +
                                  "})");
                } else if (*item.property == "name") {
                    row.push_back(node.name);
                } else {
                    auto it = node.extra_properties.find(*item.property);
                    row.push_back(it == node.extra_properties.end() ? "null" : it->second);
                }
            }
            rows.push_back(std::move(row));
        }
        // Odometer step over all slot assignments.
        std::size_t k = 0;
        while (k < slots && ++pos[k] == candidates[k].size()) pos[k++] = 0;
        if (k == slots) break;
    }

    std::sort(rows.begin(), rows.end());
    if (query.distinct) rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
}

}  // namespace kgqa::testing
