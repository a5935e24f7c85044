#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kgqa/cypher.hpp"
#include "kgqa/executor.hpp"
#include "kgqa/graph_store.hpp"

namespace kgqa::testing {

using Rng = std::mt19937;

inline std::size_t pick_index(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[pick_index(rng, v.size())];
}

inline bool chance(Rng& rng, int percent) { return static_cast<int>(rng() % 100) < percent; }

struct Vocabulary {
    std::vector<std::string> labels;
    std::vector<std::string> relations;
    std::vector<std::string> names;
    std::vector<std::string> variables;
};

/// Labels, relations and names that need backticks or escapes when printed.
Vocabulary awkward_vocabulary();

/// Structures 1-5: 1 hop, 2-hop fork, 2-hop chain, 3-hop chain, two joined
/// paths. Variables are drawn so that RETURN always references bound ones.
cypher::CypherQuery random_query(Rng& rng, int structure, const Vocabulary& vocab, int label_percent = 80,
                                 int name_percent = 30);

PropertyGraph random_graph(Rng& rng, std::size_t max_nodes, std::size_t max_edges, const Vocabulary& vocab);

/// Independent executor: enumerates every assignment of graph nodes to
/// pattern positions and keeps those whose relationships exist, with no
/// relationship reused inside one path.
std::vector<ResultRow> brute_force_execute(const PropertyGraph& graph, const cypher::CypherQuery& query);

/// Checker corpus over a knowledge base: the benchmark gold queries, each gold
/// query under every repairable mutation, then random queries built from the
/// schema's labels, relations and node names, filled up to `size`.
std::vector<std::string> checker_corpus(const KnowledgeBase& kb, const std::vector<std::string>& gold_queries,
                                        std::size_t size, std::uint32_t seed);

}  // namespace kgqa::testing
