#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kgqa/cypher.hpp"
#include "kgqa/graph_store.hpp"

namespace kgqa {

class ExecutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ResultRow = std::vector<std::string>;

/// Matches every path pattern simultaneously (shared variables join) and
/// projects the RETURN items. Within one path an edge binds at most once.
/// Rows come back sorted; duplicates are kept unless the query is DISTINCT.
///
/// `v.name` projects the node name, `v.<key>` an extra property ("null" when
/// absent), and a bare `v` the node rendered as `(:label {name:"..."})`.
/// Throws ExecutionError when a RETURN variable is not bound by MATCH.
std::vector<ResultRow> execute_query(const PropertyGraph& graph, const cypher::CypherQuery& query);

/// One string per row, multi-column rows joined with ", ".
std::vector<std::string> flatten_rows(const std::vector<ResultRow>& rows);

}  // namespace kgqa
