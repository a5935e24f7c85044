#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "kgqa/benchmark.hpp"
#include "kgqa/graph_store.hpp"

namespace kgqa::fixture {

/// Desk-scale biomedical knowledge graph and question set.
///
/// The raw graph mimics a typical biomedical KG export: every relation present in both
/// directions, several relations under their source codes. The transform
/// config renames those codes to display names and keeps only same-type
/// relations bidirectional. Questions are generated against the transformed
/// graph; expected answers come from direct path enumeration over its edges.
struct Fixture {
    PropertyGraph raw_graph;
    nlohmann::json transforms;
    PropertyGraph graph;  // raw_graph after transforms
    std::vector<bench::BenchmarkItem> items;
};

Fixture generate_fixture(std::uint32_t seed = 20240917);

/// Writes raw/{nodes,edges}.tsv, transforms.json and benchmark.json.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

}  // namespace kgqa::fixture
