#include <gtest/gtest.h>

#include "kgqa/benchmark.hpp"
#include "kgqa/query_checker.hpp"
#include "support/generators.hpp"
#include "support/temp_dir.hpp"

using namespace kgqa;
using namespace kgqa::checker;
using cypher::parse_query;
using cypher::serialize_query;

namespace {

const char* kFaulty = R"(MATCH (d:pathway {name:"multiple sclerosis"})-[:contraindication]->(dr:drug) RETURN dr)";
const char* kCorrected =
    "MATCH (d:disease {name:\"multiple sclerosis\"})<-[:contraindication]-(dr:drug)\nRETURN dr.name";

KnowledgeBase ms_kb() {
    return KnowledgeBase::from_graph(PropertyGraph({{"1", "drug", "infliximab", {}},
                                                    {"2", "disease", "multiple sclerosis", {}},
                                                    {"3", "disease", "optic neuritis", {}},
                                                    {"4", "pathway", "TNF signaling", {}},
                                                    {"5", "gene/protein", "TNF", {}}},
                                                   {{"1", "contraindication", "2"},
                                                    {"2", "related to disease", "3"},
                                                    {"3", "related to disease", "2"},
                                                    {"5", "interacts with pathway", "4"},
                                                    {"1", "target", "5"}}));
}

RepairReport check(const KnowledgeBase& kb, const std::string& text) {
    return check_and_repair(text, kb.schema, kb.index);
}

std::vector<Stage> stages(const RepairReport& r) {
    std::vector<Stage> out;
    for (const auto& c : r.corrections) out.push_back(c.stage);
    return out;
}

std::vector<DefectKind> kinds(const RepairReport& r) {
    std::vector<DefectKind> out;
    for (const auto& d : r.unresolved) out.push_back(d.kind);
    return out;
}

}  // namespace

TEST(Checker, WorkedExample) {
    const auto kb = ms_kb();
    const auto r = check(kb, kFaulty);
    EXPECT_EQ(r.output_query, kCorrected);
    EXPECT_TRUE(r.unresolved.empty());
    ASSERT_EQ(stages(r), (std::vector<Stage>{Stage::SyntaxReturn, Stage::NodeType, Stage::RelationDirection}));
    EXPECT_EQ(r.corrections[0].before, "dr");
    EXPECT_EQ(r.corrections[0].after, "dr.name");
    EXPECT_EQ(r.corrections[1].before, "(d:pathway {name:\"multiple sclerosis\"})");
    EXPECT_EQ(r.corrections[1].after, "(d:disease {name:\"multiple sclerosis\"})");
    EXPECT_EQ(r.corrections[2].before, "-[:contraindication]->");
    EXPECT_EQ(r.corrections[2].after, "<-[:contraindication]-");
    EXPECT_EQ(r.input_query, kFaulty);
}

TEST(Checker, WorkedExampleWithOnlyTheOneTriple) {
    const auto kb = KnowledgeBase::from_graph(PropertyGraph(
        {{"1", "drug", "infliximab", {}}, {"2", "disease", "multiple sclerosis", {}}, {"3", "pathway", "p", {}}},
        {{"1", "contraindication", "2"}}));
    EXPECT_EQ(check(kb, kFaulty).output_query, kCorrected);
}

TEST(SyntaxStage, AppendsName) {
    const auto r = syntax_node_check(parse_query("MATCH (dr:drug) RETURN dr"));
    ASSERT_EQ(r.corrections.size(), 1u);
    EXPECT_EQ(r.query.return_items[0].property, "name");
}

TEST(SyntaxStage, NameReturnUnchanged) {
    const auto q = parse_query("MATCH (dr:drug) RETURN dr.name");
    const auto r = syntax_node_check(q);
    EXPECT_TRUE(r.corrections.empty());
    EXPECT_TRUE(r.unresolved.empty());
    EXPECT_EQ(r.query, q);
}

TEST(SyntaxStage, OtherPropertyReplaced) {
    const auto r = syntax_node_check(parse_query("MATCH (dr:drug) RETURN dr.title"));
    ASSERT_EQ(r.corrections.size(), 1u);
    EXPECT_EQ(r.corrections[0].before, "dr.title");
    EXPECT_EQ(r.corrections[0].after, "dr.name");
}

TEST(SyntaxStage, UnboundVariableWithoutCandidate) {
    const auto r = syntax_node_check(parse_query("MATCH (a:drug)-[:r]->(b:disease) RETURN x"));
    ASSERT_EQ(r.unresolved.size(), 1u);
    EXPECT_EQ(r.unresolved[0].kind, DefectKind::UnboundReturnVariable);
}

TEST(SyntaxStage, UnboundVariableBindsSingleAnonymousNode) {
    const auto r = syntax_node_check(parse_query("MATCH (:drug)-[:contraindication]->(d:disease) RETURN x"));
    EXPECT_TRUE(r.unresolved.empty());
    ASSERT_EQ(r.corrections.size(), 2u);
    EXPECT_EQ(r.corrections[0].stage, Stage::SyntaxBinding);
    EXPECT_EQ(serialize_query(r.query), "MATCH (x:drug)-[:contraindication]->(d:disease)\nRETURN x.name");
}

TEST(SyntaxStage, AmbiguousBindingLeftUnresolved) {
    const auto r = syntax_node_check(parse_query("MATCH (:drug)-[:r]->(:disease) RETURN x"));
    ASSERT_EQ(r.unresolved.size(), 1u);
    EXPECT_EQ(r.unresolved[0].kind, DefectKind::UnboundReturnVariable);
}

TEST(NodeStage, RelabelsFromIndex) {
    const auto kb = ms_kb();
    const auto r = node_type_check(parse_query(R"(MATCH (d:pathway {name:"multiple sclerosis"}) RETURN d.name)"),
                                   kb.index, kb.schema);
    ASSERT_EQ(r.corrections.size(), 1u);
    EXPECT_EQ(r.query.patterns[0].nodes[0].label, "disease");
}

TEST(NodeStage, CorrectLabelUnchanged) {
    const auto kb = ms_kb();
    const auto q = parse_query(R"(MATCH (d:disease {name:"multiple sclerosis"}) RETURN d.name)");
    const auto r = node_type_check(q, kb.index, kb.schema);
    EXPECT_TRUE(r.corrections.empty());
    EXPECT_EQ(r.query, q);
}

TEST(NodeStage, UnknownNameIsUnresolved) {
    const auto kb = ms_kb();
    const auto r = check(kb, R"(MATCH (d:disease {name:"flu"})<-[:contraindication]-(dr:drug) RETURN dr.name)");
    EXPECT_EQ(kinds(r), (std::vector<DefectKind>{DefectKind::UnknownEntity}));
}

TEST(NodeStage, UnknownLabelIsUnresolved) {
    const auto kb = ms_kb();
    const auto r = check(kb, R"(MATCH (d:virus)<-[:contraindication]-(dr:drug) RETURN dr.name)");
    ASSERT_FALSE(r.unresolved.empty());
    EXPECT_EQ(r.unresolved[0].kind, DefectKind::UnknownEntity);
}

TEST(NodeStage, RelationAdjustedWhenUnique) {
    // TNF is a gene/protein, and only "target" links drugs to genes/proteins.
    const auto kb = ms_kb();
    const auto r = check(kb, R"(MATCH (dr:drug)-[:contraindication]->(g:disease {name:"TNF"}) RETURN dr.name)");
    EXPECT_TRUE(r.unresolved.empty());
    EXPECT_EQ(stages(r), (std::vector<Stage>{Stage::NodeType, Stage::RelationAdjust}));
    EXPECT_EQ(r.output_query, "MATCH (dr:drug)-[:target]->(g:`gene/protein` {name:\"TNF\"})\nRETURN dr.name");
}

TEST(NodeStage, NoCompatibleRelationRecorded) {
    const auto kb = ms_kb();
    const auto r =
        check(kb, R"(MATCH (p:pathway)-[:contraindication]->(d:pathway {name:"optic neuritis"}) RETURN p.name)");
    ASSERT_FALSE(r.unresolved.empty());
    EXPECT_EQ(r.unresolved[0].kind, DefectKind::NoCompatibleRelation);
}

TEST(RelationStage, FlipsReversedRelation) {
    const auto kb = ms_kb();
    const auto r = relation_direction_check(
        parse_query(R"(MATCH (d:disease)-[:contraindication]->(dr:drug) RETURN dr.name)"), kb.schema);
    ASSERT_EQ(r.corrections.size(), 1u);
    EXPECT_EQ(serialize_query(r.query), "MATCH (d:disease)<-[:contraindication]-(dr:drug)\nRETURN dr.name");
}

TEST(RelationStage, CorrectOrientationUnchanged) {
    const auto kb = ms_kb();
    const auto q = parse_query(R"(MATCH (dr:drug)-[:contraindication]->(d:disease) RETURN dr.name)");
    const auto r = relation_direction_check(q, kb.schema);
    EXPECT_TRUE(r.corrections.empty());
    EXPECT_EQ(r.query, q);
}

TEST(RelationStage, FlipsWithUnlabeledEndpoint) {
    const auto kb = ms_kb();
    const auto r = relation_direction_check(
        parse_query(R"(MATCH (d:disease)-[:contraindication]->(x) RETURN x.name)"), kb.schema);
    EXPECT_EQ(r.corrections.size(), 1u);
}

TEST(RelationStage, AbsentRelationLeftUntouched) {
    const auto kb = ms_kb();
    const auto q = parse_query(R"(MATCH (dr:drug)-[:indication]->(d:disease) RETURN dr.name)");
    const auto r = relation_direction_check(q, kb.schema);
    EXPECT_EQ(r.query, q);
    ASSERT_EQ(r.unresolved.size(), 1u);
    EXPECT_EQ(r.unresolved[0].kind, DefectKind::UnknownRelation);

    const auto q2 = parse_query(R"(MATCH (dr:drug)-[:target]->(d:disease) RETURN dr.name)");
    const auto r2 = relation_direction_check(q2, kb.schema);
    EXPECT_EQ(r2.query, q2);
    EXPECT_EQ(r2.unresolved.size(), 1u);
}

TEST(RelationStage, BidirectionalSelfRelationNeverFlipped) {
    const auto kb = ms_kb();
    for (const char* text : {"MATCH (a:disease)-[:`related to disease`]->(b:disease) RETURN b.name",
                             "MATCH (a:disease)<-[:`related to disease`]-(b:disease) RETURN b.name"}) {
        const auto r = check(kb, text);
        EXPECT_TRUE(r.corrections.empty()) << text;
        EXPECT_TRUE(r.unresolved.empty()) << text;
    }
}

TEST(Checker, CorrectQueryIsCanonicalized) {
    const auto kb = ms_kb();
    const auto r = check(kb, "match (dr:drug)  -[:contraindication]->  (d:disease)\n   return dr.name;");
    EXPECT_TRUE(r.corrections.empty());
    EXPECT_TRUE(r.unresolved.empty());
    EXPECT_EQ(r.output_query, "MATCH (dr:drug)-[:contraindication]->(d:disease)\nRETURN dr.name");
}

TEST(Checker, ParseErrorIsTerminal) {
    const auto kb = ms_kb();
    const std::string text = "MATCH (a)-[:contraindication*]->(b) RETURN b";
    const auto r = check(kb, text);
    EXPECT_EQ(kinds(r), (std::vector<DefectKind>{DefectKind::ParseError}));
    EXPECT_TRUE(r.corrections.empty());
    EXPECT_EQ(r.output_query, text);
    EXPECT_FALSE(r.parsed());
}

TEST(Checker, ReportJson) {
    const auto kb = ms_kb();
    const auto j = report_to_json(check(kb, kFaulty));
    EXPECT_EQ(j["output_query"], kCorrected);
    ASSERT_EQ(j["corrections"].size(), 3u);
    EXPECT_EQ(j["corrections"][1]["stage"], "NodeType");
    EXPECT_EQ(j["unresolved"].size(), 0u);
}

// A name living under two labels: the checker must pick the one label that
// some schema triple connects through the pattern's relation. The expected
// label comes from enumerating every label assignment.
TEST(NodeStage, AmbiguityMatchesEnumeration) {
    const auto kb = KnowledgeBase::from_graph(PropertyGraph({{"g1", "gene/protein", "POMC", {}},
                                                             {"p1", "pathway", "shared", {}},
                                                             {"b1", "biological process", "shared", {}},
                                                             {"d1", "disease", "obesity", {}},
                                                             {"x1", "exposure", "smoke", {}}},
                                                            {{"g1", "interacts with pathway", "p1"},
                                                             {"g1", "interacts with biological process", "b1"},
                                                             {"x1", "interacts with biological process", "b1"},
                                                             {"g1", "associated with", "d1"}}));
    int checked = 0;
    for (const auto& triple : kb.schema.relation_triples) {
        for (const auto& other_label : kb.schema.node_labels) {
            for (bool shared_is_target : {true, false}) {
                const auto& rel = triple.relation;
                // Oracle: labels of "shared" consistent with (other)-[rel]-(shared) in this orientation.
                std::vector<std::string> consistent;
                for (const auto& label : kb.schema.node_labels) {
                    if (!kb.index.contains("shared", label)) continue;
                    const bool ok = shared_is_target ? kb.schema.has_triple(other_label, rel, label)
                                                     : kb.schema.has_triple(label, rel, other_label);
                    if (ok) consistent.push_back(label);
                }
                if (consistent.size() != 1) continue;
                const std::string shared_node = "(s:disease {name:\"shared\"})";
                const std::string other = "(o:" + cypher::quote_name(other_label) + ")";
                const std::string text = shared_is_target
                                             ? "MATCH " + other + "-[:" + cypher::quote_name(rel) + "]->" + shared_node +
                                                   " RETURN o.name"
                                             : "MATCH " + shared_node + "-[:" + cypher::quote_name(rel) + "]->" + other +
                                                   " RETURN o.name";
                const auto r = check(kb, text);
                const auto out = parse_query(r.output_query);
                const auto& s = out.patterns[0].nodes[shared_is_target ? 1 : 0];
                EXPECT_EQ(s.label, consistent[0]) << text;
                EXPECT_TRUE(r.unresolved.empty()) << text;
                ++checked;
            }
        }
    }
    EXPECT_GE(checked, 3);
}

TEST(Checker, IdempotentAndConservativeOnFixtureCorpus) {
    const auto kb = kgqa::testing::fixture_kb();
    const auto items = bench::load_benchmark(kgqa::testing::fixture_dir() / "benchmark.json");
    std::vector<std::string> gold;
    for (const auto& item : items) gold.push_back(*item.gold_cypher);
    const auto corpus = kgqa::testing::checker_corpus(kb, gold, 500, 5);
    ASSERT_EQ(corpus.size(), 500u);
    std::size_t valid = 0;
    for (const auto& text : corpus) {
        const auto first = check(kb, text);
        const auto second = check(kb, first.output_query);
        EXPECT_TRUE(second.corrections.empty()) << text << "\n-> " << first.output_query;
        EXPECT_EQ(second.output_query, first.output_query);
        const auto q = parse_query(text);
        if (validate_query(q, kb.schema, kb.index).empty()) {
            ++valid;
            EXPECT_TRUE(first.corrections.empty()) << text;
            EXPECT_EQ(first.output_query, serialize_query(q));
        }
    }
    EXPECT_GE(valid, 50u);
}

TEST(Checker, RepairsEveryRepairableMutationOfTheGoldQueries) {
    const auto kb = kgqa::testing::fixture_kb();
    const auto items = bench::load_benchmark(kgqa::testing::fixture_dir() / "benchmark.json");
    for (const auto& item : items) {
        const auto gold = parse_query(*item.gold_cypher);
        EXPECT_TRUE(validate_query(gold, kb.schema, kb.index).empty()) << *item.gold_cypher;
        for (auto m : {bench::Mutation::WrongLabel, bench::Mutation::ReversedDirection, bench::Mutation::BareReturn}) {
            const auto mutated = bench::mutate_query(gold, m, kb);
            EXPECT_NE(mutated, serialize_query(gold));
            const auto r = check(kb, mutated);
            EXPECT_TRUE(r.unresolved.empty()) << mutated;
            EXPECT_EQ(r.output_query, serialize_query(gold)) << mutated;
        }
    }
}
