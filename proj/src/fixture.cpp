#include "kgqa/fixture.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "kgqa/cypher.hpp"

namespace kgqa::fixture {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct LabelSpec {
    const char* label;
    const char* plural;
    const char* var;
    std::array<const char*, 20> names;
};

// clang-format off
const std::array<LabelSpec, 10> kLabels = {{
    {"drug", "drugs", "dr", {"interferon beta-1a", "glatiramer acetate", "natalizumab", "fingolimod", "ocrelizumab",
        "dimethyl fumarate", "teriflunomide", "alemtuzumab", "cladribine", "siponimod", "infliximab", "etanercept",
        "adalimumab", "rituximab", "methotrexate", "prednisone", "baclofen", "tizanidine", "dalfampridine", "ibrutinib"}},
    {"disease", "diseases", "d", {"multiple sclerosis", "neuromyelitis optica", "Richter syndrome", "optic neuritis",
        "acute disseminated encephalomyelitis", "transverse myelitis", "chronic lymphocytic leukemia",
        "rheumatoid arthritis", "psoriasis", "Crohn disease", "systemic lupus erythematosus", "myasthenia gravis",
        "Guillain-Barre syndrome", "migraine", "epilepsy", "Parkinson disease", "Alzheimer disease", "uveitis",
        "sarcoidosis", "type 1 diabetes mellitus"}},
    {"phenotype", "phenotypes", "ph", {"fatigue", "spasticity", "ataxia", "diplopia", "paresthesia", "hyperreflexia",
        "urinary urgency", "visual loss", "nausea", "headache", "depression", "cognitive impairment", "tremor",
        "dysarthria", "vertigo", "hepatotoxicity", "lymphopenia", "injection site reaction", "flushing",
        "muscle weakness"}},
    {"gene/protein", "genes/proteins", "g", {"POMC", "APOE", "HLA-DRB1", "IL7R", "IL2RA", "CD40", "TNFRSF1A", "CYP27B1",
        "STAT3", "IRF8", "CD58", "CLEC16A", "AQP4", "MOG", "MBP", "PLP1", "TNF", "BTK", "S1PR1", "MS4A1"}},
    {"anatomy", "anatomical structures", "an", {"brain", "spinal cord", "optic nerve", "cerebral cortex", "cerebellum",
        "white matter", "thymus", "spleen", "lymph node", "bone marrow", "liver", "kidney", "retina", "brainstem",
        "hippocampus", "peripheral blood", "skin", "small intestine", "lung", "thalamus"}},
    {"cellular component", "cellular components", "cc", {"myelin sheath", "axon", "plasma membrane", "nucleus",
        "mitochondrion", "endoplasmic reticulum", "Golgi apparatus", "synapse", "cytoplasm", "lysosome",
        "node of Ranvier", "dendrite", "extracellular space", "cell surface", "endosome", "ribosome", "cytoskeleton",
        "tight junction", "immunological synapse", "MHC class II protein complex"}},
    {"pathway", "pathways", "pw", {"Interleukin-2 signaling", "TNF signaling", "JAK-STAT signaling",
        "Toll-like receptor cascades", "Sphingolipid metabolism", "Vitamin D metabolism",
        "Antigen processing and presentation", "Cholesterol biosynthesis", "B cell receptor signaling",
        "T cell receptor signaling", "Apoptosis", "NF-kB activation", "Complement cascade",
        "Interferon gamma signaling", "MAPK signaling", "Myelin formation pathway", "PI3K-Akt signaling",
        "Chemokine signaling", "Glutamate neurotransmission", "Oxidative stress response"}},
    {"molecular function", "molecular functions", "mf", {"cytokine receptor activity", "protein kinase activity",
        "MHC class II receptor activity", "lipid binding", "structural constituent of myelin sheath",
        "water channel activity", "DNA-binding transcription factor activity", "signaling receptor binding",
        "sphingosine-1-phosphate receptor activity", "calcium ion binding", "hormone activity",
        "tumor necrosis factor receptor activity", "antigen binding", "enzyme binding", "GTPase activity",
        "ATP binding", "chemokine activity", "peptide binding", "ubiquitin protein ligase activity",
        "oxidoreductase activity"}},
    {"exposure", "exposures", "e", {"cigarette smoke", "Epstein-Barr virus infection", "vitamin D deficiency",
        "ultraviolet radiation", "obesity in adolescence", "organic solvents", "air pollution", "shift work",
        "high salt intake", "alcohol consumption", "particulate matter", "pesticides", "heavy metals", "lead",
        "mercury", "benzene", "bisphenol A", "arsenic", "cadmium", "silica dust"}},
    {"biological process", "biological processes", "bp", {"immune response", "T cell activation",
        "B cell proliferation", "myelination", "axon ensheathment", "inflammatory response", "antigen presentation",
        "apoptotic process", "cytokine production", "neuron projection development", "response to vitamin D",
        "cholesterol metabolic process", "leukocyte migration", "oligodendrocyte differentiation",
        "regulation of cell death", "synaptic transmission", "response to virus", "lipid metabolic process",
        "signal transduction", "response to oxidative stress"}},
}};

struct RelationSpec {
    const char* code;     // relation name in the raw export
    const char* display;  // name after transforms
    const char* source;
    const char* target;
    bool self_bidirectional;
    const char* forward;  // {X} is the source; describes targets
    const char* reverse;  // {X} is the target; describes sources
};

const std::array<RelationSpec, 22> kRelations = {{
    {"indication", "indication", "drug", "disease", false, "that {X} is indicated for", "that are indicated for {X}"},
    {"contraindication", "contraindication", "drug", "disease", false, "for which {X} is contraindicated",
        "that are contraindicated when a patient has {X}"},
    {"off-label use", "off-label use", "drug", "disease", false, "for which {X} has an off-label use",
        "that have an off-label use for {X}"},
    {"side effect", "side effect", "drug", "phenotype", false, "that are side effects of {X}",
        "that have {X} as a side effect"},
    {"target", "target", "drug", "gene/protein", false, "that are targeted by {X}", "that target {X}"},
    {"synergistic interaction", "synergistic interaction", "drug", "drug", true,
        "that interact synergistically with {X}", "that interact synergistically with {X}"},
    {"protein_protein", "protein-protein interaction", "gene/protein", "gene/protein", true,
        "that interact with {X}", "that interact with {X}"},
    {"phenotype_protein", "gene/protein associated with phenotype", "gene/protein", "phenotype", false,
        "that {X} is associated with", "that are associated with {X}"},
    {"disease_phenotype_positive", "phenotype present in disease", "phenotype", "disease", false,
        "in which {X} is present", "that occur in {X}"},
    {"disease_protein", "gene/protein associated with disease", "gene/protein", "disease", false,
        "that {X} is associated with", "that are associated with {X}"},
    {"disease_disease", "related to disease", "disease", "disease", true, "that are related to {X}",
        "that are related to {X}"},
    {"molfunc_protein", "interacts with molecular function", "gene/protein", "molecular function", false,
        "that {X} interacts with", "that interact with {X}"},
    {"cellcomp_protein", "interacts with cellular component", "gene/protein", "cellular component", false,
        "that {X} interacts with", "that interact with {X}"},
    {"bioprocess_protein", "interacts with biological process", "gene/protein", "biological process", false,
        "that are affected by {X}", "that affect {X}"},
    {"exposure_protein", "interacts with gene_protein", "exposure", "gene/protein", false,
        "that {X} interacts with", "that interact with {X}"},
    {"exposure_disease", "disease linked to exposure", "exposure", "disease", false, "that are linked to {X}",
        "that can lead to {X}"},
    {"exposure_exposure", "related to exposure", "exposure", "exposure", true, "that are related to {X}",
        "that are related to {X}"},
    {"exposure_bioprocess", "interacts with biological process", "exposure", "biological process", false,
        "that are affected by an exposure to {X}", "that affect {X}"},
    {"exposure_molfunc", "interacts with molecular function", "exposure", "molecular function", false,
        "that {X} interacts with", "that interact with {X}"},
    {"pathway_protein", "interacts with pathway", "gene/protein", "pathway", false, "that {X} interacts with",
        "that interact with {X}"},
    {"anatomy_protein_present", "expression present in anatomical structure", "gene/protein", "anatomy", false,
        "in which {X} is expressed", "that are expressed in {X}"},
    {"anatomy_protein_absent", "expression absent in anatomical structure", "gene/protein", "anatomy", false,
        "in which {X} is not expressed", "that are not expressed in {X}"},
}};

// Edges every generated graph carries, so the classic example questions exist.
const std::array<std::array<const char*, 3>, 18> kAnchorEdges = {{
    {"infliximab", "contraindication", "multiple sclerosis"},
    {"etanercept", "contraindication", "multiple sclerosis"},
    {"adalimumab", "contraindication", "multiple sclerosis"},
    {"interferon beta-1a", "indication", "multiple sclerosis"},
    {"ibrutinib", "indication", "Richter syndrome"},
    {"ibrutinib", "side effect", "nausea"},
    {"ibrutinib", "side effect", "headache"},
    {"POMC", "phenotype_protein", "fatigue"},
    {"fatigue", "disease_phenotype_positive", "neuromyelitis optica"},
    {"Epstein-Barr virus infection", "exposure_disease", "multiple sclerosis"},
    {"vitamin D deficiency", "exposure_disease", "multiple sclerosis"},
    {"Epstein-Barr virus infection", "exposure_protein", "CD40"},
    {"CD40", "pathway_protein", "TNF signaling"},
    {"vitamin D deficiency", "exposure_protein", "CYP27B1"},
    {"CYP27B1", "pathway_protein", "Vitamin D metabolism"},
    {"APOE", "bioprocess_protein", "lipid metabolic process"},
    {"cigarette smoke", "exposure_bioprocess", "lipid metabolic process"},
    {"cigarette smoke", "exposure_disease", "multiple sclerosis"},
}};
// clang-format on

class Rng {
public:
    explicit Rng(std::uint32_t seed) : engine_(seed) {}
    // Modulo draw: reproducible across standard libraries, unlike <random> distributions.
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

private:
    std::mt19937 engine_;
};

const LabelSpec& label_spec(std::string_view label) {
    for (const auto& l : kLabels) {
        if (label == l.label) return l;
    }
    throw std::logic_error("unknown fixture label");
}

std::size_t relation_by_code(std::string_view code) {
    for (std::size_t i = 0; i < kRelations.size(); ++i) {
        if (code == kRelations[i].code) return i;
    }
    throw std::logic_error("unknown fixture relation");
}

std::string replace_x(std::string_view phrase, const std::string& x) {
    std::string out(phrase);
    out.replace(out.find("{X}"), 3, x);
    return out;
}

PropertyGraph build_raw_graph(Rng& rng) {
    std::vector<GraphNode> nodes;
    std::map<std::string, std::vector<std::string>> ids_by_label;
    std::map<std::string, std::string> id_by_name;
    int counter = 0;
    for (const auto& l : kLabels) {
        for (const char* name : l.names) {
            char id[16];
            std::snprintf(id, sizeof id, "N%03d", ++counter);
            nodes.push_back(GraphNode{id, l.label, name, {}});
            ids_by_label[l.label].push_back(id);
            id_by_name[name] = id;
        }
    }

    std::vector<std::array<std::string, 3>> canonical;  // source id, relation code, target id
    for (const auto& [src, code, dst] : kAnchorEdges) {
        canonical.push_back({id_by_name.at(src), code, id_by_name.at(dst)});
    }
    for (const auto& rel : kRelations) {
        const auto& sources = ids_by_label.at(rel.source);
        const auto& targets = ids_by_label.at(rel.target);
        const int count = rel.self_bidirectional ? 10 : 22;
        for (int i = 0; i < count; ++i) {
            const auto& s = sources[rng.below(sources.size())];
            const auto& t = targets[rng.below(targets.size())];
            if (s == t) continue;
            canonical.push_back({s, rel.code, t});
        }
    }

    // Raw export lists every relation in both directions, canonical first.
    std::vector<GraphEdge> edges;
    for (const auto& [s, code, t] : canonical) {
        edges.push_back({s, code, t});
        edges.push_back({t, code, s});
    }
    return PropertyGraph(std::move(nodes), std::move(edges));
}

json transform_json() {
    json renames = json::array();
    json bidirectional = json::array();
    for (const auto& rel : kRelations) {
        if (std::string_view(rel.code) != rel.display) renames.push_back({{"from", rel.code}, {"to", rel.display}});
        if (rel.self_bidirectional) bidirectional.push_back(rel.display);
    }
    return {{"relation_renames", renames},
            {"drop_reverse_duplicates", true},
            {"bidirectional_self_relations", bidirectional}};
}

struct Hop {
    std::size_t relation;
    bool forward;  // traverse source → target
};

class PathWalker {
public:
    explicit PathWalker(const PropertyGraph& g) : g_(g) {}

    // Edges of `hop` leaving `node` in traversal direction: (edge, next node).
    std::vector<std::pair<std::size_t, std::size_t>> step(std::size_t node, const Hop& hop) const {
        const auto& rel = kRelations[hop.relation];
        std::vector<std::pair<std::size_t, std::size_t>> out;
        const auto& here = g_.node(node).label;
        if (here != (hop.forward ? rel.source : rel.target)) return out;
        const auto& edges = hop.forward ? g_.out_edges(node) : g_.in_edges(node);
        for (auto e : edges) {
            if (g_.edges()[e].relation != rel.display) continue;
            const auto next = hop.forward ? g_.edge_target(e) : g_.edge_source(e);
            if (g_.node(next).label != (hop.forward ? rel.target : rel.source)) continue;
            out.emplace_back(e, next);
        }
        return out;
    }

    // End nodes of every edge-distinct walk following `hops` from `start`.
    std::set<std::size_t> ends(std::size_t start, const std::vector<Hop>& hops) const {
        std::set<std::size_t> out;
        std::vector<std::size_t> used;
        walk(start, hops, 0, used, out);
        return out;
    }

    // Incident (hop, next) options from a node, optionally excluding self relations.
    std::vector<std::pair<Hop, std::size_t>> options(std::size_t node, bool allow_self) const {
        std::vector<std::pair<Hop, std::size_t>> out;
        for (std::size_t r = 0; r < kRelations.size(); ++r) {
            if (!allow_self && kRelations[r].self_bidirectional) continue;
            for (bool fwd : {true, false}) {
                for (const auto& [e, next] : step(node, Hop{r, fwd})) out.push_back({Hop{r, fwd}, next});
            }
        }
        return out;
    }

private:
    void walk(std::size_t node, const std::vector<Hop>& hops, std::size_t i, std::vector<std::size_t>& used,
              std::set<std::size_t>& out) const {
        if (i == hops.size()) {
            out.insert(node);
            return;
        }
        for (const auto& [e, next] : step(node, hops[i])) {
            if (std::find(used.begin(), used.end(), e) != used.end()) continue;
            used.push_back(e);
            walk(next, hops, i + 1, used, out);
            used.pop_back();
        }
    }

    const PropertyGraph& g_;
};

Hop inverse(const Hop& h) { return Hop{h.relation, !h.forward}; }

const char* hop_target_label(const Hop& h) {
    return h.forward ? kRelations[h.relation].target : kRelations[h.relation].source;
}

// `x_plural` switches verbs whose subject is {X} to plural agreement.
std::string clause(const Hop& h, const std::string& x, bool x_plural) {
    std::string phrase = h.forward ? kRelations[h.relation].forward : kRelations[h.relation].reverse;
    if (x_plural) {
        static constexpr std::pair<std::string_view, std::string_view> kPlural[] = {
            {"{X} is", "{X} are"}, {"{X} has", "{X} have"}, {"{X} interacts", "{X} interact"}};
        for (const auto& [from, to] : kPlural) {
            if (auto pos = phrase.find(from); pos != std::string::npos) phrase.replace(pos, from.size(), to);
        }
    }
    return replace_x(phrase, x);
}

std::string noun_phrase(const Hop& h, const std::string& x, bool x_plural) {
    return std::string("the ") + label_spec(hop_target_label(h)).plural + " " + clause(h, x, x_plural);
}

class QueryBuilder {
public:
    std::string var_for(const std::string& label) {
        std::string base = label_spec(label).var;
        const int n = ++uses_[base];
        return n == 1 ? base : base + std::to_string(n);
    }

    static cypher::NodePattern node(const std::string& var, const std::string& label,
                                    std::optional<std::string> name = std::nullopt) {
        return cypher::NodePattern{var, label, std::move(name)};
    }

    static cypher::RelPattern rel(const Hop& h) {
        return cypher::RelPattern{kRelations[h.relation].display,
                                  h.forward ? cypher::Direction::LeftToRight : cypher::Direction::RightToLeft};
    }

private:
    std::map<std::string, int> uses_;
};

// A path query from a named node; the last node is returned.
cypher::CypherQuery chain_query(const PropertyGraph& g, std::size_t start, const std::vector<Hop>& hops) {
    QueryBuilder qb;
    cypher::PathPattern path;
    const auto& first = g.node(start);
    path.nodes.push_back(QueryBuilder::node(qb.var_for(first.label), first.label, first.name));
    for (const auto& h : hops) {
        path.rels.push_back(QueryBuilder::rel(h));
        const std::string label = hop_target_label(h);
        path.nodes.push_back(QueryBuilder::node(qb.var_for(label), label));
    }
    cypher::CypherQuery q;
    q.return_items.push_back({*path.nodes.back().variable, "name"});
    q.patterns.push_back(std::move(path));
    return q;
}

std::string chain_question(const PropertyGraph& g, std::size_t start, const std::vector<Hop>& hops) {
    std::string x = g.node(start).name;
    for (std::size_t i = 0; i + 1 < hops.size(); ++i) x = noun_phrase(hops[i], x, i > 0);
    const auto& last = hops.back();
    return std::string("What are the names of the ") + label_spec(hop_target_label(last)).plural + " " +
           clause(last, x, hops.size() > 1) + "?";
}

struct Candidate {
    std::string question;
    cypher::CypherQuery gold;
    std::set<std::size_t> answers;
};

class QuestionGenerator {
public:
    QuestionGenerator(const PropertyGraph& g, Rng& rng) : g_(g), walker_(g), rng_(rng) {}

    std::vector<bench::BenchmarkItem> generate(int per_structure) {
        std::vector<bench::BenchmarkItem> items;
        for (int structure = 1; structure <= 5; ++structure) {
            int made = 0;
            bool anchored = false;
            for (int attempt = 0; made < per_structure && attempt < 20000; ++attempt) {
                auto c = anchored ? sample(structure) : anchor(structure);
                anchored = true;
                if (!c || c->answers.empty() || c->answers.size() > 8) continue;
                auto text = cypher::serialize_query(c->gold);
                if (!seen_queries_.insert(text).second || !seen_questions_.insert(c->question).second) continue;
                bench::BenchmarkItem item;
                ++made;
                char id[16];
                std::snprintf(id, sizeof id, "s%d-%02d", structure, made);
                item.id = id;
                item.question = c->question;
                item.structure = structure;
                item.hops = bench::hops_for_structure(structure);
                for (auto n : c->answers) item.expected_answers.insert(g_.node(n).name);
                item.gold_cypher = text;
                items.push_back(std::move(item));
            }
            if (made < per_structure) throw std::logic_error("fixture graph too sparse for structure " +
                                                             std::to_string(structure));
        }
        return items;
    }

private:
    std::size_t by_name(std::string_view name) const {
        for (std::size_t i = 0; i < g_.node_count(); ++i) {
            if (g_.node(i).name == name) return i;
        }
        throw std::logic_error("missing anchor node");
    }

    Hop hop(std::string_view code, bool forward) const { return Hop{relation_by_code(code), forward}; }

    Candidate chain(std::size_t start, std::vector<Hop> hops) const {
        return {chain_question(g_, start, hops), chain_query(g_, start, hops), walker_.ends(start, hops)};
    }

    // The first question of each structure mirrors the classic examples.
    std::optional<Candidate> anchor(int structure) const {
        switch (structure) {
            case 1: return chain(by_name("multiple sclerosis"), {hop("contraindication", false)});
            case 2: return chain(by_name("Richter syndrome"), {hop("indication", false), hop("side effect", true)});
            case 3:
                return chain(by_name("POMC"),
                             {hop("phenotype_protein", true), hop("disease_phenotype_positive", true)});
            case 4:
                return chain(by_name("multiple sclerosis"), {hop("exposure_disease", false),
                                                             hop("exposure_protein", true),
                                                             hop("pathway_protein", true)});
            case 5:
                return fork_join(by_name("APOE"), hop("bioprocess_protein", true), hop("exposure_bioprocess", false),
                                 hop("exposure_disease", true), by_name("multiple sclerosis"));
            default: return std::nullopt;
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[rng_.below(v.size())];
    }

    std::optional<Candidate> sample(int structure) {
        const auto start = rng_.below(g_.node_count());
        switch (structure) {
            case 1: {
                auto opts = walker_.options(start, false);
                if (opts.empty()) return std::nullopt;
                return chain(start, {pick(opts).first});
            }
            case 2: {
                // Fork: a hub that is the source of both relations.
                std::vector<std::pair<Hop, std::size_t>> outs;
                for (const auto& o : walker_.options(start, false)) {
                    if (o.first.forward) outs.push_back(o);
                }
                if (outs.size() < 2) return std::nullopt;
                const auto& a = pick(outs);
                const auto& b = pick(outs);
                if (a.first.relation == b.first.relation) return std::nullopt;
                return chain(a.second, {inverse(a.first), b.first});
            }
            case 3: {
                std::vector<std::pair<Hop, std::size_t>> outs;
                for (const auto& o : walker_.options(start, false)) {
                    if (o.first.forward) outs.push_back(o);
                }
                if (outs.empty()) return std::nullopt;
                const auto& a = pick(outs);
                std::vector<std::pair<Hop, std::size_t>> next;
                for (const auto& o : walker_.options(a.second, false)) {
                    if (o.first.forward) next.push_back(o);
                }
                if (next.empty()) return std::nullopt;
                return chain(start, {a.first, pick(next).first});
            }
            case 4: {
                std::vector<Hop> hops;
                auto node = start;
                for (int i = 0; i < 3; ++i) {
                    auto opts = walker_.options(node, true);
                    if (opts.empty()) return std::nullopt;
                    const auto& o = pick(opts);
                    hops.push_back(o.first);
                    node = o.second;
                }
                return chain(start, hops);
            }
            case 5: {
                auto first = walker_.options(start, true);
                if (first.empty()) return std::nullopt;
                const auto& [h1, mid] = pick(first);
                auto second = walker_.options(mid, true);
                if (second.empty()) return std::nullopt;
                const auto& [h2, c] = pick(second);
                auto third = walker_.options(c, true);
                if (third.empty()) return std::nullopt;
                const auto& [h3, d] = pick(third);
                if (d == start) return std::nullopt;
                return fork_join(start, h1, h2, h3, d);
            }
            default: return std::nullopt;
        }
    }

    // (A)-h1-(B), (B)-h2-(C)-h3-(D) with A and D named; B is returned.
    std::optional<Candidate> fork_join(std::size_t a, Hop h1, Hop h2, Hop h3, std::size_t d) const {
        const auto from_a = walker_.ends(a, {h1});
        const auto from_d = walker_.ends(d, {inverse(h3), inverse(h2)});
        Candidate c;
        std::set_intersection(from_a.begin(), from_a.end(), from_d.begin(), from_d.end(),
                              std::inserter(c.answers, c.answers.end()));

        QueryBuilder qb;
        const auto& na = g_.node(a);
        const auto& nd = g_.node(d);
        const std::string b_label = hop_target_label(h1);
        const std::string c_label = hop_target_label(h2);
        const auto va = qb.var_for(na.label);
        const auto vb = qb.var_for(b_label);
        const auto vc = qb.var_for(c_label);
        const auto vd = qb.var_for(nd.label);
        cypher::PathPattern p1{{QueryBuilder::node(va, na.label, na.name), QueryBuilder::node(vb, b_label)},
                               {QueryBuilder::rel(h1)}};
        cypher::PathPattern p2{{cypher::NodePattern{vb, std::nullopt, std::nullopt}, QueryBuilder::node(vc, c_label),
                                QueryBuilder::node(vd, nd.label, nd.name)},
                               {QueryBuilder::rel(h2), QueryBuilder::rel(h3)}};
        c.gold.patterns = {std::move(p1), std::move(p2)};
        c.gold.return_items.push_back({vb, "name"});

        const auto inner = noun_phrase(inverse(h3), nd.name, false);
        c.question = std::string("What are the names of the ") + label_spec(b_label).plural + " " +
                     clause(h1, na.name, false) + " and " + clause(inverse(h2), inner, true) + "?";
        return c;
    }

    const PropertyGraph& g_;
    PathWalker walker_;
    Rng& rng_;
    std::set<std::string> seen_queries_;
    std::set<std::string> seen_questions_;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

Fixture generate_fixture(std::uint32_t seed) {
    Rng rng(seed);
    Fixture f;
    f.raw_graph = build_raw_graph(rng);
    f.transforms = transform_json();
    f.graph = apply_transforms(f.raw_graph, parse_transform_config(f.transforms)).graph;
    QuestionGenerator gen(f.graph, rng);
    f.items = gen.generate(10);
    return f;
}

void write_fixture(const Fixture& fixture, const fs::path& dir) {
    fs::create_directories(dir);
    write_graph_tsv(fixture.raw_graph, dir / "raw");
    write_text(dir / "transforms.json", fixture.transforms.dump(2) + "\n");
    write_text(dir / "benchmark.json", bench::benchmark_to_json(fixture.items).dump(2) + "\n");
}

}  // namespace kgqa::fixture
