#include <algorithm>
#include <array>
#include <cctype>

#include "kgqa/cypher.hpp"

namespace kgqa::cypher {

namespace {

constexpr std::array kReserved = {
    "MATCH", "RETURN", "WHERE", "AND", "OR", "XOR", "NOT", "AS", "DISTINCT", "CREATE", "DELETE",
    "DETACH", "MERGE", "SET", "REMOVE", "WITH", "UNWIND", "CALL", "OPTIONAL", "ORDER", "LIMIT",
    "SKIP", "UNION", "IN", "IS", "NULL", "TRUE", "FALSE", "CONTAINS", "STARTS", "ENDS", "BY",
};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
           });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view rtrim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool starts_with_keyword(std::string_view line, std::string_view kw) {
    if (line.size() < kw.size() || !iequals(line.substr(0, kw.size()), kw)) return false;
    return line.size() == kw.size() || !is_word_char(line[kw.size()]);
}

bool contains_keyword(std::string_view line, std::string_view kw) {
    for (std::size_t i = 0; i + kw.size() <= line.size(); ++i) {
        if (!iequals(line.substr(i, kw.size()), kw)) continue;
        const bool left_ok = i == 0 || !is_word_char(line[i - 1]);
        const bool right_ok = i + kw.size() == line.size() || !is_word_char(line[i + kw.size()]);
        if (left_ok && right_ok) return true;
    }
    return false;
}

bool is_fence(std::string_view line) { return trim(line).starts_with("```"); }

}  // namespace

ExtractionError::ExtractionError(ExtractionFailure kind)
    : std::runtime_error(kind == ExtractionFailure::NoMatchFound
                             ? "no line starting with MATCH in model output"
                             : "no RETURN line after the first MATCH line in model output"),
      kind_(kind) {}

std::string extract_cypher_block(std::string_view llm_output) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= llm_output.size()) {
        auto end = llm_output.find('\n', start);
        if (end == std::string_view::npos) end = llm_output.size();
        lines.push_back(rtrim(llm_output.substr(start, end - start)));
        start = end + 1;
    }

    std::size_t first = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (starts_with_keyword(trim(lines[i]), "MATCH")) {
            first = i;
            break;
        }
    }
    if (first == lines.size()) throw ExtractionError(ExtractionFailure::NoMatchFound);

    std::string out;
    for (std::size_t i = first; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (is_fence(line)) continue;
        const bool last = contains_keyword(line, "RETURN");
        if (last) {
            auto fence = line.find("```");
            if (fence != std::string_view::npos) line = rtrim(line.substr(0, fence));
        }
        if (!out.empty()) out += '\n';
        out += line;
        if (last) return out;
    }
    throw ExtractionError(ExtractionFailure::NoReturnFound);
}

bool is_plain_identifier(std::string_view name) {
    if (name.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
    return std::all_of(name.begin(), name.end(), is_word_char);
}

std::string quote_name(std::string_view name) {
    bool reserved = std::any_of(kReserved.begin(), kReserved.end(),
                                [&](const char* kw) { return iequals(name, kw); });
    if (is_plain_identifier(name) && !reserved) return std::string(name);
    std::string out = "`";
    for (char c : name) {
        if (c == '`') out += '`';
        out += c;
    }
    out += '`';
    return out;
}

std::string quote_string(std::string_view value) {
    std::string out = "\"";
    for (char c : value) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string serialize_node(const NodePattern& node) {
    std::string out = "(";
    if (node.variable) out += quote_name(*node.variable);
    if (node.label) out += ":" + quote_name(*node.label);
    if (node.name_filter) {
        if (node.variable || node.label) out += ' ';
        out += "{name:" + quote_string(*node.name_filter) + "}";
    }
    out += ")";
    return out;
}

std::string serialize_rel(const RelPattern& rel) {
    const auto body = "[:" + quote_name(rel.relation) + "]";
    return rel.direction == Direction::LeftToRight ? "-" + body + "->" : "<-" + body + "-";
}

std::string serialize_return_item(const ReturnItem& item) {
    auto out = quote_name(item.variable);
    if (item.property) out += "." + quote_name(*item.property);
    return out;
}

std::string serialize_query(const CypherQuery& query) {
    std::string out = "MATCH ";
    for (std::size_t p = 0; p < query.patterns.size(); ++p) {
        if (p > 0) out += ", ";
        const auto& path = query.patterns[p];
        for (std::size_t i = 0; i < path.nodes.size(); ++i) {
            if (i > 0) out += serialize_rel(path.rels[i - 1]);
            out += serialize_node(path.nodes[i]);
        }
    }
    out += "\nRETURN ";
    if (query.distinct) out += "DISTINCT ";
    for (std::size_t i = 0; i < query.return_items.size(); ++i) {
        if (i > 0) out += ", ";
        out += serialize_return_item(query.return_items[i]);
    }
    return out;
}

nlohmann::json query_to_json(const CypherQuery& query) {
    using nlohmann::json;
    auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
    json patterns = json::array();
    for (const auto& path : query.patterns) {
        json elems = json::array();
        for (std::size_t i = 0; i < path.nodes.size(); ++i) {
            if (i > 0) {
                const auto& r = path.rels[i - 1];
                elems.push_back({{"type", "rel"},
                                 {"relation", r.relation},
                                 {"direction", r.direction == Direction::LeftToRight ? "left_to_right"
                                                                                     : "right_to_left"}});
            }
            const auto& n = path.nodes[i];
            elems.push_back({{"type", "node"},
                             {"variable", opt(n.variable)},
                             {"label", opt(n.label)},
                             {"name", opt(n.name_filter)}});
        }
        patterns.push_back(std::move(elems));
    }
    json items = json::array();
    for (const auto& item : query.return_items) {
        items.push_back({{"variable", item.variable}, {"property", opt(item.property)}});
    }
    return {{"patterns", patterns}, {"return", items}, {"distinct", query.distinct}};
}

}  // namespace kgqa::cypher
