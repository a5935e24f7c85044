#include <algorithm>
#include <array>
#include <cctype>

#include "kgqa/cypher.hpp"

namespace kgqa::cypher {

ParseError::ParseError(std::size_t position, const std::string& message)
    : std::runtime_error("parse error at offset " + std::to_string(position) + ": " + message),
      position_(position),
      detail_(message) {}

namespace {

enum class Tok { Ident, QuotedIdent, String, Number, Punct, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        const std::size_t start = i;
        if (ident_start(c)) {
            while (i < src.size() && ident_char(src[i])) ++i;
            toks.push_back({Tok::Ident, std::string(src.substr(start, i - start)), start});
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
            toks.push_back({Tok::Number, std::string(src.substr(start, i - start)), start});
        } else if (c == '`') {
            std::string text;
            ++i;
            while (true) {
                if (i >= src.size()) throw ParseError(start, "unterminated backtick-quoted name");
                if (src[i] == '`') {
                    if (i + 1 < src.size() && src[i + 1] == '`') {
                        text += '`';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                text += src[i++];
            }
            if (text.empty()) throw ParseError(start, "empty backtick-quoted name");
            toks.push_back({Tok::QuotedIdent, std::move(text), start});
        } else if (c == '"' || c == '\'') {
            std::string text;
            ++i;
            while (true) {
                if (i >= src.size()) throw ParseError(start, "unterminated string literal");
                char d = src[i];
                if (d == c) {
                    ++i;
                    break;
                }
                if (d == '\\') {
                    if (i + 1 >= src.size()) throw ParseError(start, "unterminated string literal");
                    char e = src[i + 1];
                    switch (e) {
                        case 'n': text += '\n'; break;
                        case 't': text += '\t'; break;
                        case 'r': text += '\r'; break;
                        case '\\': text += '\\'; break;
                        case '"': text += '"'; break;
                        case '\'': text += '\''; break;
                        default: throw ParseError(i, std::string("unsupported escape sequence \\") + e);
                    }
                    i += 2;
                    continue;
                }
                text += d;
                ++i;
            }
            toks.push_back({Tok::String, std::move(text), start});
        } else {
            static constexpr std::string_view punct = "()[]{}:,.-<>=*;|!+/%$^~";
            if (punct.find(c) == std::string_view::npos) {
                throw ParseError(start, std::string("unexpected character '") + c + "'");
            }
            toks.push_back({Tok::Punct, std::string(1, c), start});
            ++i;
        }
    }
    toks.push_back({Tok::End, "", src.size()});
    return toks;
}

constexpr std::array kUnsupportedClauses = {
    "CREATE", "DELETE", "DETACH", "MERGE", "SET",  "REMOVE", "WITH",  "UNWIND",
    "CALL",   "OPTIONAL", "ORDER", "LIMIT", "SKIP", "UNION",  "FOREACH", "LOAD",
};

constexpr std::array kAggregates = {
    "COUNT", "COLLECT", "SUM", "AVG", "MIN", "MAX", "STDEV", "STDEVP", "PERCENTILECONT", "PERCENTILEDISC",
};

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    CypherQuery parse() {
        CypherQuery q;
        bool saw_match = false;
        while (true) {
            const Token& t = peek();
            if (is_keyword(t, "MATCH")) {
                next();
                saw_match = true;
                parse_pattern_list(q);
                if (is_keyword(peek(), "WHERE")) {
                    next();
                    parse_where(q);
                }
                continue;
            }
            if (is_keyword(t, "RETURN")) {
                if (!saw_match) throw ParseError(t.pos, "RETURN without a preceding MATCH clause");
                next();
                parse_return(q);
                break;
            }
            reject_clause(t);
            if (t.kind == Tok::End) {
                throw ParseError(t.pos, saw_match ? "missing RETURN clause" : "expected MATCH clause");
            }
            throw ParseError(t.pos, "unexpected '" + t.text + "', expected MATCH or RETURN");
        }
        if (peek().kind == Tok::Punct && peek().text == ";") next();
        const Token& t = peek();
        if (t.kind != Tok::End) {
            reject_clause(t);
            throw ParseError(t.pos, "unexpected '" + t.text + "' after RETURN clause");
        }
        return q;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    static bool is_keyword(const Token& t, std::string_view kw) {
        return t.kind == Tok::Ident && upper(t.text) == kw;
    }
    static bool is_punct(const Token& t, char c) {
        return t.kind == Tok::Punct && t.text.size() == 1 && t.text[0] == c;
    }

    void expect(char c, std::string_view context) {
        const Token& t = peek();
        if (!is_punct(t, c)) {
            throw ParseError(t.pos, std::string("expected '") + c + "' " + std::string(context) +
                                        (t.kind == Tok::End ? ", found end of input" : ", found '" + t.text + "'"));
        }
        next();
    }

    void reject_clause(const Token& t) const {
        if (t.kind != Tok::Ident) return;
        const auto kw = upper(t.text);
        for (const char* c : kUnsupportedClauses) {
            if (kw == c) throw ParseError(t.pos, "unsupported clause " + kw);
        }
    }

    bool at_name() const { return peek().kind == Tok::Ident || peek().kind == Tok::QuotedIdent; }

    std::string parse_name(std::string_view what) {
        const Token& t = peek();
        if (t.kind != Tok::Ident && t.kind != Tok::QuotedIdent) {
            throw ParseError(t.pos, "expected " + std::string(what) +
                                        (t.kind == Tok::End ? ", found end of input" : ", found '" + t.text + "'"));
        }
        next();
        return t.text;
    }

    void parse_pattern_list(CypherQuery& q) {
        q.patterns.push_back(parse_path());
        while (is_punct(peek(), ',')) {
            next();
            q.patterns.push_back(parse_path());
        }
    }

    PathPattern parse_path() {
        if (at_name() && is_punct(peek(1), '=')) {
            throw ParseError(peek().pos, "named path assignments are not supported");
        }
        PathPattern p;
        p.nodes.push_back(parse_node());
        while (is_punct(peek(), '-') || is_punct(peek(), '<')) {
            p.rels.push_back(parse_rel());
            p.nodes.push_back(parse_node());
        }
        return p;
    }

    NodePattern parse_node() {
        const std::size_t open = peek().pos;
        expect('(', "to open a node pattern");
        NodePattern n;
        if (at_name()) n.variable = parse_name("a variable");
        if (is_punct(peek(), ':')) {
            next();
            n.label = parse_name("a node label");
            if (is_punct(peek(), ':')) throw ParseError(peek().pos, "multiple labels on one node are not supported");
        }
        if (is_punct(peek(), '{')) {
            next();
            const std::size_t key_pos = peek().pos;
            const auto key = parse_name("a property key");
            if (key != "name") throw ParseError(key_pos, "only the 'name' property may be matched, found '" + key + "'");
            expect(':', "after property key");
            const Token& v = peek();
            if (v.kind != Tok::String) throw ParseError(v.pos, "expected a string value for 'name'");
            next();
            n.name_filter = v.text;
            if (is_punct(peek(), ',')) throw ParseError(peek().pos, "only the 'name' property may be matched");
            expect('}', "to close the property map");
        }
        expect(')', "to close the node pattern");
        if (!n.variable && !n.label && !n.name_filter) throw ParseError(open, "empty node pattern");
        return n;
    }

    RelPattern parse_rel() {
        const std::size_t start = peek().pos;
        bool left_arrow = false;
        if (is_punct(peek(), '<')) {
            next();
            left_arrow = true;
        }
        expect('-', "in relationship pattern");
        if (!is_punct(peek(), '[')) {
            throw ParseError(start, "relationship patterns must name a relationship type, e.g. -[:rel]->");
        }
        next();
        if (at_name()) parse_name("a relationship variable");
        if (is_punct(peek(), '*')) throw asterisk_error(peek().pos);
        if (!is_punct(peek(), ':')) throw ParseError(peek().pos, "relationship type required, e.g. [:rel]");
        next();
        RelPattern r;
        r.relation = parse_name("a relationship type");
        if (is_punct(peek(), '|')) throw ParseError(peek().pos, "alternative relationship types are not supported");
        if (is_punct(peek(), '*')) throw asterisk_error(peek().pos);
        if (is_punct(peek(), '{')) throw ParseError(peek().pos, "relationship properties are not supported");
        expect(']', "to close the relationship pattern");
        expect('-', "in relationship pattern");
        bool right_arrow = false;
        if (is_punct(peek(), '>')) {
            next();
            right_arrow = true;
        }
        if (left_arrow && right_arrow) throw ParseError(start, "bidirectional arrows <-[]-> are not supported");
        if (!left_arrow && !right_arrow) throw ParseError(start, "undirected relationships are not supported");
        r.direction = left_arrow ? Direction::RightToLeft : Direction::LeftToRight;
        return r;
    }

    static ParseError asterisk_error(std::size_t pos) {
        return ParseError(pos, "variable-length relationships (the asterisk operator *) are not supported");
    }

    struct NameEquality {
        std::string variable;
        std::string value;
        std::size_t pos;
    };

    NameEquality parse_equality() {
        const Token& first = peek();
        auto bad = [&](const Token& t) {
            return ParseError(t.pos, "non-equality WHERE predicate; only v.name = \"...\" conjunctions are supported");
        };
        if (first.kind == Tok::String) {
            next();
            if (!is_punct(peek(), '=')) throw bad(peek());
            next();
            auto [var, prop] = parse_property_ref();
            if (prop != "name") throw ParseError(first.pos, "only the 'name' property may be compared in WHERE");
            if (is_punct(peek(), '=') || is_punct(peek(), '<') || is_punct(peek(), '>')) throw bad(peek());
            return {var, first.text, first.pos};
        }
        if (!at_name() || is_keyword(first, "NOT")) throw bad(first);
        auto [var, prop] = parse_property_ref();
        if (!is_punct(peek(), '=')) throw bad(peek());
        next();
        if (is_punct(peek(), '~')) throw bad(peek());
        const Token& v = peek();
        if (v.kind != Tok::String) throw bad(v);
        next();
        if (prop != "name") throw ParseError(first.pos, "only the 'name' property may be compared in WHERE");
        return {var, v.text, first.pos};
    }

    std::pair<std::string, std::string> parse_property_ref() {
        const Token& t = peek();
        if (!at_name()) {
            throw ParseError(t.pos, "non-equality WHERE predicate; only v.name = \"...\" conjunctions are supported");
        }
        auto var = parse_name("a variable");
        if (is_punct(peek(), '(')) throw ParseError(t.pos, "function calls are not supported in WHERE");
        if (!is_punct(peek(), '.')) {
            throw ParseError(peek().pos, "non-equality WHERE predicate; only v.name = \"...\" conjunctions are supported");
        }
        next();
        auto prop = parse_name("a property name");
        return {var, prop};
    }

    void parse_where(CypherQuery& q) {
        std::vector<NameEquality> eqs;
        eqs.push_back(parse_equality());
        while (true) {
            const Token& t = peek();
            if (is_keyword(t, "AND")) {
                next();
                eqs.push_back(parse_equality());
                continue;
            }
            if (is_keyword(t, "OR") || is_keyword(t, "XOR") || is_keyword(t, "CONTAINS") ||
                is_keyword(t, "STARTS") || is_keyword(t, "ENDS") || is_keyword(t, "IN") ||
                is_keyword(t, "IS")) {
                throw ParseError(t.pos,
                                 "non-equality WHERE predicate; only v.name = \"...\" conjunctions are supported");
            }
            break;
        }
        for (const auto& eq : eqs) apply_name_filter(q, eq);
    }

    static void apply_name_filter(CypherQuery& q, const NameEquality& eq) {
        NodePattern* first = nullptr;
        for (auto& p : q.patterns) {
            for (auto& n : p.nodes) {
                if (n.variable != eq.variable) continue;
                if (n.name_filter) {
                    if (*n.name_filter != eq.value) {
                        throw ParseError(eq.pos, "conflicting name filters for variable '" + eq.variable + "'");
                    }
                    return;
                }
                if (!first) first = &n;
            }
        }
        if (!first) throw ParseError(eq.pos, "WHERE references unknown variable '" + eq.variable + "'");
        first->name_filter = eq.value;
    }

    void parse_return(CypherQuery& q) {
        if (is_keyword(peek(), "DISTINCT")) {
            next();
            q.distinct = true;
        }
        q.return_items.push_back(parse_return_item());
        while (is_punct(peek(), ',')) {
            next();
            q.return_items.push_back(parse_return_item());
        }
    }

    ReturnItem parse_return_item() {
        const Token& t = peek();
        if (is_punct(t, '*')) throw ParseError(t.pos, "RETURN * is not supported");
        if (t.kind == Tok::Ident && is_punct(peek(1), '(')) {
            const auto fn = upper(t.text);
            for (const char* a : kAggregates) {
                if (fn == a) throw ParseError(t.pos, "aggregate functions are not supported: " + t.text + "()");
            }
            throw ParseError(t.pos, "function calls are not supported: " + t.text + "()");
        }
        ReturnItem item;
        item.variable = parse_name("a variable in RETURN");
        if (is_punct(peek(), '.')) {
            next();
            item.property = parse_name("a property name");
        }
        if (is_keyword(peek(), "AS")) {
            next();
            parse_name("an alias");
        }
        return item;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

CypherQuery parse_query(std::string_view text) { return Parser(text).parse(); }

}  // namespace kgqa::cypher
