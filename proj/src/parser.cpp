#include "procgraph/parser.hpp"

#include "procgraph/errors.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace procgraph {

std::string_view to_string(Comparator c) {
    switch (c) {
        case Comparator::Eq: return "=";
        case Comparator::Ne: return "!=";
        case Comparator::Lt: return "<";
        case Comparator::Le: return "<=";
        case Comparator::Gt: return ">";
        case Comparator::Ge: return ">=";
    }
    return "?";
}

std::string_view to_string(MetadataMode m) {
    switch (m) {
        case MetadataMode::Evolution: return "evolutionOf";
        case MetadataMode::Derivation: return "derivationOf";
        case MetadataMode::Timeseries: return "timeseriesOf";
    }
    return "?";
}

namespace {

enum class Tok {
    Word,      // bare identifier: letters, digits, _ - : /
    Variable,  // ?name
    AttrRef,   // \name
    AtWord,    // @name
    String,    // quoted
    Symbol,    // ( ) { } [ ] . , ; | * + ? = != < <= > >= && || !
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t offset = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' ||
           c == '/';
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { tokenize(); }
    const std::vector<Token>& tokens() const { return tokens_; }

private:
    [[noreturn]] void fail(const std::string& detail) const {
        throw SyntaxError(line_, col_, detail);
    }

    void advance() {
        if (pos_ < text_.size() && text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void push(Tok kind, std::string text, std::size_t offset, std::size_t line,
              std::size_t column) {
        tokens_.push_back({kind, std::move(text), offset, line, column});
    }

    void tokenize() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                continue;
            }
            if (c == '#') {  // comment to end of line
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            std::size_t off = pos_, ln = line_, col = col_;
            if (c == '\'' || c == '"') {
                lex_string(c, off, ln, col);
                continue;
            }
            if (c == '?' || c == '\\' || c == '@') {
                advance();
                // bare '?' with no word is the regex quantifier symbol
                if (c == '?' && (pos_ >= text_.size() || !word_char(text_[pos_]))) {
                    push(Tok::Symbol, "?", off, ln, col);
                    continue;
                }
                std::string word = lex_word_tail();
                if (word.empty()) fail(std::string("expected name after '") + c + "'");
                push(c == '?' ? Tok::Variable : c == '\\' ? Tok::AttrRef : Tok::AtWord,
                     std::move(word), off, ln, col);
                continue;
            }
            if (word_char(c)) {
                std::string word = lex_word_tail();
                push(Tok::Word, std::move(word), off, ln, col);
                continue;
            }
            // multi-char operators
            auto two = text_.substr(pos_, 2);
            if (two == "!=" || two == "<=" || two == ">=" || two == "&&" || two == "||") {
                advance();
                advance();
                push(Tok::Symbol, std::string(two), off, ln, col);
                continue;
            }
            if (std::string("(){}[].,;|*+=<>!").find(c) != std::string::npos) {
                advance();
                push(Tok::Symbol, std::string(1, c), off, ln, col);
                continue;
            }
            fail(std::string("unexpected character '") + c + "'");
        }
        push(Tok::End, "", pos_, line_, col_);
    }

    std::string lex_word_tail() {
        std::string word;
        while (pos_ < text_.size() && word_char(text_[pos_])) {
            word.push_back(text_[pos_]);
            advance();
        }
        return word;
    }

    void lex_string(char quote, std::size_t off, std::size_t ln, std::size_t col) {
        advance();
        std::string value;
        while (pos_ < text_.size() && text_[pos_] != quote) {
            char c = text_[pos_];
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size()) fail("dangling backslash in string");
                char e = text_[pos_];
                switch (e) {
                    case 'n': value.push_back('\n'); break;
                    case 't': value.push_back('\t'); break;
                    case '\\': value.push_back('\\'); break;
                    case '\'': value.push_back('\''); break;
                    case '"': value.push_back('"'); break;
                    default: fail(std::string("bad escape \\") + e);
                }
                advance();
                continue;
            }
            value.push_back(c);
            advance();
        }
        if (pos_ >= text_.size()) fail("unterminated string");
        advance();
        push(Tok::String, std::move(value), off, ln, col);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    std::vector<Token> tokens_;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text), lexer_(text) {}

    Statement parse_statement() {
        const Token& first = peek();
        if (first.kind == Tok::End) fail("empty statement");
        std::string kw = first.kind == Tok::Word ? lower(first.text) : "";

        Statement stmt;
        stmt.offset = first.offset;
        if (kw == "entity") {
            stmt.node = parse_entity();
        } else if (kw == "correlation") {
            stmt.node = parse_correlation();
        } else if (kw == "relationship") {
            stmt.node = parse_relationship();
        } else if (kw == "metadata" || kw == "evolutionof" || kw == "derivationof" ||
                   kw == "timeseriesof") {
            stmt.node = parse_metadata();
        } else if (kw == "select") {
            stmt.node = parse_select();
        } else {
            fail("expected one of: entity, correlation, relationship, metadata, select");
        }
        expect_end();
        stmt.length = peek().offset - stmt.offset;
        return stmt;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, lexer_.tokens().size() - 1);
        return lexer_.tokens()[i];
    }
    const Token& next() {
        const Token& t = peek();
        if (t.kind != Tok::End) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const std::string& detail) const {
        const Token& t = peek();
        throw SyntaxError(t.line, t.column, detail);
    }
    bool at_symbol(std::string_view s) const {
        return peek().kind == Tok::Symbol && peek().text == s;
    }
    void expect_symbol(std::string_view s) {
        if (!at_symbol(s)) fail("expected '" + std::string(s) + "'");
        ++pos_;
    }
    bool at_keyword(std::string_view kw) const {
        return peek().kind == Tok::Word && lower(peek().text) == kw;
    }
    void expect_keyword(std::string_view kw) {
        if (!at_keyword(kw)) fail("expected '" + std::string(kw) + "'");
        ++pos_;
    }
    std::string expect_word(const std::string& what) {
        if (peek().kind != Tok::Word) fail("expected " + what);
        return next().text;
    }
    void expect_end() {
        if (peek().kind != Tok::End) fail("unexpected trailing '" + peek().text + "'");
    }

    std::optional<Comparator> peek_comparator() const {
        if (peek().kind != Tok::Symbol) return std::nullopt;
        const std::string& s = peek().text;
        if (s == "=") return Comparator::Eq;
        if (s == "!=") return Comparator::Ne;
        if (s == "<") return Comparator::Lt;
        if (s == "<=") return Comparator::Le;
        if (s == ">") return Comparator::Gt;
        if (s == ">=") return Comparator::Ge;
        return std::nullopt;
    }

    // entity [type] \attr CMP 'value' (AND/OR, parentheses)
    EntityStmt parse_entity() {
        expect_keyword("entity");
        EntityStmt stmt;
        stmt.entity_type = expect_word("an entity type");
        if (peek().kind != Tok::End) stmt.filter = parse_attr_or();
        return stmt;
    }

    FilterExpr parse_attr_or() {
        FilterExpr left = parse_attr_and();
        std::vector<FilterExpr> parts;
        while (at_keyword("or")) {
            ++pos_;
            if (parts.empty()) parts.push_back(std::move(left));
            parts.push_back(parse_attr_and());
        }
        if (parts.empty()) return left;
        return FilterExpr::combine(FilterExpr::Kind::Or, std::move(parts));
    }

    FilterExpr parse_attr_and() {
        FilterExpr left = parse_attr_primary();
        std::vector<FilterExpr> parts;
        while (at_keyword("and")) {
            ++pos_;
            if (parts.empty()) parts.push_back(std::move(left));
            parts.push_back(parse_attr_primary());
        }
        if (parts.empty()) return left;
        return FilterExpr::combine(FilterExpr::Kind::And, std::move(parts));
    }

    FilterExpr parse_attr_primary() {
        if (at_symbol("(")) {
            ++pos_;
            FilterExpr e = parse_attr_or();
            expect_symbol(")");
            return e;
        }
        if (peek().kind != Tok::AttrRef) fail("expected \\attribute filter");
        std::string attr = next().text;
        auto cmp = peek_comparator();
        if (!cmp) fail("expected comparator after \\" + attr);
        ++pos_;
        if (peek().kind != Tok::String) fail("expected quoted value");
        std::string value = next().text;
        return FilterExpr::compare(Term::attribute(std::move(attr)), *cmp,
                                   Term::literal(std::move(value)));
    }

    // correlation x.A = y.B | correlation <registered-name>, then [timed] [into NAME]
    CorrelationStmt parse_correlation() {
        expect_keyword("correlation");
        CorrelationStmt stmt;
        std::string first = expect_word("a correlation condition");
        if (at_symbol(".")) {
            ++pos_;
            stmt.cond = CorrelationStmt::CondKind::AttrEquality;
            stmt.attr_x = expect_word("an attribute name");
            expect_symbol("=");
            expect_word("a variable");
            expect_symbol(".");
            stmt.attr_y = expect_word("an attribute name");
        } else {
            stmt.cond = CorrelationStmt::CondKind::Registered;
            stmt.registered_name = std::move(first);
        }
        parse_timed_into(stmt.timed, stmt.into);
        return stmt;
    }

    void parse_timed_into(bool& timed, std::optional<std::string>& into) {
        if (at_keyword("timed")) {
            ++pos_;
            timed = true;
        }
        if (at_keyword("into")) {
            ++pos_;
            into = expect_word("a name");
        }
        if (at_keyword("timed") && !timed) {
            ++pos_;
            timed = true;
        }
    }

    // relationship <regex tokens> [timed] [into NAME]
    RelationshipStmt parse_relationship() {
        expect_keyword("relationship");
        RelationshipStmt stmt;
        std::size_t regex_begin = peek().offset;
        std::size_t regex_end = regex_begin;
        while (peek().kind != Tok::End && !at_keyword("into") && !at_keyword("timed")) {
            const Token& t = next();
            regex_end = t.offset + token_source_length(t);
        }
        if (regex_end == regex_begin) fail("expected a path regular expression");
        stmt.regex_source = trim(text_.substr(regex_begin, regex_end - regex_begin));
        parse_timed_into(stmt.timed, stmt.into);
        return stmt;
    }

    static std::string trim(std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.remove_suffix(1);
        return std::string(s);
    }

    std::size_t token_source_length(const Token& t) const {
        std::size_t end = t.offset;
        // strings and prefixed words have decorations not present in t.text
        switch (t.kind) {
            case Tok::String: {
                char quote = text_[end];
                ++end;
                while (end < text_.size() && text_[end] != quote) {
                    if (text_[end] == '\\') ++end;
                    ++end;
                }
                return end + 1 - t.offset;
            }
            case Tok::Variable:
            case Tok::AttrRef:
            case Tok::AtWord: return t.text.size() + 1;
            default: return t.text.size();
        }
    }

    // [metadata] evolutionOf|derivationOf|timeseriesOf TARGET filters
    MetadataStmt parse_metadata() {
        if (at_keyword("metadata")) ++pos_;
        MetadataStmt stmt;
        std::string mode = lower(expect_word("evolutionOf, derivationOf or timeseriesOf"));
        if (mode == "evolutionof") stmt.mode = MetadataMode::Evolution;
        else if (mode == "derivationof") stmt.mode = MetadataMode::Derivation;
        else if (mode == "timeseriesof") stmt.mode = MetadataMode::Timeseries;
        else fail("expected evolutionOf, derivationOf or timeseriesOf");
        stmt.target = expect_word("an entity name");

        while (peek().kind != Tok::End) {
            if (peek().kind == Tok::AttrRef) {
                std::string key = next().text;
                expect_symbol("=");
                if (peek().kind != Tok::String) fail("expected quoted value");
                stmt.filters.emplace_back(std::move(key), next().text);
            } else if (at_keyword("filter")) {
                ++pos_;
                expect_symbol("[");
                while (!at_symbol("]")) {
                    std::string key = peek().kind == Tok::AttrRef ? next().text
                                                                  : expect_word("a filter key");
                    expect_symbol("=");
                    if (peek().kind != Tok::String) fail("expected quoted value");
                    stmt.filters.emplace_back(std::move(key), next().text);
                    if (at_symbol(",")) ++pos_;
                }
                expect_symbol("]");
            } else {
                fail("expected \\filter or filter [...]");
            }
        }
        return stmt;
    }

    // select ?a ?b where { pattern. pattern. FILTER(...). }
    SelectStmt parse_select() {
        expect_keyword("select");
        SelectStmt stmt;
        while (peek().kind == Tok::Variable) stmt.projection.push_back(next().text);
        if (stmt.projection.empty()) fail("expected at least one ?variable");
        expect_keyword("where");
        expect_symbol("{");
        std::vector<FilterExpr> filters;
        while (!at_symbol("}")) {
            if (at_keyword("filter")) {
                ++pos_;
                expect_symbol("(");
                filters.push_back(parse_value_or());
                expect_symbol(")");
            } else {
                TriplePattern p;
                p.subject = parse_pattern_term(false);
                p.predicate = parse_pattern_term(false);
                p.object = parse_pattern_term(true);
                if (p.predicate.kind == Term::Kind::Iri &&
                    p.predicate.text.starts_with('@') && p.object.kind == Term::Kind::Iri)
                    p.object.kind = Term::Kind::Literal;  // bare object of an attribute edge
                stmt.patterns.push_back(std::move(p));
            }
            if (at_symbol(".")) ++pos_;
        }
        expect_symbol("}");
        if (stmt.patterns.empty()) fail("expected at least one triple pattern");
        if (!filters.empty()) {
            stmt.filter = filters.size() == 1
                              ? std::move(filters.front())
                              : FilterExpr::combine(FilterExpr::Kind::And, std::move(filters));
        }

        std::set<std::string> bound;
        for (const auto& p : stmt.patterns)
            for (const Term* t : {&p.subject, &p.predicate, &p.object})
                if (t->kind == Term::Kind::Variable) bound.insert(t->text);
        for (const auto& v : stmt.projection)
            if (!bound.count(v)) fail("projected variable ?" + v + " not bound by any pattern");
        return stmt;
    }

    Term parse_pattern_term(bool object_position) {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Variable: ++pos_; return Term::variable(t.text);
            case Tok::AtWord: ++pos_; return Term::iri("@" + t.text);
            case Tok::Word: ++pos_; return Term::iri(t.text);
            case Tok::String:
                if (!object_position) fail("quoted literal only allowed in object position");
                ++pos_;
                return Term::literal(t.text);
            default: fail("expected a pattern term");
        }
    }

    // FILTER expressions: ! > comparison > && > ||
    FilterExpr parse_value_or() {
        FilterExpr left = parse_value_and();
        std::vector<FilterExpr> parts;
        while (at_symbol("||")) {
            ++pos_;
            if (parts.empty()) parts.push_back(std::move(left));
            parts.push_back(parse_value_and());
        }
        if (parts.empty()) return left;
        return FilterExpr::combine(FilterExpr::Kind::Or, std::move(parts));
    }

    FilterExpr parse_value_and() {
        FilterExpr left = parse_value_not();
        std::vector<FilterExpr> parts;
        while (at_symbol("&&")) {
            ++pos_;
            if (parts.empty()) parts.push_back(std::move(left));
            parts.push_back(parse_value_not());
        }
        if (parts.empty()) return left;
        return FilterExpr::combine(FilterExpr::Kind::And, std::move(parts));
    }

    FilterExpr parse_value_not() {
        if (at_symbol("!")) {
            ++pos_;
            std::vector<FilterExpr> child;
            child.push_back(parse_value_not());
            return FilterExpr::combine(FilterExpr::Kind::Not, std::move(child));
        }
        if (at_symbol("(")) {
            ++pos_;
            FilterExpr e = parse_value_or();
            expect_symbol(")");
            return e;
        }
        Term lhs = parse_value_term();
        auto cmp = peek_comparator();
        if (!cmp) fail("expected comparator");
        ++pos_;
        Term rhs = parse_value_term();
        return FilterExpr::compare(std::move(lhs), *cmp, std::move(rhs));
    }

    Term parse_value_term() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Variable: ++pos_; return Term::variable(t.text);
            case Tok::String: ++pos_; return Term::literal(t.text);
            case Tok::Word: ++pos_; return Term::literal(t.text);
            default: fail("expected a variable or value");
        }
    }

    std::string_view text_;
    Lexer lexer_;
    std::size_t pos_ = 0;
};

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

std::string print_term(const Term& t) {
    switch (t.kind) {
        case Term::Kind::Variable: return "?" + t.text;
        case Term::Kind::Iri: return t.text;
        case Term::Kind::Literal: return quote(t.text);
        case Term::Kind::Attribute: return "\\" + t.text;
    }
    return t.text;
}

std::string print_filter(const FilterExpr& e, const char* and_word, const char* or_word,
                         bool parenthesize = false) {
    std::string out;
    switch (e.kind) {
        case FilterExpr::Kind::Compare:
            out = print_term(e.lhs) + std::string(to_string(e.cmp)) + print_term(e.rhs);
            return out;
        case FilterExpr::Kind::Not:
            return "!" + print_filter(e.children.front(), and_word, or_word, true);
        case FilterExpr::Kind::And:
        case FilterExpr::Kind::Or: {
            const char* sep = e.kind == FilterExpr::Kind::And ? and_word : or_word;
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += sep;
                bool child_parens = e.children[i].kind == FilterExpr::Kind::And ||
                                    e.children[i].kind == FilterExpr::Kind::Or;
                out += print_filter(e.children[i], and_word, or_word, child_parens);
            }
            if (parenthesize) out = "(" + out + ")";
            return out;
        }
    }
    return out;
}

}  // namespace

Statement parse(std::string_view text) { return Parser(text).parse_statement(); }

std::string print_statement(const Statement& stmt) {
    std::ostringstream out;
    if (const auto* e = std::get_if<EntityStmt>(&stmt.node)) {
        out << "entity " << e->entity_type;
        if (e->filter) out << ' ' << print_filter(*e->filter, " AND ", " OR ");
    } else if (const auto* c = std::get_if<CorrelationStmt>(&stmt.node)) {
        out << "correlation ";
        if (c->cond == CorrelationStmt::CondKind::AttrEquality)
            out << "x." << c->attr_x << " = y." << c->attr_y;
        else
            out << c->registered_name;
        if (c->timed) out << " timed";
        if (c->into) out << " into " << *c->into;
    } else if (const auto* r = std::get_if<RelationshipStmt>(&stmt.node)) {
        out << "relationship " << r->regex_source;
        if (r->timed) out << " timed";
        if (r->into) out << " into " << *r->into;
    } else if (const auto* m = std::get_if<MetadataStmt>(&stmt.node)) {
        out << "metadata " << to_string(m->mode) << ' ' << m->target;
        for (const auto& [k, v] : m->filters) out << " \\" << k << '=' << quote(v);
    } else if (const auto* s = std::get_if<SelectStmt>(&stmt.node)) {
        out << "select";
        for (const auto& v : s->projection) out << " ?" << v;
        out << " where {";
        for (const auto& p : s->patterns)
            out << ' ' << print_term(p.subject) << ' ' << print_term(p.predicate) << ' '
                << print_term(p.object) << " .";
        if (s->filter) out << " FILTER(" << print_filter(*s->filter, " && ", " || ") << ") .";
        out << " }";
    }
    return out.str();
}

namespace {

void collect_attributes(const FilterExpr& e, std::vector<std::string>& order) {
    if (e.kind == FilterExpr::Kind::Compare) {
        for (const Term* t : {&e.lhs, &e.rhs})
            if (t->kind == Term::Kind::Attribute &&
                std::find(order.begin(), order.end(), t->text) == order.end())
                order.push_back(t->text);
        return;
    }
    for (const auto& child : e.children) collect_attributes(child, order);
}

FilterExpr substitute_attributes(const FilterExpr& e,
                                 const std::map<std::string, std::string>& vars) {
    if (e.kind == FilterExpr::Kind::Compare) {
        auto sub = [&](const Term& t) {
            if (t.kind == Term::Kind::Attribute) return Term::variable(vars.at(t.text));
            return t;
        };
        return FilterExpr::compare(sub(e.lhs), e.cmp, sub(e.rhs));
    }
    FilterExpr out;
    out.kind = e.kind;
    for (const auto& child : e.children) out.children.push_back(substitute_attributes(child, vars));
    return out;
}

}  // namespace

SelectStmt translate_entity(const EntityStmt& stmt) {
    SelectStmt select;
    select.projection = {"e"};
    select.patterns.push_back(
        {Term::variable("e"), Term::iri("@type"), Term::literal(stmt.entity_type)});
    if (!stmt.filter) return select;

    std::vector<std::string> attrs;
    collect_attributes(*stmt.filter, attrs);
    std::map<std::string, std::string> vars;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        vars[attrs[i]] = "v" + std::to_string(i + 1);
        select.patterns.push_back({Term::variable("e"), Term::iri("@" + attrs[i]),
                                   Term::variable(vars[attrs[i]])});
    }
    select.filter = substitute_attributes(*stmt.filter, vars);
    return select;
}

MetadataRequest translate_metadata(const MetadataStmt& stmt) {
    static const std::set<std::string> allowed{"what", "how",   "when", "who",
                                               "where", "which", "why"};
    MetadataRequest req;
    req.mode = stmt.mode;
    req.target = NodeId::uri(stmt.target);
    for (const auto& [key, value] : stmt.filters) {
        if (!allowed.count(key)) throw UnknownFilterKey(key);
        req.filters.emplace_back(key, value);
    }
    return req;
}

std::vector<std::string> split_statements(std::string_view script) {
    std::vector<std::string> statements;
    std::string current;
    int brace_depth = 0;
    char quote = 0;
    bool line_has_content = false;

    auto flush = [&] {
        std::size_t begin = current.find_first_not_of(" \t\r\n");
        if (begin == std::string::npos) {
            current.clear();
            return;
        }
        std::size_t end = current.find_last_not_of(" \t\r\n");
        statements.push_back(current.substr(begin, end - begin + 1));
        current.clear();
    };

    for (std::size_t i = 0; i < script.size(); ++i) {
        char c = script[i];
        if (quote) {
            current.push_back(c);
            if (c == '\\' && i + 1 < script.size()) {
                current.push_back(script[++i]);
            } else if (c == quote) {
                quote = 0;
            }
            continue;
        }
        switch (c) {
            case '\'':
            case '"':
                quote = c;
                current.push_back(c);
                line_has_content = true;
                break;
            case '{': ++brace_depth; current.push_back(c); line_has_content = true; break;
            case '}': --brace_depth; current.push_back(c); line_has_content = true; break;
            case ';':
                if (brace_depth == 0) flush();
                else current.push_back(c);
                line_has_content = true;
                break;
            case '\n':
                if (!line_has_content && brace_depth == 0) flush();
                else current.push_back(c);
                line_has_content = false;
                break;
            case '#':  // comment to end of line
                while (i + 1 < script.size() && script[i + 1] != '\n') ++i;
                break;
            default:
                if (!std::isspace(static_cast<unsigned char>(c))) line_has_content = true;
                current.push_back(c);
        }
    }
    flush();
    return statements;
}

}  // namespace procgraph
