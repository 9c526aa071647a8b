#pragma once

#include "procgraph/types.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace procgraph {

// A term in a triple pattern or filter expression.
struct Term {
    enum class Kind { Variable, Iri, Literal, Attribute };
    Kind kind = Kind::Iri;
    std::string text;  // variable name without '?', attribute name without '\'

    static Term variable(std::string name) { return {Kind::Variable, std::move(name)}; }
    static Term iri(std::string name) { return {Kind::Iri, std::move(name)}; }
    static Term literal(std::string value) { return {Kind::Literal, std::move(value)}; }
    static Term attribute(std::string name) { return {Kind::Attribute, std::move(name)}; }

    friend bool operator==(const Term&, const Term&) = default;
};

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge };
std::string_view to_string(Comparator c);

// Boolean expression tree over comparisons; And/Or are n-ary, Not unary.
struct FilterExpr {
    enum class Kind { Compare, And, Or, Not };
    Kind kind = Kind::Compare;
    Comparator cmp = Comparator::Eq;
    Term lhs, rhs;
    std::vector<FilterExpr> children;

    static FilterExpr compare(Term lhs, Comparator cmp, Term rhs) {
        FilterExpr e;
        e.kind = Kind::Compare;
        e.cmp = cmp;
        e.lhs = std::move(lhs);
        e.rhs = std::move(rhs);
        return e;
    }
    static FilterExpr combine(Kind kind, std::vector<FilterExpr> children) {
        FilterExpr e;
        e.kind = kind;
        e.children = std::move(children);
        return e;
    }

    friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

struct EntityStmt {
    std::string entity_type;
    std::optional<FilterExpr> filter;  // terms: Attribute vs Literal

    friend bool operator==(const EntityStmt&, const EntityStmt&) = default;
};

struct CorrelationStmt {
    enum class CondKind { AttrEquality, Registered };
    CondKind cond = CondKind::AttrEquality;
    std::string attr_x, attr_y;    // AttrEquality
    std::string registered_name;   // Registered
    bool timed = false;
    std::optional<std::string> into;

    friend bool operator==(const CorrelationStmt&, const CorrelationStmt&) = default;
};

struct RelationshipStmt {
    std::string regex_source;
    bool timed = false;
    std::optional<std::string> into;

    friend bool operator==(const RelationshipStmt&, const RelationshipStmt&) = default;
};

enum class MetadataMode { Evolution, Derivation, Timeseries };
std::string_view to_string(MetadataMode m);

struct MetadataStmt {
    MetadataMode mode = MetadataMode::Evolution;
    std::string target;
    // Ordered (key, value) pairs; keys validated against the 5W+what/how set
    // at translation time. `when` values may be `A..B` instant ranges.
    std::vector<std::pair<std::string, std::string>> filters;

    friend bool operator==(const MetadataStmt&, const MetadataStmt&) = default;
};

struct TriplePattern {
    Term subject, predicate, object;

    friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

struct SelectStmt {
    std::vector<std::string> projection;  // variable names without '?'
    std::vector<TriplePattern> patterns;
    std::optional<FilterExpr> filter;  // terms: Variable vs Literal

    friend bool operator==(const SelectStmt&, const SelectStmt&) = default;
};

struct Statement {
    std::variant<EntityStmt, CorrelationStmt, RelationshipStmt, MetadataStmt, SelectStmt> node;
    std::size_t offset = 0;  // source span
    std::size_t length = 0;

    friend bool operator==(const Statement& a, const Statement& b) { return a.node == b.node; }
};

// Validated metadata-engine request.
struct MetadataRequest {
    MetadataMode mode = MetadataMode::Evolution;
    NodeId target;
    std::vector<std::pair<std::string, std::string>> filters;
};

}  // namespace procgraph
