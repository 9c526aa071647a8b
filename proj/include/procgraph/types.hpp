#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace procgraph {

enum class NodeKind : std::uint8_t { Uri, Blank, Literal };

std::string_view to_string(NodeKind kind);

// A graph node reference. Equality and ordering are (kind, id) so set
// operations across graphs line up.
struct NodeId {
    std::string id;
    NodeKind kind = NodeKind::Uri;

    static NodeId uri(std::string id) { return {std::move(id), NodeKind::Uri}; }
    static NodeId blank(std::string id) { return {std::move(id), NodeKind::Blank}; }
    static NodeId literal(std::string id) { return {std::move(id), NodeKind::Literal}; }

    bool empty() const { return id.empty(); }

    friend bool operator==(const NodeId&, const NodeId&) = default;
    friend std::strong_ordering operator<=>(const NodeId& a, const NodeId& b) {
        if (auto c = a.id <=> b.id; c != 0) return c;
        return a.kind <=> b.kind;
    }
};

// One (subject, predicate, object) edge. Predicates starting with '@' carry
// entity attributes and their objects are literals.
struct Triple {
    NodeId subject;
    NodeId predicate;
    NodeId object;

    bool is_attribute() const { return !predicate.id.empty() && predicate.id[0] == '@'; }
    // Attribute name without the leading '@'.
    std::string attribute_name() const { return predicate.id.substr(1); }

    friend bool operator==(const Triple&, const Triple&) = default;
    friend std::strong_ordering operator<=>(const Triple& a, const Triple& b) {
        if (auto c = a.subject <=> b.subject; c != 0) return c;
        if (auto c = a.predicate <=> b.predicate; c != 0) return c;
        return a.object <=> b.object;
    }
};

Triple make_triple(std::string subject, std::string predicate, std::string object);

enum class ScalarKind : std::uint8_t { String, Integer, Decimal, Instant };

// Inferred scalar kind of a literal's lexical form.
ScalarKind infer_scalar_kind(std::string_view lexical);

// Three-way comparison of literal lexical forms: numeric when both sides
// parse numerically, else lexicographic.
int literal_compare(std::string_view a, std::string_view b);

std::optional<double> parse_number(std::string_view text);

// Instants are milliseconds since the Unix epoch, UTC.
using InstantMs = std::int64_t;

// Accepts ISO-8601 `YYYY-MM-DD[Thh:mm:ss[.fff]][Z|±hh:mm]` ('T' or space).
// UTC is assumed when no zone is given; date-only means midnight.
std::optional<InstantMs> parse_instant(std::string_view text);

// Canonical lexical form: `YYYY-MM-DDThh:mm:ss.fffZ` (sorts chronologically).
std::string format_instant(InstantMs ms);

}  // namespace procgraph
