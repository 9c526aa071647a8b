#pragma once

#include "procgraph/graph.hpp"
#include "procgraph/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace procgraph {

// A path through relationship edges; the object of each triple coincides
// with the subject of its successor.
struct Path {
    std::vector<Triple> triples;

    std::vector<NodeId> node_sequence() const;
    bool chained() const;

    friend bool operator==(const Path&, const Path&) = default;
    // Lexicographic by node-id sequence, ties by predicate sequence.
    friend bool operator<(const Path& a, const Path& b);
};

// `A ->(p)-> B ->(q)-> C` rendering.
std::string format_path(const Path& p);

// Compiled path regular expression. The token alphabet alternates node and
// edge positions: literal ids, `node` / `edge` wildcards, and `@type=T` typed
// node patterns, combined with `|`, `( )`, `*`, `+`, `?`.
class PathRegex {
public:
    static PathRegex compile(std::string_view text);

    const std::string& source() const { return source_; }
    // Token text of the first / last node position (display only).
    const std::string& start_hint() const { return start_hint_; }
    const std::string& end_hint() const { return end_hint_; }

    // NFA state sets, externally opaque.
    using StateSet = std::vector<std::uint64_t>;

    StateSet initial() const;
    StateSet advance_node(const StateSet& states, const NodeId& node, const ErGraph& g) const;
    StateSet advance_edge(const StateSet& states, const std::string& predicate) const;
    bool accepting(const StateSet& states) const;
    static bool empty(const StateSet& states);

    // True when some accepted token string is the single start node (the
    // zero-edge path).
    bool accepts_single_node(const NodeId& node, const ErGraph& g) const;

private:
    enum class TokenClass : std::uint8_t { Node, Edge };
    enum class TokenMatch : std::uint8_t { Literal, Any, Typed };
    struct Token {
        TokenClass cls = TokenClass::Node;
        TokenMatch match = TokenMatch::Literal;
        std::string text;
    };
    struct Transition {
        std::uint32_t from = 0;
        std::uint32_t to = 0;
        Token token;
    };

    bool token_matches_node(const Token& t, const NodeId& node, const ErGraph& g) const;
    StateSet closure(StateSet states) const;
    void set_state(StateSet& s, std::uint32_t i) const { s[i >> 6] |= 1ull << (i & 63); }
    bool get_state(const StateSet& s, std::uint32_t i) const {
        return (s[i >> 6] >> (i & 63)) & 1;
    }

    std::string source_;
    std::string start_hint_;
    std::string end_hint_;
    std::uint32_t state_count_ = 0;
    std::uint32_t start_state_ = 0;
    std::uint32_t accept_state_ = 0;
    std::vector<std::vector<std::uint32_t>> epsilon_;
    std::vector<std::vector<Transition>> consuming_;  // by source state

    friend class RegexBuilder;
};

struct FindPathsOptions {
    std::optional<std::size_t> limit;
    // Required when the graph was built with allow_cycles; bounds the edge
    // count and switches to simple-path semantics.
    std::optional<std::size_t> max_hops;
};

// Complete match set in deterministic (lexicographic) order. Zero-edge
// matches are not representable as Paths and are omitted.
std::vector<Path> find_paths(const ErGraph& g, const PathRegex& regex,
                             FindPathsOptions opts = {});

// With no regex: plain reachability, reflexively true. With a regex: true iff
// some path from `from` to `to` (including the zero-edge path) is accepted.
bool is_reachable(const ErGraph& g, const NodeId& from, const NodeId& to,
                  const PathRegex* regex = nullptr);

// Regex search bound to one snapshot; memoizes per-start reachability so
// repeated probes (path conditions, folder refreshes) stay cheap.
class PathMatcher {
public:
    PathMatcher(const ErGraph& g, PathRegex regex);

    const PathRegex& regex() const { return regex_; }
    std::vector<Path> find_paths(FindPathsOptions opts = {}) const;
    // All nodes reachable from `start` through an accepted path (including
    // zero-edge acceptance of `start` itself), sorted.
    const std::vector<NodeId>& accepting_ends_from(const NodeId& start) const;
    bool is_reachable(const NodeId& from, const NodeId& to) const;

private:
    const ErGraph& graph_;
    PathRegex regex_;
    mutable std::map<NodeId, std::vector<NodeId>> reach_memo_;
};

struct PathNodeSpec {
    std::string name;
    std::string regex_source;
    bool timed = false;
};

// Named materialized set of paths. Timed nodes stamp each path with the
// snapshot ids where it was first and last seen.
struct PathNode {
    struct Entry {
        Path path;
        std::uint64_t first_seen = 0;
        std::uint64_t last_seen = 0;
    };
    PathNodeSpec spec;
    std::uint64_t snapshot_id = 0;
    std::vector<Entry> entries;

    // Paths present in the latest materialization.
    std::vector<Path> current_paths() const;
};

class PathNodeCatalog {
public:
    // Evaluates the spec and stores the result; DuplicateName unless the
    // existing node is timed (refresh).
    const PathNode& materialize(const PathNodeSpec& spec, const ErGraph& g,
                                std::uint64_t snapshot_id);
    // Insert-or-replace a node whose paths were computed elsewhere.
    void store(PathNode node);
    const PathNode* find(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, PathNode> nodes_;
};

}  // namespace procgraph
