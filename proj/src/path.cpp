#include "procgraph/path.hpp"

#include "procgraph/errors.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>

namespace procgraph {

std::vector<NodeId> Path::node_sequence() const {
    std::vector<NodeId> seq;
    if (triples.empty()) return seq;
    seq.push_back(triples.front().subject);
    for (const Triple& t : triples) seq.push_back(t.object);
    return seq;
}

bool Path::chained() const {
    for (std::size_t i = 0; i + 1 < triples.size(); ++i)
        if (triples[i].object != triples[i + 1].subject) return false;
    for (const Triple& t : triples)
        if (t.is_attribute()) return false;
    return true;
}

bool operator<(const Path& a, const Path& b) {
    auto na = a.node_sequence();
    auto nb = b.node_sequence();
    if (na != nb) return na < nb;
    for (std::size_t i = 0; i < std::min(a.triples.size(), b.triples.size()); ++i)
        if (a.triples[i].predicate != b.triples[i].predicate)
            return a.triples[i].predicate < b.triples[i].predicate;
    return a.triples.size() < b.triples.size();
}

std::string format_path(const Path& p) {
    std::string out;
    if (p.triples.empty()) return out;
    out = p.triples.front().subject.id;
    for (const Triple& t : p.triples) {
        out += " ->(" + t.predicate.id + ")-> ";
        out += t.object.id;
    }
    return out;
}

namespace {

struct RawToken {
    enum class Kind { Word, Symbol, Typed };
    Kind kind;
    std::string text;   // word text, symbol char, or type value
    std::size_t index;  // token position, for error messages
};

std::vector<RawToken> lex_regex(std::string_view text) {
    std::vector<RawToken> tokens;
    std::size_t i = 0;
    auto is_symbol = [](char c) {
        return c == '(' || c == ')' || c == '|' || c == '*' || c == '+' || c == '?';
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (is_symbol(c)) {
            tokens.push_back({RawToken::Kind::Symbol, std::string(1, c), tokens.size()});
            ++i;
            continue;
        }
        std::string word;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
               !is_symbol(text[i]) && text[i] != '\'' && text[i] != '"') {
            word.push_back(text[i]);
            ++i;
        }
        // @type='...' carries a quoted value glued to the '='
        if (i < text.size() && (text[i] == '\'' || text[i] == '"')) {
            char quote = text[i];
            ++i;
            std::string value;
            while (i < text.size() && text[i] != quote) value.push_back(text[i++]);
            if (i == text.size())
                throw RegexSyntaxError(tokens.size(), "unterminated quote");
            ++i;
            if (word.empty()) {
                tokens.push_back({RawToken::Kind::Word, value, tokens.size()});
                continue;
            }
            word += value;
        }
        if (word.starts_with("@type=")) {
            tokens.push_back({RawToken::Kind::Typed, word.substr(6), tokens.size()});
        } else if (!word.empty()) {
            tokens.push_back({RawToken::Kind::Word, word, tokens.size()});
        } else {
            throw RegexSyntaxError(tokens.size(), "unexpected character");
        }
    }
    return tokens;
}

}  // namespace

// Thompson construction with a post-pass that resolves each bare word to a
// node or edge token from the alternating position parity.
class RegexBuilder {
public:
    explicit RegexBuilder(std::string_view text) : tokens_(lex_regex(text)) {
        regex_.source_ = std::string(text);
    }

    PathRegex build() {
        if (tokens_.empty()) throw RegexSyntaxError(0, "empty path regex");
        auto [start, accept] = parse_alt();
        if (pos_ != tokens_.size())
            throw RegexSyntaxError(pos_, "unexpected '" + tokens_[pos_].text + "'");
        regex_.state_count_ = next_state_;
        regex_.start_state_ = start;
        regex_.accept_state_ = accept;
        regex_.epsilon_.resize(next_state_);
        regex_.consuming_.resize(next_state_);
        for (auto& [from, to] : epsilon_edges_) regex_.epsilon_[from].push_back(to);
        resolve_classes();
        for (auto& t : transitions_) regex_.consuming_[t.from].push_back(t);
        set_hints();
        return std::move(regex_);
    }

private:
    using Fragment = std::pair<std::uint32_t, std::uint32_t>;  // start, accept

    std::uint32_t new_state() { return next_state_++; }
    void eps(std::uint32_t from, std::uint32_t to) { epsilon_edges_.emplace_back(from, to); }

    bool at_symbol(const char* s) const {
        return pos_ < tokens_.size() && tokens_[pos_].kind == RawToken::Kind::Symbol &&
               tokens_[pos_].text == s;
    }

    Fragment parse_alt() {
        Fragment left = parse_seq();
        while (at_symbol("|")) {
            ++pos_;
            Fragment right = parse_seq();
            auto s = new_state();
            auto a = new_state();
            eps(s, left.first);
            eps(s, right.first);
            eps(left.second, a);
            eps(right.second, a);
            left = {s, a};
        }
        return left;
    }

    Fragment parse_seq() {
        std::optional<Fragment> acc;
        while (pos_ < tokens_.size() && !at_symbol("|") && !at_symbol(")")) {
            Fragment f = parse_factor();
            if (acc) {
                eps(acc->second, f.first);
                acc->second = f.second;
            } else {
                acc = f;
            }
        }
        if (!acc) throw RegexSyntaxError(pos_, "expected a token");
        return *acc;
    }

    Fragment parse_factor() {
        Fragment f = parse_atom();
        while (pos_ < tokens_.size() && tokens_[pos_].kind == RawToken::Kind::Symbol &&
               (tokens_[pos_].text == "*" || tokens_[pos_].text == "+" ||
                tokens_[pos_].text == "?")) {
            char q = tokens_[pos_].text[0];
            ++pos_;
            auto s = new_state();
            auto a = new_state();
            eps(s, f.first);
            if (q != '+') eps(s, a);
            eps(f.second, a);
            if (q != '?') eps(f.second, f.first);
            f = {s, a};
        }
        return f;
    }

    Fragment parse_atom() {
        if (pos_ >= tokens_.size()) throw RegexSyntaxError(pos_, "unexpected end of regex");
        const RawToken& tok = tokens_[pos_];
        if (tok.kind == RawToken::Kind::Symbol) {
            if (tok.text == "(") {
                ++pos_;
                Fragment f = parse_alt();
                if (!at_symbol(")")) throw RegexSyntaxError(pos_, "unclosed group");
                ++pos_;
                return f;
            }
            throw RegexSyntaxError(pos_, "unexpected '" + tok.text + "'");
        }
        ++pos_;
        auto s = new_state();
        auto a = new_state();
        PathRegex::Transition t;
        t.from = s;
        t.to = a;
        if (tok.kind == RawToken::Kind::Typed) {
            t.token = {PathRegex::TokenClass::Node, PathRegex::TokenMatch::Typed, tok.text};
            resolved_.push_back(true);
        } else if (tok.text == "node") {
            t.token = {PathRegex::TokenClass::Node, PathRegex::TokenMatch::Any, ""};
            resolved_.push_back(true);
        } else if (tok.text == "edge") {
            t.token = {PathRegex::TokenClass::Edge, PathRegex::TokenMatch::Any, ""};
            resolved_.push_back(true);
        } else {
            t.token = {PathRegex::TokenClass::Node, PathRegex::TokenMatch::Literal, tok.text};
            resolved_.push_back(false);  // class fixed by position parity below
        }
        token_index_.push_back(tok.index);
        transitions_.push_back(t);
        return {s, a};
    }

    // Expectation bits: 1 = a node may be consumed next, 2 = an edge may.
    // Node tokens also fire as zero-width re-checks of the node just
    // consumed (covers `X (edge node)* Y` endpoint constraints), so a node
    // token is legal under either expectation and always leaves bit 2.
    // Bare words become node tokens when a node can be consumed or when they
    // are the regex's final token; otherwise they are edges.
    void resolve_classes() {
        std::vector<std::uint8_t> expect(next_state_, 0);
        std::vector<std::vector<std::uint32_t>> eps_out(next_state_);
        for (auto& [from, to] : epsilon_edges_) eps_out[from].push_back(to);
        std::vector<std::vector<std::size_t>> trans_from(next_state_);
        for (std::size_t i = 0; i < transitions_.size(); ++i)
            trans_from[transitions_[i].from].push_back(i);
        std::size_t last_consuming = 0;
        for (auto idx : token_index_) last_consuming = std::max(last_consuming, idx);

        std::deque<std::uint32_t> work;
        auto add = [&](std::uint32_t state, std::uint8_t bits) {
            if ((expect[state] & bits) == bits) return;
            expect[state] |= bits;
            work.push_back(state);
        };
        add(regex_.start_state_, 1);
        while (!work.empty()) {
            auto s = work.front();
            work.pop_front();
            for (auto t : eps_out[s]) add(t, expect[s]);
            for (auto ti : trans_from[s]) {
                auto& tr = transitions_[ti];
                if (!resolved_[ti] && expect[s] != 0) {
                    bool node_class = (expect[s] & 1) || token_index_[ti] == last_consuming;
                    tr.token.cls = node_class ? PathRegex::TokenClass::Node
                                              : PathRegex::TokenClass::Edge;
                    resolved_[ti] = true;
                }
                if (!resolved_[ti]) continue;
                if (tr.token.cls == PathRegex::TokenClass::Node) {
                    if (expect[s] != 0) add(tr.to, 2);
                } else {
                    if (expect[s] & 2) add(tr.to, 1);
                }
            }
        }

        for (std::size_t i = 0; i < transitions_.size(); ++i) {
            const auto& tr = transitions_[i];
            std::string shown = tr.token.match == PathRegex::TokenMatch::Any
                                    ? (tr.token.cls == PathRegex::TokenClass::Node ? "node"
                                                                                   : "edge")
                                    : tr.token.text;
            if (!resolved_[i] || expect[tr.from] == 0)
                throw RegexSyntaxError(token_index_[i],
                                       "token '" + shown + "' can never match here");
            if (tr.token.cls == PathRegex::TokenClass::Edge && (expect[tr.from] & 2) == 0)
                throw RegexSyntaxError(token_index_[i],
                                       "edge token '" + shown +
                                           "' breaks the node/edge alternation");
        }
        if ((expect[regex_.accept_state_] & 2) == 0)
            throw RegexSyntaxError(tokens_.size(), "path regex must end on a node token");
    }

    void set_hints() {
        for (const auto& t : transitions_)
            if (t.token.cls == PathRegex::TokenClass::Node) {
                regex_.start_hint_ = t.token.match == PathRegex::TokenMatch::Any
                                         ? "node"
                                         : t.token.text;
                break;
            }
        for (auto it = transitions_.rbegin(); it != transitions_.rend(); ++it)
            if (it->token.cls == PathRegex::TokenClass::Node) {
                regex_.end_hint_ =
                    it->token.match == PathRegex::TokenMatch::Any ? "node" : it->token.text;
                break;
            }
    }

    std::vector<RawToken> tokens_;
    std::size_t pos_ = 0;
    std::uint32_t next_state_ = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> epsilon_edges_;
    std::vector<PathRegex::Transition> transitions_;
    std::vector<bool> resolved_;
    std::vector<std::size_t> token_index_;
    PathRegex regex_;
};

PathRegex PathRegex::compile(std::string_view text) { return RegexBuilder(text).build(); }

PathRegex::StateSet PathRegex::closure(StateSet states) const {
    std::deque<std::uint32_t> work;
    for (std::uint32_t s = 0; s < state_count_; ++s)
        if (get_state(states, s)) work.push_back(s);
    while (!work.empty()) {
        auto s = work.front();
        work.pop_front();
        for (auto t : epsilon_[s])
            if (!get_state(states, t)) {
                set_state(states, t);
                work.push_back(t);
            }
    }
    return states;
}

PathRegex::StateSet PathRegex::initial() const {
    StateSet s((state_count_ + 63) / 64, 0);
    set_state(s, start_state_);
    return closure(std::move(s));
}

bool PathRegex::empty(const StateSet& states) {
    for (auto word : states)
        if (word) return false;
    return true;
}

bool PathRegex::token_matches_node(const Token& t, const NodeId& node, const ErGraph& g) const {
    switch (t.match) {
        case TokenMatch::Any: return node.kind != NodeKind::Literal;
        case TokenMatch::Literal: return node.id == t.text;
        case TokenMatch::Typed: {
            const EntityRecord* rec = g.find_entity(node);
            return rec && rec->entity_type == t.text;
        }
    }
    return false;
}

PathRegex::StateSet PathRegex::advance_node(const StateSet& states, const NodeId& node,
                                            const ErGraph& g) const {
    auto fire = [&](const StateSet& from) {
        StateSet next(from.size(), 0);
        for (std::uint32_t s = 0; s < state_count_; ++s) {
            if (!get_state(from, s)) continue;
            for (const Transition& t : consuming_[s])
                if (t.token.cls == TokenClass::Node && token_matches_node(t.token, node, g))
                    set_state(next, t.to);
        }
        return next;
    };

    StateSet out = fire(states);
    if (empty(out)) return out;
    out = closure(std::move(out));
    // node tokens re-check the node just consumed without advancing
    for (;;) {
        StateSet again = fire(out);
        if (empty(again)) break;
        again = closure(std::move(again));
        bool grew = false;
        for (std::size_t w = 0; w < out.size(); ++w) {
            if (again[w] & ~out[w]) grew = true;
            out[w] |= again[w];
        }
        if (!grew) break;
    }
    return out;
}

PathRegex::StateSet PathRegex::advance_edge(const StateSet& states,
                                            const std::string& predicate) const {
    StateSet next(states.size(), 0);
    for (std::uint32_t s = 0; s < state_count_; ++s) {
        if (!get_state(states, s)) continue;
        for (const Transition& t : consuming_[s])
            if (t.token.cls == TokenClass::Edge &&
                (t.token.match == TokenMatch::Any || t.token.text == predicate))
                set_state(next, t.to);
    }
    return empty(next) ? next : closure(std::move(next));
}

bool PathRegex::accepting(const StateSet& states) const {
    return get_state(states, accept_state_);
}

bool PathRegex::accepts_single_node(const NodeId& node, const ErGraph& g) const {
    return accepting(advance_node(initial(), node, g));
}

namespace {

struct PathSearch {
    const ErGraph& g;
    const PathRegex& regex;
    FindPathsOptions opts;
    std::vector<Path> out;
    std::vector<Triple> stack;
    std::vector<NodeId> on_path;  // simple-path bookkeeping for cyclic graphs
    bool bounded;

    void dfs(const NodeId& node, const PathRegex::StateSet& states) {
        if (!stack.empty() && regex.accepting(states)) {
            Path p;
            p.triples = stack;
            out.push_back(std::move(p));
        }
        if (bounded && stack.size() >= *opts.max_hops) return;
        for (auto ti : g.out_edges(node)) {
            const Triple& t = g.triples()[ti];
            if (bounded &&
                std::find(on_path.begin(), on_path.end(), t.object) != on_path.end())
                continue;
            auto after_edge = regex.advance_edge(states, t.predicate.id);
            if (PathRegex::empty(after_edge)) continue;
            auto after_node = regex.advance_node(after_edge, t.object, g);
            if (PathRegex::empty(after_node)) continue;
            stack.push_back(t);
            on_path.push_back(t.object);
            dfs(t.object, after_node);
            on_path.pop_back();
            stack.pop_back();
        }
    }
};

}  // namespace

std::vector<Path> find_paths(const ErGraph& g, const PathRegex& regex, FindPathsOptions opts) {
    if (g.cycles_allowed() && !opts.max_hops)
        throw UnboundedSearch("graph admits cycles; supply max_hops");
    PathSearch search{g, regex, opts, {}, {}, {}, opts.max_hops.has_value()};
    auto initial = regex.initial();
    for (const auto& [node, idx] : g.nodes()) {
        auto states = regex.advance_node(initial, node, g);
        if (PathRegex::empty(states)) continue;
        search.on_path.assign(1, node);
        search.dfs(node, states);
    }
    // lexicographic by node-id sequence (predicate sequences break ties);
    // limits slice that order, so the full set is enumerated first
    std::sort(search.out.begin(), search.out.end());
    search.out.erase(std::unique(search.out.begin(), search.out.end()), search.out.end());
    if (opts.limit && search.out.size() > *opts.limit) search.out.resize(*opts.limit);
    return std::move(search.out);
}

bool is_reachable(const ErGraph& g, const NodeId& from, const NodeId& to,
                  const PathRegex* regex) {
    if (!g.has_node(from)) throw UnknownNode(from.id);
    if (!g.has_node(to)) throw UnknownNode(to.id);
    if (!regex) {
        if (from == to) return true;  // empty path
        std::set<NodeId> visited{from};
        std::deque<NodeId> work{from};
        while (!work.empty()) {
            NodeId cur = work.front();
            work.pop_front();
            for (auto ti : g.out_edges(cur)) {
                const NodeId& next = g.triples()[ti].object;
                if (next == to) return true;
                if (visited.insert(next).second) work.push_back(next);
            }
        }
        return false;
    }
    PathMatcher matcher(g, *regex);
    return matcher.is_reachable(from, to);
}

PathMatcher::PathMatcher(const ErGraph& g, PathRegex regex)
    : graph_(g), regex_(std::move(regex)) {}

std::vector<Path> PathMatcher::find_paths(FindPathsOptions opts) const {
    return procgraph::find_paths(graph_, regex_, opts);
}

const std::vector<NodeId>& PathMatcher::accepting_ends_from(const NodeId& start) const {
    auto it = reach_memo_.find(start);
    if (it != reach_memo_.end()) return it->second;

    std::set<NodeId> ends;
    auto states = regex_.advance_node(regex_.initial(), start, graph_);
    if (!PathRegex::empty(states)) {
        if (regex_.accepting(states)) ends.insert(start);
        // product-graph BFS over (node, state set)
        std::set<std::pair<NodeId, PathRegex::StateSet>> visited;
        std::deque<std::pair<NodeId, PathRegex::StateSet>> work;
        work.emplace_back(start, states);
        visited.emplace(start, std::move(states));
        while (!work.empty()) {
            auto [node, st] = work.front();
            work.pop_front();
            for (auto ti : graph_.out_edges(node)) {
                const Triple& t = graph_.triples()[ti];
                auto after_edge = regex_.advance_edge(st, t.predicate.id);
                if (PathRegex::empty(after_edge)) continue;
                auto after_node = regex_.advance_node(after_edge, t.object, graph_);
                if (PathRegex::empty(after_node)) continue;
                if (regex_.accepting(after_node)) ends.insert(t.object);
                auto key = std::make_pair(t.object, after_node);
                if (visited.insert(key).second) work.emplace_back(t.object, after_node);
            }
        }
    }
    auto [slot, inserted] =
        reach_memo_.emplace(start, std::vector<NodeId>(ends.begin(), ends.end()));
    return slot->second;
}

bool PathMatcher::is_reachable(const NodeId& from, const NodeId& to) const {
    if (!graph_.has_node(from)) throw UnknownNode(from.id);
    if (!graph_.has_node(to)) throw UnknownNode(to.id);
    const auto& ends = accepting_ends_from(from);
    return std::binary_search(ends.begin(), ends.end(), to);
}

std::vector<Path> PathNode::current_paths() const {
    std::vector<Path> paths;
    for (const Entry& e : entries)
        if (e.last_seen == snapshot_id) paths.push_back(e.path);
    return paths;
}

const PathNode& PathNodeCatalog::materialize(const PathNodeSpec& spec, const ErGraph& g,
                                             std::uint64_t snapshot_id) {
    auto it = nodes_.find(spec.name);
    if (it != nodes_.end() && !it->second.spec.timed) throw DuplicateName(spec.name);

    FindPathsOptions opts;
    if (g.cycles_allowed()) opts.max_hops = 16;
    auto paths = find_paths(g, PathRegex::compile(spec.regex_source), opts);

    if (it == nodes_.end()) {
        PathNode node;
        node.spec = spec;
        node.snapshot_id = snapshot_id;
        for (auto& p : paths) node.entries.push_back({std::move(p), snapshot_id, snapshot_id});
        return nodes_.emplace(spec.name, std::move(node)).first->second;
    }

    PathNode& node = it->second;
    node.snapshot_id = snapshot_id;
    for (auto& p : paths) {
        auto entry = std::find_if(node.entries.begin(), node.entries.end(),
                                  [&](const PathNode::Entry& e) { return e.path == p; });
        if (entry != node.entries.end())
            entry->last_seen = snapshot_id;
        else
            node.entries.push_back({std::move(p), snapshot_id, snapshot_id});
    }
    return node;
}

void PathNodeCatalog::store(PathNode node) {
    nodes_.insert_or_assign(node.spec.name, std::move(node));
}

const PathNode* PathNodeCatalog::find(const std::string& name) const {
    auto it = nodes_.find(name);
    return it == nodes_.end() ? nullptr : &it->second;
}

std::vector<std::string> PathNodeCatalog::names() const {
    std::vector<std::string> out;
    for (const auto& [name, node] : nodes_) out.push_back(name);
    return out;
}

}  // namespace procgraph
