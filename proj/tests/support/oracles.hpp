#pragma once

// Independent reference implementations the engine is compared against.
// Nothing here may call into the implementation paths under test.

#include "procgraph/ast.hpp"
#include "procgraph/graph.hpp"
#include "procgraph/types.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace procgraph::testing {

// ---------------------------------------------------------------------------
// reference path-regex matcher: backtracking over a tiny syntax tree with
// position-parity token classes (even = node, odd = edge)

struct RefRegex {
    enum class Kind { Token, Seq, Alt, Star, Plus, Opt };
    Kind kind = Kind::Token;
    std::string text;          // Token: literal word, "node", "edge", or "@type=T"
    std::vector<RefRegex> kids;
};

inline RefRegex ref_parse(const std::string& source) {
    std::vector<std::string> tokens;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            tokens.push_back(word);
            word.clear();
        }
    };
    for (std::size_t i = 0; i < source.size(); ++i) {
        char c = source[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else if (c == '(' || c == ')' || c == '|' || c == '*' || c == '+' || c == '?') {
            flush();
            tokens.push_back(std::string(1, c));
        } else if (c == '\'' || c == '"') {
            char q = c;
            ++i;
            while (i < source.size() && source[i] != q) word.push_back(source[i++]);
        } else {
            word.push_back(c);
        }
    }
    flush();

    std::size_t pos = 0;
    std::function<RefRegex()> alt, seq, factor;
    factor = [&]() -> RefRegex {
        RefRegex node;
        if (tokens[pos] == "(") {
            ++pos;
            node = alt();
            ++pos;  // ')'
        } else {
            node.kind = RefRegex::Kind::Token;
            node.text = tokens[pos++];
        }
        while (pos < tokens.size() &&
               (tokens[pos] == "*" || tokens[pos] == "+" || tokens[pos] == "?")) {
            RefRegex wrap;
            wrap.kind = tokens[pos] == "*" ? RefRegex::Kind::Star
                        : tokens[pos] == "+" ? RefRegex::Kind::Plus
                                             : RefRegex::Kind::Opt;
            wrap.kids.push_back(std::move(node));
            node = std::move(wrap);
            ++pos;
        }
        return node;
    };
    seq = [&]() -> RefRegex {
        RefRegex node;
        node.kind = RefRegex::Kind::Seq;
        while (pos < tokens.size() && tokens[pos] != "|" && tokens[pos] != ")")
            node.kids.push_back(factor());
        return node;
    };
    alt = [&]() -> RefRegex {
        RefRegex node;
        node.kind = RefRegex::Kind::Alt;
        node.kids.push_back(seq());
        while (pos < tokens.size() && tokens[pos] == "|") {
            ++pos;
            node.kids.push_back(seq());
        }
        return node.kids.size() == 1 ? node.kids.front() : node;
    };
    return alt();
}

struct RefLabel {
    std::string text;  // node id or predicate
    std::string type;  // @type of node labels, empty for edges
};

// All suffix positions reachable by matching `re` at `pos` of the label
// string; token classes decided by parity.
inline std::set<std::size_t> ref_match(const RefRegex& re, const std::vector<RefLabel>& s,
                                       std::size_t pos) {
    switch (re.kind) {
        case RefRegex::Kind::Token: {
            if (pos >= s.size()) return {};
            bool node_pos = pos % 2 == 0;
            const RefLabel& label = s[pos];
            bool ok = false;
            if (re.text == "node") ok = node_pos;
            else if (re.text == "edge") ok = !node_pos;
            else if (re.text.rfind("@type=", 0) == 0) ok = node_pos && label.type == re.text.substr(6);
            else ok = label.text == re.text;
            if (ok) return {pos + 1};
            return {};
        }
        case RefRegex::Kind::Seq: {
            std::set<std::size_t> cur{pos};
            for (const RefRegex& kid : re.kids) {
                std::set<std::size_t> next;
                for (auto p : cur) {
                    auto r = ref_match(kid, s, p);
                    next.insert(r.begin(), r.end());
                }
                cur = std::move(next);
                if (cur.empty()) break;
            }
            return cur;
        }
        case RefRegex::Kind::Alt: {
            std::set<std::size_t> out;
            for (const RefRegex& kid : re.kids) {
                auto r = ref_match(kid, s, pos);
                out.insert(r.begin(), r.end());
            }
            return out;
        }
        case RefRegex::Kind::Opt: {
            auto out = ref_match(re.kids.front(), s, pos);
            out.insert(pos);
            return out;
        }
        case RefRegex::Kind::Star:
        case RefRegex::Kind::Plus: {
            std::set<std::size_t> out, frontier;
            if (re.kind == RefRegex::Kind::Star) {
                out.insert(pos);
                frontier.insert(pos);
            } else {
                frontier = ref_match(re.kids.front(), s, pos);
                out = frontier;
            }
            while (!frontier.empty()) {
                std::set<std::size_t> next;
                for (auto p : frontier)
                    for (auto q : ref_match(re.kids.front(), s, p))
                        if (out.insert(q).second) next.insert(q);
                frontier = std::move(next);
            }
            return out;
        }
    }
    return {};
}

inline bool ref_accepts(const RefRegex& re, const std::vector<RefLabel>& s) {
    return ref_match(re, s, 0).count(s.size()) != 0;
}

// Exhaustive DFS path enumeration filtered through the reference matcher.
// Paths are "start ->(pred)-> node ..." strings matching format_path output.
// Returns false when the enumeration exceeds `step_budget` (caller skips the
// graph).
inline bool ref_enumerate_paths(const ErGraph& g, const RefRegex& re,
                                std::set<std::string>& out, std::size_t step_budget) {
    std::size_t steps = 0;
    auto type_of = [&](const NodeId& id) {
        const EntityRecord* rec = g.find_entity(id);
        return rec ? rec->entity_type : std::string();
    };

    std::vector<RefLabel> labels;
    std::string rendered;
    std::function<bool(const NodeId&)> dfs = [&](const NodeId& cur) -> bool {
        if (++steps > step_budget) return false;
        if (labels.size() >= 3 && ref_accepts(re, labels)) out.insert(rendered);
        for (auto ti : g.out_edges(cur)) {
            const Triple& t = g.triples()[ti];
            labels.push_back({t.predicate.id, ""});
            labels.push_back({t.object.id, type_of(t.object)});
            auto saved = rendered.size();
            rendered += " ->(" + t.predicate.id + ")-> " + t.object.id;
            if (!dfs(t.object)) return false;
            rendered.resize(saved);
            labels.pop_back();
            labels.pop_back();
        }
        return true;
    };

    for (const auto& [node, idx] : g.nodes()) {
        labels.assign(1, {node.id, type_of(node)});
        rendered = node.id;
        if (!dfs(node)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// naive backtracking pattern matcher (select-statement oracle)

inline int ref_compare(const std::string& a, const std::string& b) {
    char* end_a = nullptr;
    char* end_b = nullptr;
    std::string ca = a, cb = b;
    double na = std::strtod(ca.c_str(), &end_a);
    double nb = std::strtod(cb.c_str(), &end_b);
    bool a_num = end_a == ca.c_str() + ca.size() && !ca.empty();
    bool b_num = end_b == cb.c_str() + cb.size() && !cb.empty();
    if (a_num && b_num) return na < nb ? -1 : na > nb ? 1 : 0;
    int c = a.compare(b);
    return c < 0 ? -1 : c > 0 ? 1 : 0;
}

inline bool ref_eval_filter(const FilterExpr& e,
                            const std::map<std::string, NodeId>& binding) {
    switch (e.kind) {
        case FilterExpr::Kind::And:
            for (const auto& k : e.children)
                if (!ref_eval_filter(k, binding)) return false;
            return true;
        case FilterExpr::Kind::Or:
            for (const auto& k : e.children)
                if (ref_eval_filter(k, binding)) return true;
            return false;
        case FilterExpr::Kind::Not: return !ref_eval_filter(e.children.front(), binding);
        case FilterExpr::Kind::Compare: {
            std::string lhs, rhs;
            if (e.lhs.kind == Term::Kind::Variable) {
                auto it = binding.find(e.lhs.text);
                if (it == binding.end()) return false;
                lhs = it->second.id;
            } else {
                lhs = e.lhs.text;
            }
            if (e.rhs.kind == Term::Kind::Variable) {
                auto it = binding.find(e.rhs.text);
                if (it == binding.end()) return false;
                rhs = it->second.id;
            } else {
                rhs = e.rhs.text;
            }
            int c = ref_compare(lhs, rhs);
            switch (e.cmp) {
                case Comparator::Eq: return c == 0;
                case Comparator::Ne: return c != 0;
                case Comparator::Lt: return c < 0;
                case Comparator::Le: return c <= 0;
                case Comparator::Gt: return c > 0;
                case Comparator::Ge: return c >= 0;
            }
            return false;
        }
    }
    return false;
}

// Sorted deduplicated projected rows, as plain strings.
inline std::vector<std::vector<std::string>> naive_match(const ErGraph& g,
                                                         const SelectStmt& stmt) {
    std::vector<std::vector<std::string>> out;
    std::map<std::string, NodeId> binding;

    auto term_node = [](const Term& t) {
        if (t.kind == Term::Kind::Literal) return NodeId::literal(t.text);
        if (t.text.rfind("_:", 0) == 0) return NodeId::blank(t.text.substr(2));
        return NodeId::uri(t.text);
    };

    std::function<void(std::size_t)> recurse = [&](std::size_t pi) {
        if (pi == stmt.patterns.size()) {
            if (stmt.filter && !ref_eval_filter(*stmt.filter, binding)) return;
            std::vector<std::string> row;
            for (const auto& v : stmt.projection) row.push_back(binding.at(v).id);
            out.push_back(std::move(row));
            return;
        }
        const TriplePattern& p = stmt.patterns[pi];
        for (const Triple& t : g.triples()) {
            std::vector<std::string> bound_here;
            bool ok = true;
            auto unify = [&](const Term& term, const NodeId& value) {
                if (!ok) return;
                if (term.kind != Term::Kind::Variable) {
                    ok = term_node(term) == value;
                    return;
                }
                auto it = binding.find(term.text);
                if (it != binding.end()) {
                    ok = it->second == value;
                    return;
                }
                binding.emplace(term.text, value);
                bound_here.push_back(term.text);
            };
            unify(p.subject, t.subject);
            unify(p.predicate, t.predicate);
            unify(p.object, t.object);
            if (ok) recurse(pi + 1);
            for (const auto& v : bound_here) binding.erase(v);
        }
    };
    recurse(0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// entity-statement oracle helpers: referenced attributes and a direct
// attribute-filter evaluation over one EntityRecord

inline void collect_for_test(const FilterExpr& e, std::vector<std::string>& attrs) {
    if (e.kind == FilterExpr::Kind::Compare) {
        for (const Term* t : {&e.lhs, &e.rhs})
            if (t->kind == Term::Kind::Attribute &&
                std::find(attrs.begin(), attrs.end(), t->text) == attrs.end())
                attrs.push_back(t->text);
        return;
    }
    for (const auto& k : e.children) collect_for_test(k, attrs);
}

inline bool eval_attr_filter(const FilterExpr& e, const EntityRecord& rec) {
    switch (e.kind) {
        case FilterExpr::Kind::And:
            for (const auto& k : e.children)
                if (!eval_attr_filter(k, rec)) return false;
            return true;
        case FilterExpr::Kind::Or:
            for (const auto& k : e.children)
                if (eval_attr_filter(k, rec)) return true;
            return false;
        case FilterExpr::Kind::Not: return !eval_attr_filter(e.children.front(), rec);
        case FilterExpr::Kind::Compare: {
            auto resolve = [&](const Term& t, std::string& out) {
                if (t.kind == Term::Kind::Attribute) {
                    auto it = rec.attributes.find(t.text);
                    if (it == rec.attributes.end()) return false;
                    out = it->second;
                    return true;
                }
                out = t.text;
                return true;
            };
            std::string lhs, rhs;
            if (!resolve(e.lhs, lhs) || !resolve(e.rhs, rhs)) return false;
            int c = ref_compare(lhs, rhs);
            switch (e.cmp) {
                case Comparator::Eq: return c == 0;
                case Comparator::Ne: return c != 0;
                case Comparator::Lt: return c < 0;
                case Comparator::Le: return c <= 0;
                case Comparator::Gt: return c > 0;
                case Comparator::Ge: return c >= 0;
            }
            return false;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// group-by oracle over entity attributes

inline std::map<std::string, std::vector<NodeId>> groupby_oracle(const ErGraph& g,
                                                                 const std::string& attr) {
    std::map<std::string, std::vector<NodeId>> groups;
    for (const auto& [id, idx] : g.nodes()) {
        const EntityRecord* rec = g.find_entity(id);
        if (!rec) continue;
        auto it = rec->attributes.find(attr);
        if (it == rec->attributes.end()) continue;
        groups[it->second].push_back(id);
    }
    return groups;
}

}  // namespace procgraph::testing
