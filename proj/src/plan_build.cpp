#include "procgraph/plan.hpp"

#include "procgraph/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace procgraph {

GraphStats GraphStats::of(const ErGraph& g) {
    GraphStats stats;
    stats.total_triples = g.triple_count();
    for (const auto& [pred, part] : g.partitions()) stats.partition_sizes[pred] = part.size();
    return stats;
}

std::size_t GraphStats::pattern_size(const TriplePattern& p) const {
    if (p.predicate.kind != Term::Kind::Iri) return total_triples;
    auto it = partition_sizes.find(p.predicate.text);
    return it == partition_sizes.end() ? 0 : it->second;
}

namespace {

void collect_vars(const TriplePattern& p, std::vector<std::string>& out) {
    for (const Term* t : {&p.subject, &p.predicate, &p.object})
        if (t->kind == Term::Kind::Variable &&
            std::find(out.begin(), out.end(), t->text) == out.end())
            out.push_back(t->text);
}

std::string block_key(const Term& subject) {
    return subject.kind == Term::Kind::Variable ? "?" + subject.text : "=" + subject.text;
}

}  // namespace

AlgebraTree build_algebra(const SelectStmt& stmt, bool allow_product) {
    AlgebraTree tree;
    tree.projection = stmt.projection;
    tree.filter = stmt.filter;

    std::map<std::string, std::size_t> block_of;
    for (const TriplePattern& p : stmt.patterns) {
        auto key = block_key(p.subject);
        auto it = block_of.find(key);
        if (it == block_of.end()) {
            it = block_of.emplace(key, tree.blocks.size()).first;
            tree.blocks.push_back({p.subject, {}, {}});
        }
        tree.blocks[it->second].patterns.push_back(p);
        collect_vars(p, tree.blocks[it->second].variables);
    }

    for (std::size_t a = 0; a < tree.blocks.size(); ++a)
        for (std::size_t b = a + 1; b < tree.blocks.size(); ++b) {
            std::vector<std::string> shared;
            for (const auto& v : tree.blocks[a].variables)
                if (std::find(tree.blocks[b].variables.begin(), tree.blocks[b].variables.end(),
                              v) != tree.blocks[b].variables.end())
                    shared.push_back(v);
            if (!shared.empty()) tree.links.emplace_back(a, b, std::move(shared));
        }

    // connectivity over the link graph
    if (tree.blocks.size() > 1) {
        std::vector<bool> seen(tree.blocks.size(), false);
        std::vector<std::size_t> work{0};
        seen[0] = true;
        while (!work.empty()) {
            auto cur = work.back();
            work.pop_back();
            for (const auto& [a, b, shared] : tree.links) {
                std::size_t other = a == cur ? b : b == cur ? a : cur;
                if (other != cur && !seen[other]) {
                    seen[other] = true;
                    work.push_back(other);
                }
            }
        }
        if (!allow_product &&
            std::find(seen.begin(), seen.end(), false) != seen.end())
            throw DisconnectedQuery(
                "pattern groups share no variable; rerun with --allow-product for a "
                "cartesian product");
    }
    return tree;
}

std::size_t LogicalPlan::star_join_count() const {
    return std::count_if(ops.begin(), ops.end(), [](const PlanOperator& op) {
        return op.kind == PlanOperator::Kind::StarJoin;
    });
}

std::size_t LogicalPlan::chain_join_count() const {
    return std::count_if(ops.begin(), ops.end(), [](const PlanOperator& op) {
        return op.kind == PlanOperator::Kind::ChainJoin;
    });
}

namespace {

// Conjuncts referencing only the block's variables can ride on its star join.
void split_filter_for_pushdown(const FilterExpr& filter, const AlgebraTree& tree,
                               std::vector<std::optional<FilterExpr>>& per_block,
                               std::optional<FilterExpr>& residual) {
    std::vector<FilterExpr> conjuncts;
    if (filter.kind == FilterExpr::Kind::And) {
        conjuncts = filter.children;
    } else {
        conjuncts.push_back(filter);
    }
    std::vector<FilterExpr> rest;
    for (auto& conjunct : conjuncts) {
        std::vector<std::string> vars;
        std::vector<const FilterExpr*> work{&conjunct};
        while (!work.empty()) {
            const FilterExpr* e = work.back();
            work.pop_back();
            if (e->kind == FilterExpr::Kind::Compare) {
                for (const Term* t : {&e->lhs, &e->rhs})
                    if (t->kind == Term::Kind::Variable) vars.push_back(t->text);
            } else {
                for (const auto& c : e->children) work.push_back(&c);
            }
        }
        std::optional<std::size_t> home;
        for (std::size_t b = 0; b < tree.blocks.size() && !vars.empty(); ++b) {
            bool all = std::all_of(vars.begin(), vars.end(), [&](const std::string& v) {
                return std::find(tree.blocks[b].variables.begin(),
                                 tree.blocks[b].variables.end(),
                                 v) != tree.blocks[b].variables.end();
            });
            if (all) {
                home = b;
                break;
            }
        }
        if (home) {
            auto& slot = per_block[*home];
            if (!slot) slot = std::move(conjunct);
            else if (slot->kind == FilterExpr::Kind::And) slot->children.push_back(std::move(conjunct));
            else {
                std::vector<FilterExpr> children;
                children.push_back(std::move(*slot));
                children.push_back(std::move(conjunct));
                slot = FilterExpr::combine(FilterExpr::Kind::And, std::move(children));
            }
        } else {
            rest.push_back(std::move(conjunct));
        }
    }
    if (rest.size() == 1) residual = std::move(rest.front());
    else if (!rest.empty())
        residual = FilterExpr::combine(FilterExpr::Kind::And, std::move(rest));
}

}  // namespace

LogicalPlan compile_plan(const AlgebraTree& tree, const GraphStats* stats, PlanOptions opts) {
    LogicalPlan plan;
    plan.blocks = tree.blocks;

    PlanOperator load;
    load.kind = PlanOperator::Kind::Load;
    plan.ops.push_back(std::move(load));

    PlanOperator split;
    split.kind = PlanOperator::Kind::Split;
    {
        std::set<std::string> preds;
        for (const auto& block : tree.blocks)
            for (const auto& p : block.patterns)
                preds.insert(p.predicate.kind == Term::Kind::Iri ? p.predicate.text : "*");
        split.predicates.assign(preds.begin(), preds.end());
    }
    plan.ops.push_back(std::move(split));

    auto block_cardinality = [&](std::size_t b) -> std::size_t {
        if (!stats) return b;  // appearance order when no stats
        std::size_t best = stats->total_triples;
        for (const auto& p : tree.blocks[b].patterns)
            best = std::min(best, stats->pattern_size(p));
        return best;
    };

    std::vector<std::optional<FilterExpr>> pushed(tree.blocks.size());
    std::optional<FilterExpr> residual = tree.filter;
    if (opts.pushdown && tree.filter) {
        residual.reset();
        split_filter_for_pushdown(*tree.filter, tree, pushed, residual);
    }

    // one star join per block; the fully degenerate single-pattern query
    // collapses to LOAD/SPLIT/STORE
    bool degenerate = tree.blocks.size() == 1 && tree.blocks[0].patterns.size() == 1 &&
                      !pushed[0];
    if (!degenerate) {
        for (std::size_t b = 0; b < tree.blocks.size(); ++b) {
            PlanOperator star;
            star.kind = PlanOperator::Kind::StarJoin;
            star.subject = tree.blocks[b].subject;
            star.patterns = tree.blocks[b].patterns;
            star.pushed_filter = pushed[b];
            plan.ops.push_back(std::move(star));
        }
    }

    // chain joins: start from the smallest block, greedily attach the
    // smallest connected block
    if (tree.blocks.size() > 1) {
        std::vector<std::size_t> remaining;
        for (std::size_t b = 0; b < tree.blocks.size(); ++b) remaining.push_back(b);
        auto smallest = std::min_element(remaining.begin(), remaining.end(),
                                         [&](std::size_t a, std::size_t b) {
                                             auto ca = block_cardinality(a);
                                             auto cb = block_cardinality(b);
                                             if (ca != cb) return ca < cb;
                                             return a < b;
                                         });
        std::vector<std::size_t> joined{*smallest};
        remaining.erase(smallest);
        std::set<std::string> bound(tree.blocks[joined[0]].variables.begin(),
                                    tree.blocks[joined[0]].variables.end());
        while (!remaining.empty()) {
            std::optional<std::size_t> pick;
            for (std::size_t i = 0; i < remaining.size(); ++i) {
                std::size_t b = remaining[i];
                bool connected = std::any_of(
                    tree.blocks[b].variables.begin(), tree.blocks[b].variables.end(),
                    [&](const std::string& v) { return bound.count(v) != 0; });
                if (!connected && !opts.allow_product) continue;
                if (!pick) pick = i;
                else {
                    // connected blocks first, then smallest cardinality
                    std::size_t cur = remaining[*pick];
                    bool cur_connected = std::any_of(
                        tree.blocks[cur].variables.begin(), tree.blocks[cur].variables.end(),
                        [&](const std::string& v) { return bound.count(v) != 0; });
                    if (connected && !cur_connected) pick = i;
                    else if (connected == cur_connected &&
                             block_cardinality(b) < block_cardinality(cur))
                        pick = i;
                }
            }
            if (!pick) throw DisconnectedQuery("no connected block to join next");
            std::size_t b = remaining[*pick];
            remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(*pick));

            PlanOperator chain;
            chain.kind = PlanOperator::Kind::ChainJoin;
            chain.left_block = joined.back();
            chain.right_block = b;
            for (const auto& v : tree.blocks[b].variables)
                if (bound.count(v)) chain.join_vars.push_back(v);
            plan.ops.push_back(std::move(chain));
            joined.push_back(b);
            bound.insert(tree.blocks[b].variables.begin(), tree.blocks[b].variables.end());
        }
    }

    if (residual) {
        PlanOperator filter;
        filter.kind = PlanOperator::Kind::Filter;
        filter.filter = residual;
        plan.ops.push_back(std::move(filter));
    }

    PlanOperator store;
    store.kind = PlanOperator::Kind::Store;
    store.projection = tree.projection;
    plan.ops.push_back(std::move(store));
    return plan;
}

namespace {

std::string print_term_text(const Term& t) {
    switch (t.kind) {
        case Term::Kind::Variable: return "?" + t.text;
        case Term::Kind::Literal: return "'" + t.text + "'";
        default: return t.text;
    }
}

std::string filter_text(const FilterExpr& e) {
    switch (e.kind) {
        case FilterExpr::Kind::Compare:
            return print_term_text(e.lhs) + std::string(to_string(e.cmp)) +
                   print_term_text(e.rhs);
        case FilterExpr::Kind::Not: return "!(" + filter_text(e.children.front()) + ")";
        case FilterExpr::Kind::And:
        case FilterExpr::Kind::Or: {
            std::string sep = e.kind == FilterExpr::Kind::And ? " && " : " || ";
            std::string out;
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += sep;
                bool parens = e.children[i].kind == FilterExpr::Kind::And ||
                              e.children[i].kind == FilterExpr::Kind::Or;
                out += parens ? "(" + filter_text(e.children[i]) + ")"
                              : filter_text(e.children[i]);
            }
            return out;
        }
    }
    return "";
}

}  // namespace

std::string explain(const LogicalPlan& plan) {
    std::ostringstream out;
    for (const PlanOperator& op : plan.ops) {
        switch (op.kind) {
            case PlanOperator::Kind::Load: out << "LOAD graph\n"; break;
            case PlanOperator::Kind::Split: {
                out << "SPLIT [";
                for (std::size_t i = 0; i < op.predicates.size(); ++i)
                    out << (i ? ", " : "") << op.predicates[i];
                out << "]\n";
                break;
            }
            case PlanOperator::Kind::StarJoin:
                out << "STARJOIN " << print_term_text(op.subject) << " ["
                    << op.patterns.size()
                    << (op.patterns.size() == 1 ? " pattern" : " patterns") << "]";
                if (op.pushed_filter) out << " filter (" << filter_text(*op.pushed_filter) << ")";
                out << "\n";
                break;
            case PlanOperator::Kind::ChainJoin:
                if (op.join_vars.empty()) {
                    out << "CHAINJOIN (product)\n";
                } else {
                    out << "CHAINJOIN";
                    for (const auto& v : op.join_vars) out << " ?" << v;
                    out << "\n";
                }
                break;
            case PlanOperator::Kind::Filter:
                out << "FILTER (" << filter_text(*op.filter) << ")\n";
                break;
            case PlanOperator::Kind::Store: {
                out << "STORE [";
                for (std::size_t i = 0; i < op.projection.size(); ++i)
                    out << (i ? ", " : "") << "?" << op.projection[i];
                out << "]\n";
                break;
            }
        }
    }
    return out.str();
}

double ExecStats::join_millis() const {
    double total = 0;
    for (const StageStat& s : stages)
        if (s.op.rfind("STARJOIN", 0) == 0 || s.op.rfind("CHAINJOIN", 0) == 0)
            total += s.millis;
    return total;
}

std::string render_tsv(const BindingTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += '\t';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += '\t';
            out += row[i].id;
        }
        out += '\n';
    }
    return out;
}

}  // namespace procgraph
