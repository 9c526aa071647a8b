#include "procgraph/errors.hpp"
#include "procgraph/plan.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace procgraph {

namespace {

using Clock = std::chrono::steady_clock;
using Row = std::vector<NodeId>;

struct Deadline {
    Clock::time_point end{};
    bool enabled = false;

    static Deadline after(double seconds) {
        Deadline d;
        if (seconds > 0) {
            d.enabled = true;
            d.end = Clock::now() + std::chrono::microseconds(
                                       static_cast<std::int64_t>(seconds * 1e6));
        }
        return d;
    }
    void check() const {
        if (enabled && Clock::now() > end)
            throw EvaluationTimeout("query exceeded its wall-clock cap");
    }
};

// Run fn(worker) on `workers` threads; first exception wins.
void run_workers(int workers, const std::function<void(int)>& fn) {
    if (workers <= 1) {
        fn(0);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                fn(w);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void sort_dedup(std::vector<Row>& rows) {
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
}

NodeId term_to_node(const Term& t) {
    if (t.kind == Term::Kind::Literal) return NodeId::literal(t.text);
    if (t.text.starts_with("_:")) return NodeId::blank(t.text.substr(2));
    return NodeId::uri(t.text);
}

std::size_t hash_row_key(const Row& row, const std::vector<std::size_t>& cols) {
    std::size_t h = 1469598103934665603ull;
    for (auto c : cols) {
        for (char ch : row[c].id) {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ull;
        }
        h ^= static_cast<std::size_t>(row[c].kind) + 0x9e3779b9;
        h *= 1099511628211ull;
    }
    return h;
}

BindingTable scan_pattern(const ErGraph& g, const TriplePattern& p) {
    BindingTable table;
    // column per distinct variable, in subject/predicate/object order
    std::vector<std::pair<const Term*, int>> slots;  // term, row slot
    auto add_column = [&](const Term& t) -> int {
        if (t.kind != Term::Kind::Variable) return -1;
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            if (table.columns[i] == t.text) return static_cast<int>(i);
        table.columns.push_back(t.text);
        return static_cast<int>(table.columns.size() - 1);
    };
    int s_col = add_column(p.subject);
    int p_col = add_column(p.predicate);
    int o_col = add_column(p.object);

    std::optional<NodeId> s_const, p_const, o_const;
    if (p.subject.kind != Term::Kind::Variable) s_const = term_to_node(p.subject);
    if (p.predicate.kind != Term::Kind::Variable) p_const = term_to_node(p.predicate);
    if (p.object.kind != Term::Kind::Variable) o_const = term_to_node(p.object);

    auto match_triple = [&](const Triple& t) {
        if (s_const && t.subject != *s_const) return;
        if (o_const && t.object != *o_const) return;
        Row row(table.columns.size());
        auto bind = [&](int col, const NodeId& v) {
            if (col < 0) return true;
            if (row[static_cast<std::size_t>(col)].id.empty() &&
                row[static_cast<std::size_t>(col)].kind == NodeKind::Uri) {
                row[static_cast<std::size_t>(col)] = v;
                return true;
            }
            return row[static_cast<std::size_t>(col)] == v;  // repeated variable
        };
        if (!bind(s_col, t.subject)) return;
        if (!bind(p_col, t.predicate)) return;
        if (!bind(o_col, t.object)) return;
        table.rows.push_back(std::move(row));
    };

    if (p_const) {
        for (auto ti : g.partition(p_const->id)) match_triple(g.triples()[ti]);
    } else {
        for (const Triple& t : g.triples()) match_triple(t);
    }
    sort_dedup(table.rows);
    return table;
}

// Hash join on the shared columns; empty shared set means product. Bucketed
// by key hash across workers, then merged with a full-row sort.
BindingTable hash_join(const BindingTable& left, const BindingTable& right, int workers,
                       const Deadline& deadline) {
    deadline.check();
    std::vector<std::size_t> left_keys, right_keys;
    std::vector<std::size_t> right_extra;
    for (std::size_t rc = 0; rc < right.columns.size(); ++rc) {
        auto it = std::find(left.columns.begin(), left.columns.end(), right.columns[rc]);
        if (it != left.columns.end()) {
            left_keys.push_back(static_cast<std::size_t>(it - left.columns.begin()));
            right_keys.push_back(rc);
        } else {
            right_extra.push_back(rc);
        }
    }

    BindingTable out;
    out.columns = left.columns;
    for (auto rc : right_extra) out.columns.push_back(right.columns[rc]);

    int buckets = std::max(1, workers);
    std::vector<std::vector<const Row*>> left_buckets(static_cast<std::size_t>(buckets));
    std::vector<std::vector<const Row*>> right_buckets(static_cast<std::size_t>(buckets));
    if (left_keys.empty()) {  // product: split the left side only
        for (std::size_t i = 0; i < left.rows.size(); ++i)
            left_buckets[i % static_cast<std::size_t>(buckets)].push_back(&left.rows[i]);
        for (const Row& r : right.rows) right_buckets[0].push_back(&r);
    } else {
        for (const Row& r : left.rows)
            left_buckets[hash_row_key(r, left_keys) % static_cast<std::size_t>(buckets)]
                .push_back(&r);
        for (const Row& r : right.rows)
            right_buckets[hash_row_key(r, right_keys) % static_cast<std::size_t>(buckets)]
                .push_back(&r);
    }

    std::vector<std::vector<Row>> partial(static_cast<std::size_t>(buckets));
    run_workers(buckets, [&](int w) {
        auto& mine = partial[static_cast<std::size_t>(w)];
        const auto& lrows = left_buckets[static_cast<std::size_t>(w)];
        const auto& rrows = left_keys.empty() ? right_buckets[0]
                                              : right_buckets[static_cast<std::size_t>(w)];
        if (left_keys.empty()) {
            for (const Row* l : lrows) {
                deadline.check();
                for (const Row* r : rrows) {
                    Row row = *l;
                    for (auto rc : right_extra) row.push_back((*r)[rc]);
                    mine.push_back(std::move(row));
                }
            }
            return;
        }
        // build on the smaller side of this bucket
        std::unordered_multimap<std::size_t, const Row*> index;
        index.reserve(rrows.size());
        for (const Row* r : rrows) index.emplace(hash_row_key(*r, right_keys), r);
        std::size_t tick = 0;
        for (const Row* l : lrows) {
            if ((++tick & 0x3ff) == 0) deadline.check();
            auto key = hash_row_key(*l, left_keys);
            auto [lo, hi] = index.equal_range(key);
            for (auto it = lo; it != hi; ++it) {
                const Row* r = it->second;
                bool ok = true;
                for (std::size_t k = 0; k < left_keys.size() && ok; ++k)
                    ok = (*l)[left_keys[k]] == (*r)[right_keys[k]];
                if (!ok) continue;
                Row row = *l;
                for (auto rc : right_extra) row.push_back((*r)[rc]);
                mine.push_back(std::move(row));
            }
        }
    });

    std::size_t total = 0;
    for (const auto& p : partial) total += p.size();
    out.rows.reserve(total);
    for (auto& p : partial)
        for (auto& r : p) out.rows.push_back(std::move(r));
    sort_dedup(out.rows);
    return out;
}

int compare_values(const NodeId& a, const NodeId& b) { return literal_compare(a.id, b.id); }

bool eval_filter(const FilterExpr& e, const Row& row,
                 const std::map<std::string, std::size_t>& columns) {
    switch (e.kind) {
        case FilterExpr::Kind::And:
            for (const auto& c : e.children)
                if (!eval_filter(c, row, columns)) return false;
            return true;
        case FilterExpr::Kind::Or:
            for (const auto& c : e.children)
                if (eval_filter(c, row, columns)) return true;
            return false;
        case FilterExpr::Kind::Not: return !eval_filter(e.children.front(), row, columns);
        case FilterExpr::Kind::Compare: {
            auto value_of = [&](const Term& t, NodeId& out) {
                if (t.kind == Term::Kind::Variable) {
                    auto it = columns.find(t.text);
                    if (it == columns.end()) return false;  // unbound: row fails
                    out = row[it->second];
                    return true;
                }
                out = NodeId::literal(t.text);
                return true;
            };
            NodeId lhs, rhs;
            if (!value_of(e.lhs, lhs) || !value_of(e.rhs, rhs)) return false;
            int c = compare_values(lhs, rhs);
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

BindingTable filter_table(BindingTable table, const FilterExpr& filter, int workers,
                          const Deadline& deadline) {
    std::map<std::string, std::size_t> columns;
    for (std::size_t i = 0; i < table.columns.size(); ++i) columns[table.columns[i]] = i;

    std::size_t n = table.rows.size();
    std::vector<char> keep(n, 0);
    run_workers(workers, [&](int w) {
        std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) /
                            std::max<std::size_t>(1, static_cast<std::size_t>(workers));
        std::size_t begin = static_cast<std::size_t>(w) * chunk;
        std::size_t end = std::min(n, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) {
            if ((i & 0x3ff) == 0) deadline.check();
            keep[i] = eval_filter(filter, table.rows[i], columns) ? 1 : 0;
        }
    });
    std::vector<Row> kept;
    kept.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i]) kept.push_back(std::move(table.rows[i]));
    table.rows = std::move(kept);
    sort_dedup(table.rows);
    return table;
}

struct StageTimer {
    ExecStats* stats;
    std::string label;
    Clock::time_point begin = Clock::now();

    void done(std::size_t rows) {
        if (!stats) return;
        double ms = std::chrono::duration<double, std::milli>(Clock::now() - begin).count();
        stats->stages.push_back({label, rows, ms});
    }
};

// m-way join of a star block's pattern tables, smallest first.
BindingTable star_join(const ErGraph& g, const AlgebraTree::StarBlock& block,
                       const std::optional<FilterExpr>& pushed, int workers,
                       const Deadline& deadline) {
    std::vector<BindingTable> tables;
    tables.reserve(block.patterns.size());
    for (const TriplePattern& p : block.patterns) tables.push_back(scan_pattern(g, p));
    std::vector<std::size_t> order(tables.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return tables[a].rows.size() < tables[b].rows.size();
    });

    BindingTable acc = std::move(tables[order[0]]);
    for (std::size_t i = 1; i < order.size(); ++i)
        acc = hash_join(acc, tables[order[i]], workers, deadline);
    if (pushed) acc = filter_table(std::move(acc), *pushed, workers, deadline);
    return acc;
}

}  // namespace

BindingTable execute(const LogicalPlan& plan, const ErGraph& g, ExecOptions opts,
                     ExecStats* stats) {
    Deadline deadline = Deadline::after(opts.timeout_secs);
    int workers = std::max(1, opts.parallelism);

    // per-block tables, then chain folds in plan order
    std::vector<BindingTable> block_tables(plan.blocks.size());
    std::vector<bool> computed(plan.blocks.size(), false);
    std::size_t next_star = 0;

    const PlanOperator* store = nullptr;
    BindingTable acc;
    bool have_acc = false;

    // single-block plans (including the degenerate scan-only plan)
    auto ensure_acc = [&] {
        if (have_acc) return;
        if (!plan.blocks.empty()) {
            if (!computed[0]) {
                StageTimer timer{stats, "SCAN"};
                block_tables[0] = star_join(g, plan.blocks[0], std::nullopt, workers, deadline);
                computed[0] = true;
                timer.done(block_tables[0].rows.size());
            }
            acc = std::move(block_tables[0]);
        }
        have_acc = true;
    };

    for (const PlanOperator& op : plan.ops) {
        deadline.check();
        switch (op.kind) {
            case PlanOperator::Kind::Load:
            case PlanOperator::Kind::Split: break;  // partitions pre-exist on the snapshot
            case PlanOperator::Kind::StarJoin: {
                std::size_t b = next_star++;  // emitted in block order
                StageTimer timer{stats, "STARJOIN " + (op.subject.kind == Term::Kind::Variable
                                                           ? "?" + op.subject.text
                                                           : op.subject.text)};
                block_tables[b] = star_join(g, plan.blocks[b], op.pushed_filter, workers,
                                            deadline);
                computed[b] = true;
                timer.done(block_tables[b].rows.size());
                break;
            }
            case PlanOperator::Kind::ChainJoin: {
                if (!have_acc) {
                    acc = std::move(block_tables[op.left_block]);
                    have_acc = true;
                }
                StageTimer timer{stats, "CHAINJOIN"};
                acc = hash_join(acc, block_tables[op.right_block], workers, deadline);
                timer.done(acc.rows.size());
                break;
            }
            case PlanOperator::Kind::Filter: {
                ensure_acc();
                StageTimer timer{stats, "FILTER"};
                acc = filter_table(std::move(acc), *op.filter, workers, deadline);
                timer.done(acc.rows.size());
                break;
            }
            case PlanOperator::Kind::Store: {
                store = &op;
                break;
            }
        }
    }
    ensure_acc();

    // STORE: project, dedup, sort
    StageTimer timer{stats, "STORE"};
    BindingTable out;
    if (store) {
        out.columns = store->projection;
        std::vector<std::size_t> cols;
        for (const auto& name : store->projection) {
            auto it = std::find(acc.columns.begin(), acc.columns.end(), name);
            if (it == acc.columns.end()) throw Error("projection variable ?" + name + " unbound");
            cols.push_back(static_cast<std::size_t>(it - acc.columns.begin()));
        }
        out.rows.reserve(acc.rows.size());
        for (const Row& r : acc.rows) {
            Row row;
            row.reserve(cols.size());
            for (auto c : cols) row.push_back(r[c]);
            out.rows.push_back(std::move(row));
        }
        sort_dedup(out.rows);
    } else {
        out = std::move(acc);
    }
    timer.done(out.rows.size());
    return out;
}

}  // namespace procgraph
