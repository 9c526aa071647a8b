#pragma once

#include "procgraph/ast.hpp"
#include "procgraph/graph.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace procgraph {

struct GraphStats {
    std::map<std::string, std::size_t> partition_sizes;
    std::size_t total_triples = 0;

    static GraphStats of(const ErGraph& g);
    // Variable predicates scan everything.
    std::size_t pattern_size(const TriplePattern& p) const;
};

// Star blocks grouped by subject term, with the chain links between them.
struct AlgebraTree {
    struct StarBlock {
        Term subject;
        std::vector<TriplePattern> patterns;
        std::vector<std::string> variables;  // all variables the block binds
    };
    std::vector<StarBlock> blocks;
    // (block a, block b, shared variables); one entry per connected pair
    std::vector<std::tuple<std::size_t, std::size_t, std::vector<std::string>>> links;
    std::vector<std::string> projection;
    std::optional<FilterExpr> filter;
};

// Groups patterns by subject term; refuses disconnected queries unless
// allow_product. Throws DisconnectedQuery.
AlgebraTree build_algebra(const SelectStmt& stmt, bool allow_product = false);

struct PlanOperator {
    enum class Kind { Load, Split, StarJoin, ChainJoin, Filter, Store };
    Kind kind = Kind::Load;
    // Split: the referenced predicates ("*" when a predicate is a variable)
    std::vector<std::string> predicates;
    // StarJoin
    Term subject;
    std::vector<TriplePattern> patterns;
    std::optional<FilterExpr> pushed_filter;
    // ChainJoin: shared variables (empty means cartesian product)
    std::vector<std::string> join_vars;
    std::size_t left_block = 0, right_block = 0;  // star-block order indices
    // Filter
    std::optional<FilterExpr> filter;
    // Store
    std::vector<std::string> projection;
};

struct LogicalPlan {
    std::vector<PlanOperator> ops;  // topological: LOAD SPLIT STAR* CHAIN* FILTER? STORE
    std::vector<AlgebraTree::StarBlock> blocks;  // scan inputs, indexed by chain ops
    std::size_t star_join_count() const;
    std::size_t chain_join_count() const;
};

struct PlanOptions {
    bool allow_product = false;
    // Annotate single-block filter conjuncts onto their star join instead of
    // the standalone FILTER operator.
    bool pushdown = false;
};

// LOAD -> SPLIT -> star joins -> chain joins (ascending estimated
// cardinality) -> FILTER -> STORE. Stats drive the chain order; without them
// blocks join in appearance order.
LogicalPlan compile_plan(const AlgebraTree& tree, const GraphStats* stats = nullptr,
                         PlanOptions opts = {});

// Deterministic operator listing, one line per operator.
std::string explain(const LogicalPlan& plan);

struct BindingTable {
    std::vector<std::string> columns;
    std::vector<std::vector<NodeId>> rows;  // deduplicated, sorted at stage merges
};

struct StageStat {
    std::string op;
    std::size_t rows_out = 0;
    double millis = 0;
};

struct ExecStats {
    std::vector<StageStat> stages;
    double join_millis() const;
};

struct ExecOptions {
    int parallelism = 1;       // worker count; <= 1 means sequential
    double timeout_secs = 0;   // 0 disables the wall-clock cap
};

// Partition-parallel evaluation over an immutable snapshot. The result row
// set is identical at every parallelism level. Throws EvaluationTimeout.
BindingTable execute(const LogicalPlan& plan, const ErGraph& g, ExecOptions opts = {},
                     ExecStats* stats = nullptr);

std::string render_tsv(const BindingTable& table);

}  // namespace procgraph
