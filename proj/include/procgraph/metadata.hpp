#pragma once

#include "procgraph/ast.hpp"
#include "procgraph/graph.hpp"
#include "procgraph/path.hpp"

#include <string>
#include <vector>

namespace procgraph {

struct MetadataResult {
    MetadataMode mode = MetadataMode::Evolution;
    NodeId target;
    // evolution: (path#k, path) in deterministic order
    std::vector<std::pair<std::string, Path>> paths;
    // derivation: ancestors, farthest first (topological)
    std::vector<NodeId> ancestors;
    // timeseries
    struct Snapshot {
        NodeId id;
        InstantMs at = 0;
    };
    std::vector<Snapshot> series;
};

// Activity paths (>= 2 edges, all intermediate nodes @type='activity') from
// every ancestor version to the target, numbered path#1.. in lexicographic
// order. Filters drop paths containing an activity that violates any
// (key, value) pair; `when` values may be `A..B` instant ranges. When a
// catalog is given, the result is stored under "evolutionOf:<target>".
MetadataResult evolution_of(const ErGraph& g, const MetadataRequest& req,
                            PathNodeCatalog* catalog = nullptr,
                            std::uint64_t snapshot_id = 0);

// Transitive closure of version parent links, deduplicated, topologically
// ordered (ties lexicographic).
MetadataResult derivation_of(const ErGraph& g, const NodeId& version);

// Artifact: versions ordered by @created-at. Actor: that actor's activity
// nodes ordered by @when. Filters as for evolution.
MetadataResult timeseries_of(const ErGraph& g, const MetadataRequest& req);

MetadataResult run_metadata(const ErGraph& g, const MetadataRequest& req,
                            PathNodeCatalog* catalog = nullptr,
                            std::uint64_t snapshot_id = 0);

}  // namespace procgraph
