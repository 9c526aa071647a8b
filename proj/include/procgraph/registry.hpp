#pragma once

#include "procgraph/graph.hpp"
#include "procgraph/path.hpp"
#include "procgraph/summarize.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace procgraph {

enum class AlgorithmKind { ProcessDiscovery, CorrelationPredicate, Summarizer };
std::string_view to_string(AlgorithmKind kind);

using ProcessDiscoveryFn =
    std::function<ProcessModel(std::span<const ProcessInstance>)>;
using SummarizerFn = std::function<SummaryTable(const ErGraph&, const FolderNode*)>;

// Pluggable controller for external algorithms. Names are unique per kind;
// registration happens at startup, lookups are read-only afterwards.
class AlgorithmRegistry {
public:
    // 'dfg' discovery and the 'attr-eq' correlation family come built in.
    static AlgorithmRegistry with_builtins();

    void register_process_discovery(const std::string& name, ProcessDiscoveryFn fn);
    void register_correlation_predicate(const std::string& name, CorrelationPredicateFn fn);
    void register_summarizer(const std::string& name, SummarizerFn fn);

    const ProcessDiscoveryFn* find_process_discovery(const std::string& name) const;
    const CorrelationPredicateFn* find_correlation_predicate(const std::string& name) const;
    const SummarizerFn* find_summarizer(const std::string& name) const;

    std::vector<std::string> names(AlgorithmKind kind) const;

private:
    void check_free(AlgorithmKind kind, const std::string& name) const;

    std::map<std::string, ProcessDiscoveryFn> discovery_;
    std::map<std::string, CorrelationPredicateFn> predicates_;
    std::map<std::string, SummarizerFn> summarizers_;
};

struct SnapshotInfo {
    std::uint64_t id = 0;
    InstantMs created_at = 0;
    std::uint64_t parent = 0;
    std::size_t added = 0;
    std::size_t removed = 0;
    std::size_t triple_count = 0;
};

// Time-aware snapshot chain: full logical versions stored as base + delta
// chains, compacted to a full copy every 64 deltas. Snapshot 0 is the empty
// graph. Commits are serialized; readers pin a shared_ptr for the query.
class SnapshotCatalog {
public:
    explicit SnapshotCatalog(GraphBuildOptions opts = {});

    // Applies removals then additions to the latest snapshot. Returns the new
    // id (= previous + 1). Throws CyclicRelationshipError on a bad result.
    std::uint64_t commit(std::vector<Triple> additions, std::vector<Triple> removals);
    // Replace-everything commit (file loads).
    std::uint64_t commit_graph(ErGraph g);

    std::uint64_t latest() const;
    std::shared_ptr<const ErGraph> graph(std::uint64_t id) const;
    std::shared_ptr<const ErGraph> latest_graph() const { return graph(latest()); }
    std::vector<SnapshotInfo> history() const;

    // Frees a snapshot's materialization and forbids further queries at that
    // id. Refuses while a folder pins it.
    void drop_snapshot(std::uint64_t id, const FolderCatalog& folders);

    FolderCatalog& folders() { return folders_; }
    const FolderCatalog& folders() const { return folders_; }
    PathNodeCatalog& path_nodes() { return path_nodes_; }
    const PathNodeCatalog& path_nodes() const { return path_nodes_; }

    static constexpr std::size_t kCompactionThreshold = 64;

private:
    struct Entry {
        SnapshotInfo info;
        std::shared_ptr<const ErGraph> full;  // set for bases and cached tips
        std::vector<Triple> additions;
        std::vector<Triple> removals;
        bool dropped = false;
    };

    std::shared_ptr<const ErGraph> materialize_locked(std::uint64_t id) const;

    mutable std::mutex mutex_;
    GraphBuildOptions build_opts_;
    std::vector<Entry> entries_;  // index == snapshot id
    FolderCatalog folders_;
    PathNodeCatalog path_nodes_;
};

}  // namespace procgraph
