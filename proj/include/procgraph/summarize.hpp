#pragma once

#include "procgraph/graph.hpp"
#include "procgraph/path.hpp"
#include "procgraph/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace procgraph {

// ψ: binary predicate over two entities' attributes.
struct CorrelationCondition {
    enum class Kind { AttrEquality, Registered };
    Kind kind = Kind::AttrEquality;
    std::string attr_x, attr_y;   // AttrEquality; attr_x == attr_y is the common case
    std::string registered_name;  // Registered
    std::optional<std::string> scope;  // entity-type restriction

    std::string describe() const;
};

using CorrelationPredicateFn =
    std::function<bool(const EntityRecord&, const EntityRecord&)>;

struct PathCondition {
    std::string regex_source;  // start/end bindings are the regex endpoints
};

using DefiningQuery = std::variant<std::monostate, CorrelationCondition, PathCondition>;

struct FolderMembershipEntry {
    NodeId id;
    std::uint64_t added_at = 0;
    std::optional<std::uint64_t> removed_at;
};

// Named materialized set of correlated entities with the induced ER subgraph.
struct FolderNode {
    std::string name;
    std::string partition_prefix;  // prefix the defining partition ran under
    std::vector<NodeId> members;   // sorted
    DefiningQuery defining_query;
    std::map<std::string, std::string> attributes;
    bool timed = false;
    std::uint64_t snapshot_id = 0;
    std::vector<FolderMembershipEntry> log;
    std::shared_ptr<const ErGraph> subgraph;

    bool has_member(const NodeId& id) const;
};

// Groups scoped entities into folders: connected components of the ψ-true
// pair graph (plain group-by for same-attribute equality). Entities lacking
// the attributes are out of scope; none in scope yields an empty list.
std::vector<FolderNode> partition_by_correlation(const ErGraph& g,
                                                 const CorrelationCondition& cond,
                                                 const std::string& name_prefix = "",
                                                 const CorrelationPredicateFn& predicate = {});

// Folder of every entity reachable from the regex's start binding through an
// accepted path.
FolderNode apply_path_condition(const ErGraph& g, const PathCondition& pc,
                                const std::string& into);

struct ProcessInstance {
    std::string folder_name;
    std::vector<EventRecord> events;  // chronological, ties by event id
    std::vector<std::string> activities() const;
};

// One instance per non-empty folder; members must be events.
std::vector<ProcessInstance> build_process_instances(std::span<const FolderNode> folders,
                                                     const ErGraph& g);
ProcessInstance build_process_instance(const FolderNode& folder, const ErGraph& g);

// Directly-follows graph with frequencies.
struct ProcessModel {
    std::string discovery_function;
    std::vector<std::string> activities;  // sorted distinct labels
    std::map<std::pair<std::string, std::string>, std::size_t> edges;
    std::map<std::string, std::size_t> starts;
    std::map<std::string, std::size_t> ends;
};

ProcessModel discover_dfg(std::span<const ProcessInstance> instances);
// DOT-compatible edge list: `a -> b [label=freq]`, one line per edge.
std::string to_dot(const ProcessModel& model);

struct Aggregate {
    enum class Fn { Count, Sum, Min, Max, Avg };
    Fn fn = Fn::Count;
    std::string attribute;  // ignored for Count

    static Aggregate parse(const std::string& text);  // throws UnknownAggregate
};

struct SummaryTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// One row per distinct dimension-value combination over the folder's members
// (or every graph node when folder is null); missing dimension values land in
// the '⊥' bucket. Rows sorted lexicographically on dimension values.
SummaryTable group_summarize(const ErGraph& g, const FolderNode* folder,
                             const std::vector<std::string>& dimensions,
                             const std::vector<Aggregate>& measures);

// Re-evaluates a timed folder's defining query against a new snapshot and
// stamps joiners/leavers in the membership log.
FolderNode refresh_timed_folder(const FolderNode& folder, const ErGraph& g,
                                std::uint64_t snapshot_id,
                                const CorrelationPredicateFn& predicate = {});

class FolderCatalog {
public:
    const FolderNode& store(FolderNode folder);    // DuplicateName when present
    const FolderNode& replace(FolderNode folder);  // refresh path
    const FolderNode* find(const std::string& name) const;
    std::vector<std::string> names() const;
    // Smallest snapshot id still referenced, if any folder exists.
    std::optional<std::uint64_t> min_pinned_snapshot() const;

private:
    std::map<std::string, FolderNode> folders_;
};

// Folder persistence: `<name>.json` manifest plus `<name>.members` file (one
// id per line; id<TAB>added_at<TAB>removed_at for timed folders).
void save_folder(const FolderNode& folder, const std::string& dir);
FolderNode load_folder(const std::string& dir, const std::string& name);
std::vector<std::string> list_saved_folders(const std::string& dir);

}  // namespace procgraph
