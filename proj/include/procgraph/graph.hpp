#pragma once

#include "procgraph/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace procgraph {

// Entity assembled from a node's attribute triples. `attributes` maps the
// attribute name (without '@') to the lexically smallest literal when a name
// occurs more than once; multi-valued reads go through
// ErGraph::attribute_values.
struct EntityRecord {
    NodeId id;
    std::string entity_type;  // value of @type, empty when absent
    std::map<std::string, std::string> attributes;
};

struct EventRecord {
    NodeId id;
    NodeId actor;  // subject of a `performed` edge into the event; may be empty
    InstantMs timestamp = 0;
    std::map<std::string, std::string> data;
};

struct ArtifactVersion {
    NodeId artifact;
    NodeId version_id;
    std::vector<NodeId> parents;  // in-neighbors via `evolved-into`
    InstantMs created_at = 0;
    std::map<std::string, std::string> meta;
};

struct GraphBuildOptions {
    // Skip the acyclicity check. Path queries over such snapshots need an
    // explicit hop bound.
    bool allow_cycles = false;
};

// Immutable snapshot of an entity-relationship graph: deduplicated triples,
// per-predicate vertical partitions, entity index, relationship adjacency.
// Safe for unlimited concurrent readers; mutation means building a new
// snapshot.
class ErGraph {
public:
    ErGraph() = default;

    static ErGraph build(std::vector<Triple> triples, GraphBuildOptions opts = {});

    const std::vector<Triple>& triples() const { return triples_; }
    std::size_t triple_count() const { return triples_.size(); }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t relationship_edge_count() const { return relationship_count_; }
    bool cycles_allowed() const { return allow_cycles_; }

    // Per-predicate partition: indices into triples(). Missing predicate
    // yields an empty span.
    std::span<const std::uint32_t> partition(const std::string& predicate) const;
    const std::map<std::string, std::vector<std::uint32_t>>& partitions() const {
        return partitions_;
    }

    bool has_node(const NodeId& id) const { return nodes_.count(id) != 0; }
    // All nodes: subjects/objects of relationship triples plus attribute
    // subjects, in sorted order.
    const std::map<NodeId, std::uint32_t>& nodes() const { return nodes_; }

    // Non-attribute edges incident to `node`, optionally restricted to one
    // predicate. Throws UnknownNode.
    enum class Direction { Out, In };
    std::vector<std::pair<NodeId, NodeId>> neighbors(
        const NodeId& node, Direction dir,
        const std::optional<std::string>& predicate = std::nullopt) const;

    // Indices of relationship triples leaving / entering a node.
    std::span<const std::uint32_t> out_edges(const NodeId& node) const;
    std::span<const std::uint32_t> in_edges(const NodeId& node) const;

    // Throws UnknownNode when the id does not occur in the graph.
    EntityRecord get_entity(const NodeId& id) const;
    const EntityRecord* find_entity(const NodeId& id) const;

    // All literal values of one attribute of one subject, sorted.
    std::vector<std::string> attribute_values(const NodeId& subject,
                                              const std::string& name) const;
    // Single-valued convenience: lexically smallest value or nullopt.
    std::optional<std::string> attribute(const NodeId& subject, const std::string& name) const;

    // Requires @type='event' and a parseable @timestamp; throws NotAnEvent.
    EventRecord get_event(const NodeId& id) const;
    // Requires @type='version'; throws NotAVersion.
    ArtifactVersion get_version(const NodeId& id) const;

    // Entities whose @type equals `type`, sorted by id.
    std::vector<NodeId> entities_of_type(const std::string& type) const;

    bool structurally_equal(const ErGraph& other) const { return triples_ == other.triples_; }

private:
    void index();

    std::vector<Triple> triples_;
    std::map<std::string, std::vector<std::uint32_t>> partitions_;
    std::map<NodeId, std::uint32_t> nodes_;  // node -> dense index
    std::vector<std::vector<std::uint32_t>> out_;
    std::vector<std::vector<std::uint32_t>> in_;
    std::map<NodeId, EntityRecord> entities_;
    std::size_t relationship_count_ = 0;
    bool allow_cycles_ = false;
};

ErGraph graph_union(const ErGraph& g1, const ErGraph& g2);
ErGraph graph_intersect(const ErGraph& g1, const ErGraph& g2);
ErGraph graph_difference(const ErGraph& g1, const ErGraph& g2);

}  // namespace procgraph
