#include "procgraph/graph.hpp"

#include "procgraph/errors.hpp"

#include <algorithm>
#include <deque>

namespace procgraph {

namespace {

void validate_triple(const Triple& t, std::size_t index) {
    if (t.subject.id.empty() || t.predicate.id.empty() || t.object.id.empty())
        throw MalformedTriple(index, "empty field");
    if (t.subject.kind == NodeKind::Literal)
        throw MalformedTriple(index, "literal node as subject");
    if (t.predicate.kind != NodeKind::Uri)
        throw MalformedTriple(index, "predicate must be a uri");
    if (t.is_attribute() && t.object.kind != NodeKind::Literal)
        throw MalformedTriple(index, "attribute object must be a literal");
    if (t.predicate.id == "@") throw MalformedTriple(index, "empty attribute name");
}

// Kahn's algorithm over the relationship subgraph; on failure walks the
// residual graph to report one concrete cycle.
void check_acyclic(const std::map<NodeId, std::uint32_t>& nodes,
                   const std::vector<std::vector<std::uint32_t>>& out,
                   const std::vector<Triple>& triples) {
    const std::size_t n = nodes.size();
    std::vector<std::uint32_t> indegree(n, 0);
    auto node_index = [&](const NodeId& id) { return nodes.at(id); };
    for (std::size_t u = 0; u < n; ++u)
        for (auto ti : out[u]) ++indegree[node_index(triples[ti].object)];

    std::deque<std::uint32_t> ready;
    for (std::uint32_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push_back(i);
    std::size_t visited = 0;
    while (!ready.empty()) {
        auto u = ready.front();
        ready.pop_front();
        ++visited;
        for (auto ti : out[u]) {
            auto v = node_index(triples[ti].object);
            if (--indegree[v] == 0) ready.push_back(v);
        }
    }
    if (visited == n) return;

    // Some node with indegree > 0 lies on or downstream of a cycle; chase
    // in-edges until a node repeats.
    std::vector<NodeId> ids(n);
    for (const auto& [id, idx] : nodes) ids[idx] = id;
    std::uint32_t start = 0;
    while (indegree[start] == 0) ++start;
    std::vector<std::int32_t> seen_at(n, -1);
    std::vector<std::uint32_t> trail;
    std::uint32_t cur = start;
    while (seen_at[cur] < 0) {
        seen_at[cur] = static_cast<std::int32_t>(trail.size());
        trail.push_back(cur);
        // any predecessor still inside the residual graph
        std::uint32_t pred = cur;
        for (std::size_t u = 0; u < n && pred == cur; ++u) {
            if (indegree[u] == 0) continue;
            for (auto ti : out[u])
                if (node_index(triples[ti].object) == cur) {
                    pred = static_cast<std::uint32_t>(u);
                    break;
                }
        }
        cur = pred;
    }
    std::vector<std::string> cycle;
    for (std::size_t i = static_cast<std::size_t>(seen_at[cur]); i < trail.size(); ++i)
        cycle.push_back(ids[trail[i]].id);
    std::reverse(cycle.begin(), cycle.end());
    cycle.push_back(cycle.front());
    throw CyclicRelationshipError(std::move(cycle));
}

}  // namespace

ErGraph ErGraph::build(std::vector<Triple> triples, GraphBuildOptions opts) {
    for (std::size_t i = 0; i < triples.size(); ++i) validate_triple(triples[i], i);
    std::sort(triples.begin(), triples.end());
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());

    ErGraph g;
    g.triples_ = std::move(triples);
    g.allow_cycles_ = opts.allow_cycles;
    g.index();
    if (!opts.allow_cycles) check_acyclic(g.nodes_, g.out_, g.triples_);
    return g;
}

void ErGraph::index() {
    for (std::uint32_t i = 0; i < triples_.size(); ++i) {
        const Triple& t = triples_[i];
        partitions_[t.predicate.id].push_back(i);
        nodes_.emplace(t.subject, 0);
        if (!t.is_attribute()) {
            nodes_.emplace(t.object, 0);
            ++relationship_count_;
        }
    }
    std::uint32_t next = 0;
    for (auto& [id, idx] : nodes_) idx = next++;

    out_.assign(nodes_.size(), {});
    in_.assign(nodes_.size(), {});
    for (std::uint32_t i = 0; i < triples_.size(); ++i) {
        const Triple& t = triples_[i];
        if (t.is_attribute()) continue;
        out_[nodes_.at(t.subject)].push_back(i);
        in_[nodes_.at(t.object)].push_back(i);
    }

    for (const auto& [id, idx] : nodes_) {
        EntityRecord rec;
        rec.id = id;
        entities_.emplace(id, std::move(rec));
    }
    for (const Triple& t : triples_) {
        if (!t.is_attribute()) continue;
        auto& rec = entities_.at(t.subject);
        auto name = t.attribute_name();
        auto [it, inserted] = rec.attributes.emplace(name, t.object.id);
        if (!inserted && t.object.id < it->second) it->second = t.object.id;
    }
    for (auto& [id, rec] : entities_) {
        auto it = rec.attributes.find("type");
        if (it != rec.attributes.end()) rec.entity_type = it->second;
    }
}

std::span<const std::uint32_t> ErGraph::partition(const std::string& predicate) const {
    auto it = partitions_.find(predicate);
    if (it == partitions_.end()) return {};
    return it->second;
}

std::span<const std::uint32_t> ErGraph::out_edges(const NodeId& node) const {
    auto it = nodes_.find(node);
    if (it == nodes_.end()) return {};
    return out_[it->second];
}

std::span<const std::uint32_t> ErGraph::in_edges(const NodeId& node) const {
    auto it = nodes_.find(node);
    if (it == nodes_.end()) return {};
    return in_[it->second];
}

std::vector<std::pair<NodeId, NodeId>> ErGraph::neighbors(
    const NodeId& node, Direction dir, const std::optional<std::string>& predicate) const {
    auto it = nodes_.find(node);
    if (it == nodes_.end()) throw UnknownNode(node.id);
    const auto& edges = dir == Direction::Out ? out_[it->second] : in_[it->second];
    std::vector<std::pair<NodeId, NodeId>> result;
    for (auto ti : edges) {
        const Triple& t = triples_[ti];
        if (predicate && t.predicate.id != *predicate) continue;
        result.emplace_back(t.predicate, dir == Direction::Out ? t.object : t.subject);
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

const EntityRecord* ErGraph::find_entity(const NodeId& id) const {
    auto it = entities_.find(id);
    return it == entities_.end() ? nullptr : &it->second;
}

EntityRecord ErGraph::get_entity(const NodeId& id) const {
    const EntityRecord* rec = find_entity(id);
    if (!rec) throw UnknownNode(id.id);
    return *rec;
}

std::vector<std::string> ErGraph::attribute_values(const NodeId& subject,
                                                   const std::string& name) const {
    std::vector<std::string> values;
    for (auto ti : partition("@" + name)) {
        const Triple& t = triples_[ti];
        if (t.subject == subject) values.push_back(t.object.id);
    }
    std::sort(values.begin(), values.end());
    return values;
}

std::optional<std::string> ErGraph::attribute(const NodeId& subject,
                                              const std::string& name) const {
    const EntityRecord* rec = find_entity(subject);
    if (!rec) return std::nullopt;
    auto it = rec->attributes.find(name);
    if (it == rec->attributes.end()) return std::nullopt;
    return it->second;
}

EventRecord ErGraph::get_event(const NodeId& id) const {
    const EntityRecord* rec = find_entity(id);
    if (!rec || rec->entity_type != "event") throw NotAnEvent(id.id);
    auto ts = rec->attributes.find("timestamp");
    if (ts == rec->attributes.end()) throw NotAnEvent(id.id + " (no @timestamp)");
    auto instant = parse_instant(ts->second);
    if (!instant) throw NotAnEvent(id.id + " (unparseable @timestamp)");

    EventRecord ev;
    ev.id = id;
    ev.timestamp = *instant;
    for (const auto& [k, v] : rec->attributes)
        if (k != "type" && k != "timestamp") ev.data.emplace(k, v);
    for (auto ti : in_edges(id)) {
        const Triple& t = triples_[ti];
        if (t.predicate.id == "performed") {
            ev.actor = t.subject;
            break;
        }
    }
    return ev;
}

ArtifactVersion ErGraph::get_version(const NodeId& id) const {
    const EntityRecord* rec = find_entity(id);
    if (!rec || rec->entity_type != "version") throw NotAVersion(id.id);
    ArtifactVersion v;
    v.version_id = id;
    for (auto& [pred, node] : neighbors(id, Direction::Out, std::string("version-of"))) {
        v.artifact = node;
        break;
    }
    for (auto& [pred, node] : neighbors(id, Direction::In, std::string("evolved-into")))
        v.parents.push_back(node);
    if (auto created = rec->attributes.find("created-at"); created != rec->attributes.end())
        if (auto instant = parse_instant(created->second)) v.created_at = *instant;
    for (const auto& [k, val] : rec->attributes)
        if (k != "type" && k != "created-at") v.meta.emplace(k, val);
    return v;
}

std::vector<NodeId> ErGraph::entities_of_type(const std::string& type) const {
    std::vector<NodeId> result;
    for (const auto& [id, rec] : entities_)
        if (rec.entity_type == type) result.push_back(id);
    return result;
}

namespace {

ErGraph rebuild(std::vector<Triple> triples, const ErGraph& g1, const ErGraph& g2) {
    GraphBuildOptions opts;
    opts.allow_cycles = g1.cycles_allowed() || g2.cycles_allowed();
    return ErGraph::build(std::move(triples), opts);
}

}  // namespace

ErGraph graph_union(const ErGraph& g1, const ErGraph& g2) {
    std::vector<Triple> merged;
    merged.reserve(g1.triple_count() + g2.triple_count());
    std::set_union(g1.triples().begin(), g1.triples().end(), g2.triples().begin(),
                   g2.triples().end(), std::back_inserter(merged));
    return rebuild(std::move(merged), g1, g2);
}

ErGraph graph_intersect(const ErGraph& g1, const ErGraph& g2) {
    std::vector<Triple> merged;
    std::set_intersection(g1.triples().begin(), g1.triples().end(), g2.triples().begin(),
                          g2.triples().end(), std::back_inserter(merged));
    return rebuild(std::move(merged), g1, g2);
}

ErGraph graph_difference(const ErGraph& g1, const ErGraph& g2) {
    std::vector<Triple> merged;
    std::set_difference(g1.triples().begin(), g1.triples().end(), g2.triples().begin(),
                        g2.triples().end(), std::back_inserter(merged));
    return rebuild(std::move(merged), g1, g2);
}

}  // namespace procgraph
