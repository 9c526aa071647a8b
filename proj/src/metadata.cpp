#include "procgraph/metadata.hpp"

#include "procgraph/errors.hpp"

#include <algorithm>
#include <set>

namespace procgraph {

namespace {

bool is_activity(const ErGraph& g, const NodeId& node) {
    const EntityRecord* rec = g.find_entity(node);
    return rec && rec->entity_type == "activity";
}

// A single filter holds for an activity node when the named attribute is
// present and matches; `when` accepts an inclusive `A..B` instant range.
bool activity_passes(const ErGraph& g, const NodeId& activity, const std::string& key,
                     const std::string& value) {
    auto actual = g.attribute(activity, key);
    if (!actual) return false;
    if (key == "when") {
        auto range = value.find("..");
        if (range != std::string::npos) {
            auto lo = parse_instant(value.substr(0, range));
            auto hi = parse_instant(value.substr(range + 2));
            auto at = parse_instant(*actual);
            if (!lo || !hi || !at) return false;
            return *lo <= *at && *at <= *hi;
        }
    }
    return *actual == value;
}

bool path_passes_filters(const ErGraph& g, const Path& path,
                         const std::vector<std::pair<std::string, std::string>>& filters) {
    if (filters.empty()) return true;
    auto seq = path.node_sequence();
    for (std::size_t i = 1; i + 1 < seq.size(); ++i) {
        if (!is_activity(g, seq[i])) continue;
        for (const auto& [key, value] : filters)
            if (!activity_passes(g, seq[i], key, value)) return false;
    }
    return true;
}

void collect_activity_paths(const ErGraph& g, const NodeId& cur, const NodeId& target,
                            std::vector<Triple>& stack, std::vector<NodeId>& on_path,
                            std::vector<Path>& out) {
    for (auto ti : g.out_edges(cur)) {
        const Triple& t = g.triples()[ti];
        if (t.object == target) {
            if (!stack.empty()) {  // at least one intermediate activity
                Path p;
                p.triples = stack;
                p.triples.push_back(t);
                out.push_back(std::move(p));
            }
            continue;
        }
        if (!is_activity(g, t.object)) continue;
        if (std::find(on_path.begin(), on_path.end(), t.object) != on_path.end()) continue;
        stack.push_back(t);
        on_path.push_back(t.object);
        collect_activity_paths(g, t.object, target, stack, on_path, out);
        on_path.pop_back();
        stack.pop_back();
    }
}

}  // namespace

MetadataResult derivation_of(const ErGraph& g, const NodeId& version) {
    ArtifactVersion v = g.get_version(version);  // throws NotAVersion

    std::set<NodeId> ancestors;
    std::vector<NodeId> work = v.parents;
    while (!work.empty()) {
        NodeId cur = work.back();
        work.pop_back();
        if (!ancestors.insert(cur).second) continue;
        for (const NodeId& parent : g.get_version(cur).parents) work.push_back(parent);
    }

    // Kahn over the ancestor-induced lineage, parents first, ties lexicographic.
    std::map<NodeId, std::size_t> pending;
    for (const NodeId& a : ancestors) {
        std::size_t count = 0;
        for (const NodeId& parent : g.get_version(a).parents)
            if (ancestors.count(parent)) ++count;
        pending[a] = count;
    }
    std::set<NodeId> ready;
    for (const auto& [id, count] : pending)
        if (count == 0) ready.insert(id);

    MetadataResult result;
    result.mode = MetadataMode::Derivation;
    result.target = version;
    while (!ready.empty()) {
        NodeId cur = *ready.begin();
        ready.erase(ready.begin());
        result.ancestors.push_back(cur);
        for (auto& [pred, child] :
             g.neighbors(cur, ErGraph::Direction::Out, std::string("evolved-into")))
            if (ancestors.count(child) && --pending[child] == 0) ready.insert(child);
    }
    return result;
}

MetadataResult evolution_of(const ErGraph& g, const MetadataRequest& req,
                            PathNodeCatalog* catalog, std::uint64_t snapshot_id) {
    MetadataResult result;
    result.mode = MetadataMode::Evolution;
    result.target = req.target;

    MetadataResult derivation = derivation_of(g, req.target);  // validates the version
    std::vector<Path> paths;
    for (const NodeId& ancestor : derivation.ancestors) {
        std::vector<Triple> stack;
        std::vector<NodeId> on_path{ancestor};
        collect_activity_paths(g, ancestor, req.target, stack, on_path, paths);
    }
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());

    std::size_t counter = 0;
    for (auto& p : paths) {
        if (!path_passes_filters(g, p, req.filters)) continue;
        result.paths.emplace_back("path#" + std::to_string(++counter), std::move(p));
    }

    if (catalog) {
        PathNodeSpec spec;
        spec.name = "evolutionOf:" + req.target.id;
        spec.regex_source = "";
        spec.timed = true;  // refreshed on every evolution query
        // Stored directly: evolution paths come from lineage search, not a
        // regex, so the catalog entry is populated by hand.
        const PathNode* existing = catalog->find(spec.name);
        PathNode node;
        node.spec = spec;
        node.snapshot_id = snapshot_id;
        for (const auto& [label, p] : result.paths) {
            std::uint64_t first = snapshot_id;
            if (existing)
                for (const auto& e : existing->entries)
                    if (e.path == p) {
                        first = e.first_seen;
                        break;
                    }
            node.entries.push_back({p, first, snapshot_id});
        }
        catalog->store(std::move(node));
    }
    return result;
}

MetadataResult timeseries_of(const ErGraph& g, const MetadataRequest& req) {
    const EntityRecord* rec = g.find_entity(req.target);
    if (!rec) throw UnknownEntity(req.target.id);

    MetadataResult result;
    result.mode = MetadataMode::Timeseries;
    result.target = req.target;

    auto when_ok = [&](InstantMs at) {
        for (const auto& [key, value] : req.filters) {
            if (key != "when") continue;
            auto range = value.find("..");
            if (range != std::string::npos) {
                auto lo = parse_instant(value.substr(0, range));
                auto hi = parse_instant(value.substr(range + 2));
                if (!lo || !hi || at < *lo || at > *hi) return false;
            } else if (auto exact = parse_instant(value); !exact || at != *exact) {
                return false;
            }
        }
        return true;
    };

    if (rec->entity_type == "artifact") {
        for (auto& [pred, version] :
             g.neighbors(req.target, ErGraph::Direction::In, std::string("version-of"))) {
            ArtifactVersion v = g.get_version(version);
            if (!when_ok(v.created_at)) continue;
            result.series.push_back({version, v.created_at});
        }
    } else if (rec->entity_type == "actor") {
        for (const NodeId& activity : g.entities_of_type("activity")) {
            auto who = g.attribute(activity, "who");
            if (!who || *who != req.target.id) continue;
            auto when = g.attribute(activity, "when");
            InstantMs at = 0;
            if (when)
                if (auto parsed = parse_instant(*when)) at = *parsed;
            bool ok = when_ok(at);
            for (const auto& [key, value] : req.filters)
                if (key != "when" && key != "who" && !activity_passes(g, activity, key, value))
                    ok = false;
            if (ok) result.series.push_back({activity, at});
        }
    } else {
        throw UnknownEntity(req.target.id + " (not an artifact or actor)");
    }

    std::stable_sort(result.series.begin(), result.series.end(),
                     [](const auto& a, const auto& b) {
                         if (a.at != b.at) return a.at < b.at;
                         return a.id < b.id;
                     });
    return result;
}

MetadataResult run_metadata(const ErGraph& g, const MetadataRequest& req,
                            PathNodeCatalog* catalog, std::uint64_t snapshot_id) {
    switch (req.mode) {
        case MetadataMode::Evolution: return evolution_of(g, req, catalog, snapshot_id);
        case MetadataMode::Derivation: return derivation_of(g, req.target);
        case MetadataMode::Timeseries: return timeseries_of(g, req);
    }
    throw Error("unreachable metadata mode");
}

}  // namespace procgraph
