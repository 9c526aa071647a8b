#include "procgraph/summarize.hpp"

#include "procgraph/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace procgraph {

namespace fs = std::filesystem;
using nlohmann::json;

std::string CorrelationCondition::describe() const {
    std::string out = kind == Kind::AttrEquality
                          ? "x." + attr_x + " = y." + attr_y
                          : registered_name;
    if (scope) out += " scope " + *scope;
    return out;
}

bool FolderNode::has_member(const NodeId& id) const {
    return std::binary_search(members.begin(), members.end(), id);
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = parent[find(b)]; }
};

std::shared_ptr<const ErGraph> induced_subgraph(const ErGraph& g,
                                                const std::vector<NodeId>& members) {
    std::vector<Triple> triples;
    for (const Triple& t : g.triples()) {
        if (!std::binary_search(members.begin(), members.end(), t.subject)) continue;
        if (t.is_attribute() ||
            std::binary_search(members.begin(), members.end(), t.object))
            triples.push_back(t);
    }
    GraphBuildOptions opts;
    opts.allow_cycles = g.cycles_allowed();
    return std::make_shared<const ErGraph>(ErGraph::build(std::move(triples), opts));
}

FolderNode make_folder(const ErGraph& g, std::string name, std::string prefix,
                       std::vector<NodeId> members, DefiningQuery query,
                       const std::string& description) {
    FolderNode f;
    f.name = std::move(name);
    f.partition_prefix = std::move(prefix);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    f.members = std::move(members);
    f.defining_query = std::move(query);
    f.attributes["condition"] = description;
    f.attributes["cardinality"] = std::to_string(f.members.size());
    f.subgraph = induced_subgraph(g, f.members);
    return f;
}

std::vector<NodeId> scoped_entities(const ErGraph& g, const CorrelationCondition& cond) {
    std::vector<NodeId> out;
    for (const auto& [id, idx] : g.nodes()) {
        if (cond.scope) {
            const EntityRecord* rec = g.find_entity(id);
            if (!rec || rec->entity_type != *cond.scope) continue;
        }
        out.push_back(id);
    }
    return out;
}

}  // namespace

std::vector<FolderNode> partition_by_correlation(const ErGraph& g,
                                                 const CorrelationCondition& cond,
                                                 const std::string& name_prefix,
                                                 const CorrelationPredicateFn& predicate) {
    std::vector<FolderNode> folders;

    if (cond.kind == CorrelationCondition::Kind::AttrEquality && cond.attr_x == cond.attr_y) {
        // group-by on the shared attribute value
        std::map<std::string, std::vector<NodeId>> groups;
        for (const NodeId& id : scoped_entities(g, cond)) {
            auto value = g.attribute(id, cond.attr_x);
            if (value) groups[*value].push_back(id);
        }
        for (auto& [value, members] : groups)
            folders.push_back(make_folder(g, name_prefix + cond.attr_x + "=" + value,
                                          name_prefix, std::move(members), cond,
                                          cond.describe()));
        return folders;
    }

    // General ψ: connected components of the ψ-true pair graph.
    std::vector<NodeId> scoped;
    if (cond.kind == CorrelationCondition::Kind::AttrEquality) {
        for (const NodeId& id : scoped_entities(g, cond))
            if (g.attribute(id, cond.attr_x) || g.attribute(id, cond.attr_y))
                scoped.push_back(id);
    } else {
        if (!predicate) throw UnknownRegisteredCondition(cond.registered_name);
        for (const NodeId& id : scoped_entities(g, cond)) {
            const EntityRecord* rec = g.find_entity(id);
            if (rec && !rec->attributes.empty()) scoped.push_back(id);
        }
    }
    if (scoped.empty()) return folders;

    UnionFind uf(scoped.size());
    if (cond.kind == CorrelationCondition::Kind::AttrEquality) {
        // x.A = y.B links the A-bucket and B-bucket of each shared value
        std::map<std::string, std::vector<std::size_t>> by_a, by_b;
        for (std::size_t i = 0; i < scoped.size(); ++i) {
            if (auto a = g.attribute(scoped[i], cond.attr_x)) by_a[*a].push_back(i);
            if (auto b = g.attribute(scoped[i], cond.attr_y)) by_b[*b].push_back(i);
        }
        for (auto& [value, xs] : by_a) {
            auto it = by_b.find(value);
            if (it == by_b.end()) continue;
            for (auto x : xs) uf.unite(x, it->second.front());
            for (auto y : it->second) uf.unite(xs.front(), y);
        }
    } else {
        std::vector<EntityRecord> records;
        records.reserve(scoped.size());
        for (const NodeId& id : scoped) records.push_back(g.get_entity(id));
        for (std::size_t i = 0; i < scoped.size(); ++i)
            for (std::size_t j = i + 1; j < scoped.size(); ++j)
                if (predicate(records[i], records[j]) || predicate(records[j], records[i]))
                    uf.unite(i, j);
    }

    std::map<std::size_t, std::vector<NodeId>> components;
    for (std::size_t i = 0; i < scoped.size(); ++i)
        components[uf.find(i)].push_back(scoped[i]);
    // stable numbering: order components by smallest member
    std::vector<std::vector<NodeId>> ordered;
    for (auto& [root, members] : components) ordered.push_back(std::move(members));
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (std::size_t k = 0; k < ordered.size(); ++k)
        folders.push_back(make_folder(g, name_prefix + "part#" + std::to_string(k),
                                      name_prefix, std::move(ordered[k]), cond,
                                      cond.describe()));
    return folders;
}

FolderNode apply_path_condition(const ErGraph& g, const PathCondition& pc,
                                const std::string& into) {
    PathMatcher matcher(g, PathRegex::compile(pc.regex_source));
    std::vector<NodeId> members;
    for (const auto& [node, idx] : g.nodes()) {
        auto initial = matcher.regex().advance_node(matcher.regex().initial(), node, g);
        if (PathRegex::empty(initial)) continue;
        for (const NodeId& end : matcher.accepting_ends_from(node))
            if (end != node) members.push_back(end);
    }
    return make_folder(g, into, "", std::move(members), pc, "path " + pc.regex_source);
}

std::vector<std::string> ProcessInstance::activities() const {
    std::vector<std::string> out;
    for (const EventRecord& e : events) {
        auto it = e.data.find("activity");
        out.push_back(it == e.data.end() ? e.id.id : it->second);
    }
    return out;
}

ProcessInstance build_process_instance(const FolderNode& folder, const ErGraph& g) {
    ProcessInstance instance;
    instance.folder_name = folder.name;
    for (const NodeId& id : folder.members) instance.events.push_back(g.get_event(id));
    std::sort(instance.events.begin(), instance.events.end(),
              [](const EventRecord& a, const EventRecord& b) {
                  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                  return a.id < b.id;
              });
    return instance;
}

std::vector<ProcessInstance> build_process_instances(std::span<const FolderNode> folders,
                                                     const ErGraph& g) {
    std::vector<ProcessInstance> instances;
    for (const FolderNode& f : folders) {
        if (f.members.empty()) continue;
        instances.push_back(build_process_instance(f, g));
    }
    return instances;
}

ProcessModel discover_dfg(std::span<const ProcessInstance> instances) {
    if (instances.empty()) throw EmptyInput("no process instances");
    ProcessModel model;
    model.discovery_function = "dfg";
    std::set<std::string> labels;
    for (const ProcessInstance& inst : instances) {
        auto acts = inst.activities();
        if (acts.empty()) continue;
        labels.insert(acts.begin(), acts.end());
        ++model.starts[acts.front()];
        ++model.ends[acts.back()];
        for (std::size_t i = 0; i + 1 < acts.size(); ++i)
            ++model.edges[{acts[i], acts[i + 1]}];
    }
    model.activities.assign(labels.begin(), labels.end());
    return model;
}

std::string to_dot(const ProcessModel& model) {
    std::string out;
    for (const auto& [edge, freq] : model.edges)
        out += edge.first + " -> " + edge.second + " [label=" + std::to_string(freq) + "]\n";
    return out;
}

Aggregate Aggregate::parse(const std::string& text) {
    Aggregate agg;
    auto open = text.find('(');
    std::string fn = open == std::string::npos ? text : text.substr(0, open);
    if (open != std::string::npos && text.back() == ')')
        agg.attribute = text.substr(open + 1, text.size() - open - 2);
    if (fn == "count") agg.fn = Fn::Count;
    else if (fn == "sum") agg.fn = Fn::Sum;
    else if (fn == "min") agg.fn = Fn::Min;
    else if (fn == "max") agg.fn = Fn::Max;
    else if (fn == "avg") agg.fn = Fn::Avg;
    else throw UnknownAggregate(fn);
    return agg;
}

namespace {

std::string format_number(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string aggregate_label(const Aggregate& a) {
    switch (a.fn) {
        case Aggregate::Fn::Count: return "count";
        case Aggregate::Fn::Sum: return "sum(" + a.attribute + ")";
        case Aggregate::Fn::Min: return "min(" + a.attribute + ")";
        case Aggregate::Fn::Max: return "max(" + a.attribute + ")";
        case Aggregate::Fn::Avg: return "avg(" + a.attribute + ")";
    }
    return "?";
}

}  // namespace

SummaryTable group_summarize(const ErGraph& g, const FolderNode* folder,
                             const std::vector<std::string>& dimensions,
                             const std::vector<Aggregate>& measures) {
    constexpr const char* kMissing = "⊥";  // ⊥ bucket

    std::vector<NodeId> scope;
    if (folder) {
        scope = folder->members;
    } else {
        for (const auto& [id, idx] : g.nodes()) scope.push_back(id);
    }

    std::map<std::vector<std::string>, std::vector<NodeId>> groups;
    for (const NodeId& id : scope) {
        std::vector<std::string> key;
        for (const auto& dim : dimensions) {
            auto value = g.attribute(id, dim);
            key.push_back(value ? *value : kMissing);
        }
        groups[key].push_back(id);
    }

    SummaryTable table;
    table.columns = dimensions;
    for (const Aggregate& a : measures) table.columns.push_back(aggregate_label(a));

    for (const auto& [key, members] : groups) {
        std::vector<std::string> row = key;
        for (const Aggregate& a : measures) {
            if (a.fn == Aggregate::Fn::Count) {
                row.push_back(std::to_string(members.size()));
                continue;
            }
            std::vector<std::string> values;
            for (const NodeId& id : members)
                if (auto v = g.attribute(id, a.attribute)) values.push_back(*v);
            if (values.empty()) {
                row.push_back(kMissing);
                continue;
            }
            switch (a.fn) {
                case Aggregate::Fn::Sum:
                case Aggregate::Fn::Avg: {
                    double sum = 0;
                    std::size_t n = 0;
                    for (const auto& v : values)
                        if (auto num = parse_number(v)) {
                            sum += *num;
                            ++n;
                        }
                    if (n == 0) row.push_back(kMissing);
                    else row.push_back(format_number(a.fn == Aggregate::Fn::Sum
                                                         ? sum
                                                         : sum / static_cast<double>(n)));
                    break;
                }
                case Aggregate::Fn::Min:
                case Aggregate::Fn::Max: {
                    std::string best = values.front();
                    for (const auto& v : values) {
                        int c = literal_compare(v, best);
                        if ((a.fn == Aggregate::Fn::Min && c < 0) ||
                            (a.fn == Aggregate::Fn::Max && c > 0))
                            best = v;
                    }
                    row.push_back(best);
                    break;
                }
                default: break;
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

FolderNode refresh_timed_folder(const FolderNode& folder, const ErGraph& g,
                                std::uint64_t snapshot_id,
                                const CorrelationPredicateFn& predicate) {
    if (std::holds_alternative<std::monostate>(folder.defining_query))
        throw NoDefiningQuery("folder " + folder.name + " has no defining query");

    std::vector<NodeId> fresh;
    if (const auto* cond = std::get_if<CorrelationCondition>(&folder.defining_query)) {
        auto folders = partition_by_correlation(g, *cond, folder.partition_prefix, predicate);
        for (const FolderNode& f : folders)
            if (f.name == folder.name) {
                fresh = f.members;
                break;
            }
    } else {
        const auto& pc = std::get<PathCondition>(folder.defining_query);
        fresh = apply_path_condition(g, pc, folder.name).members;
    }

    FolderNode updated = folder;
    updated.snapshot_id = snapshot_id;
    updated.members = fresh;
    updated.subgraph = induced_subgraph(g, fresh);
    updated.attributes["cardinality"] = std::to_string(fresh.size());
    updated.attributes["snapshot"] = std::to_string(snapshot_id);

    for (const NodeId& id : fresh)
        if (!folder.has_member(id)) updated.log.push_back({id, snapshot_id, std::nullopt});
    for (const NodeId& id : folder.members)
        if (!std::binary_search(fresh.begin(), fresh.end(), id)) {
            bool stamped = false;
            for (auto& entry : updated.log)
                if (entry.id == id && !entry.removed_at) {
                    entry.removed_at = snapshot_id;
                    stamped = true;
                }
            if (!stamped) updated.log.push_back({id, folder.snapshot_id, snapshot_id});
        }
    return updated;
}

const FolderNode& FolderCatalog::store(FolderNode folder) {
    if (folders_.count(folder.name)) throw DuplicateName(folder.name);
    return folders_.emplace(folder.name, std::move(folder)).first->second;
}

const FolderNode& FolderCatalog::replace(FolderNode folder) {
    auto name = folder.name;
    folders_.insert_or_assign(name, std::move(folder));
    return folders_.at(name);
}

const FolderNode* FolderCatalog::find(const std::string& name) const {
    auto it = folders_.find(name);
    return it == folders_.end() ? nullptr : &it->second;
}

std::vector<std::string> FolderCatalog::names() const {
    std::vector<std::string> out;
    for (const auto& [name, folder] : folders_) out.push_back(name);
    return out;
}

std::optional<std::uint64_t> FolderCatalog::min_pinned_snapshot() const {
    std::optional<std::uint64_t> min;
    for (const auto& [name, folder] : folders_)
        if (!min || folder.snapshot_id < *min) min = folder.snapshot_id;
    return min;
}

namespace {

std::string defining_query_text(const DefiningQuery& q) {
    if (const auto* cond = std::get_if<CorrelationCondition>(&q))
        return "correlation " + cond->describe();
    if (const auto* pc = std::get_if<PathCondition>(&q)) return "path " + pc->regex_source;
    return "";
}

DefiningQuery defining_query_from_json(const json& j) {
    std::string kind = j.value("kind", "");
    if (kind == "correlation") {
        CorrelationCondition cond;
        if (j.value("registered", "").empty()) {
            cond.kind = CorrelationCondition::Kind::AttrEquality;
            cond.attr_x = j.value("attr_x", "");
            cond.attr_y = j.value("attr_y", "");
        } else {
            cond.kind = CorrelationCondition::Kind::Registered;
            cond.registered_name = j["registered"];
        }
        if (j.contains("scope")) cond.scope = j["scope"].get<std::string>();
        return cond;
    }
    if (kind == "path") return PathCondition{j.value("regex", "")};
    return std::monostate{};
}

}  // namespace

void save_folder(const FolderNode& folder, const std::string& dir) {
    fs::create_directories(dir);
    json manifest;
    manifest["name"] = folder.name;
    manifest["prefix"] = folder.partition_prefix;
    manifest["timed"] = folder.timed;
    manifest["snapshot"] = folder.snapshot_id;
    manifest["defining_query_text"] = defining_query_text(folder.defining_query);
    if (const auto* cond = std::get_if<CorrelationCondition>(&folder.defining_query)) {
        manifest["query"]["kind"] = "correlation";
        manifest["query"]["attr_x"] = cond->attr_x;
        manifest["query"]["attr_y"] = cond->attr_y;
        manifest["query"]["registered"] = cond->registered_name;
        if (cond->scope) manifest["query"]["scope"] = *cond->scope;
    } else if (const auto* pc = std::get_if<PathCondition>(&folder.defining_query)) {
        manifest["query"]["kind"] = "path";
        manifest["query"]["regex"] = pc->regex_source;
    }

    std::ofstream mf(fs::path(dir) / (folder.name + ".json"), std::ios::binary);
    if (!mf) throw IoError("cannot write folder manifest for " + folder.name);
    mf << manifest.dump(2) << '\n';

    std::ofstream members(fs::path(dir) / (folder.name + ".members"), std::ios::binary);
    if (!members) throw IoError("cannot write folder members for " + folder.name);
    if (folder.timed) {
        for (const auto& entry : folder.log)
            members << entry.id.id << '\t' << entry.added_at << '\t'
                    << (entry.removed_at ? std::to_string(*entry.removed_at) : "") << '\n';
        for (const NodeId& id : folder.members) {
            bool logged = false;
            for (const auto& entry : folder.log)
                if (entry.id == id && !entry.removed_at) logged = true;
            if (!logged)
                members << id.id << '\t' << folder.snapshot_id << '\t' << '\n';
        }
    } else {
        for (const NodeId& id : folder.members) members << id.id << '\n';
    }
}

FolderNode load_folder(const std::string& dir, const std::string& name) {
    std::ifstream mf(fs::path(dir) / (name + ".json"), std::ios::binary);
    if (!mf) throw IoError("cannot read folder manifest for " + name);
    json manifest = json::parse(mf);

    FolderNode folder;
    folder.name = manifest.value("name", name);
    folder.partition_prefix = manifest.value("prefix", "");
    folder.timed = manifest.value("timed", false);
    folder.snapshot_id = manifest.value("snapshot", 0);
    if (manifest.contains("query")) folder.defining_query = defining_query_from_json(manifest["query"]);
    folder.attributes["condition"] = manifest.value("defining_query_text", "");

    std::ifstream members(fs::path(dir) / (name + ".members"), std::ios::binary);
    if (!members) throw IoError("cannot read folder members for " + name);
    std::string line;
    while (std::getline(members, line)) {
        if (line.empty()) continue;
        auto tab1 = line.find('\t');
        if (tab1 == std::string::npos) {
            folder.members.push_back(NodeId::uri(line));
            continue;
        }
        auto tab2 = line.find('\t', tab1 + 1);
        FolderMembershipEntry entry;
        entry.id = NodeId::uri(line.substr(0, tab1));
        entry.added_at = std::stoull(line.substr(tab1 + 1, tab2 - tab1 - 1));
        std::string removed = tab2 == std::string::npos ? "" : line.substr(tab2 + 1);
        if (!removed.empty()) entry.removed_at = std::stoull(removed);
        if (!entry.removed_at) folder.members.push_back(entry.id);
        folder.log.push_back(std::move(entry));
    }
    std::sort(folder.members.begin(), folder.members.end());
    folder.members.erase(std::unique(folder.members.begin(), folder.members.end()),
                         folder.members.end());
    folder.attributes["cardinality"] = std::to_string(folder.members.size());
    return folder;
}

std::vector<std::string> list_saved_folders(const std::string& dir) {
    std::vector<std::string> names;
    if (!fs::exists(dir)) return names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        auto path = entry.path();
        if (path.extension() == ".json") names.push_back(path.stem().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace procgraph
