#include "procgraph/registry.hpp"

#include "procgraph/errors.hpp"

#include <algorithm>
#include <chrono>

namespace procgraph {

std::string_view to_string(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::ProcessDiscovery: return "process_discovery";
        case AlgorithmKind::CorrelationPredicate: return "correlation_predicate";
        case AlgorithmKind::Summarizer: return "summarizer";
    }
    return "?";
}

AlgorithmRegistry AlgorithmRegistry::with_builtins() {
    AlgorithmRegistry reg;
    reg.register_process_discovery("dfg", [](std::span<const ProcessInstance> instances) {
        return discover_dfg(instances);
    });
    // the attr-eq family is parameterized by attribute names and handled
    // natively by the correlation statement; the entry reserves the name
    reg.register_correlation_predicate(
        "attr-eq", [](const EntityRecord&, const EntityRecord&) -> bool {
            throw Error("attr-eq is a condition family; use the x.A = y.B syntax");
        });
    return reg;
}

void AlgorithmRegistry::check_free(AlgorithmKind kind, const std::string& name) const {
    bool taken = false;
    switch (kind) {
        case AlgorithmKind::ProcessDiscovery: taken = discovery_.count(name); break;
        case AlgorithmKind::CorrelationPredicate: taken = predicates_.count(name); break;
        case AlgorithmKind::Summarizer: taken = summarizers_.count(name); break;
    }
    if (taken)
        throw DuplicateName(std::string(to_string(kind)) + "/" + name);
}

void AlgorithmRegistry::register_process_discovery(const std::string& name,
                                                   ProcessDiscoveryFn fn) {
    check_free(AlgorithmKind::ProcessDiscovery, name);
    discovery_.emplace(name, std::move(fn));
}

void AlgorithmRegistry::register_correlation_predicate(const std::string& name,
                                                       CorrelationPredicateFn fn) {
    check_free(AlgorithmKind::CorrelationPredicate, name);
    predicates_.emplace(name, std::move(fn));
}

void AlgorithmRegistry::register_summarizer(const std::string& name, SummarizerFn fn) {
    check_free(AlgorithmKind::Summarizer, name);
    summarizers_.emplace(name, std::move(fn));
}

const ProcessDiscoveryFn* AlgorithmRegistry::find_process_discovery(
    const std::string& name) const {
    auto it = discovery_.find(name);
    return it == discovery_.end() ? nullptr : &it->second;
}

const CorrelationPredicateFn* AlgorithmRegistry::find_correlation_predicate(
    const std::string& name) const {
    auto it = predicates_.find(name);
    return it == predicates_.end() ? nullptr : &it->second;
}

const SummarizerFn* AlgorithmRegistry::find_summarizer(const std::string& name) const {
    auto it = summarizers_.find(name);
    return it == summarizers_.end() ? nullptr : &it->second;
}

std::vector<std::string> AlgorithmRegistry::names(AlgorithmKind kind) const {
    std::vector<std::string> out;
    switch (kind) {
        case AlgorithmKind::ProcessDiscovery:
            for (const auto& [name, fn] : discovery_) out.push_back(name);
            break;
        case AlgorithmKind::CorrelationPredicate:
            for (const auto& [name, fn] : predicates_) out.push_back(name);
            break;
        case AlgorithmKind::Summarizer:
            for (const auto& [name, fn] : summarizers_) out.push_back(name);
            break;
    }
    return out;
}

namespace {

InstantMs now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

SnapshotCatalog::SnapshotCatalog(GraphBuildOptions opts) : build_opts_(opts) {
    Entry root;
    root.info.id = 0;
    root.info.created_at = now_ms();
    root.full = std::make_shared<const ErGraph>(ErGraph::build({}, opts));
    entries_.push_back(std::move(root));
}

std::uint64_t SnapshotCatalog::latest() const {
    std::lock_guard lock(mutex_);
    return entries_.back().info.id;
}

std::shared_ptr<const ErGraph> SnapshotCatalog::materialize_locked(std::uint64_t id) const {
    if (id >= entries_.size()) throw Error("unknown snapshot " + std::to_string(id));
    if (entries_[id].dropped) throw Error("snapshot " + std::to_string(id) + " was dropped");
    if (entries_[id].full) return entries_[id].full;

    std::uint64_t base = id;
    while (!entries_[base].full) --base;
    std::vector<Triple> triples = entries_[base].full->triples();
    for (std::uint64_t k = base + 1; k <= id; ++k) {
        const Entry& e = entries_[k];
        if (!e.removals.empty()) {
            std::vector<Triple> sorted_removals = e.removals;
            std::sort(sorted_removals.begin(), sorted_removals.end());
            triples.erase(std::remove_if(triples.begin(), triples.end(),
                                         [&](const Triple& t) {
                                             return std::binary_search(sorted_removals.begin(),
                                                                       sorted_removals.end(), t);
                                         }),
                          triples.end());
        }
        triples.insert(triples.end(), e.additions.begin(), e.additions.end());
    }
    return std::make_shared<const ErGraph>(ErGraph::build(std::move(triples), build_opts_));
}

std::shared_ptr<const ErGraph> SnapshotCatalog::graph(std::uint64_t id) const {
    std::lock_guard lock(mutex_);
    return materialize_locked(id);
}

std::uint64_t SnapshotCatalog::commit(std::vector<Triple> additions,
                                      std::vector<Triple> removals) {
    std::lock_guard lock(mutex_);
    auto base = materialize_locked(entries_.back().info.id);

    std::vector<Triple> triples = base->triples();
    std::sort(removals.begin(), removals.end());
    if (!removals.empty())
        triples.erase(std::remove_if(triples.begin(), triples.end(),
                                     [&](const Triple& t) {
                                         return std::binary_search(removals.begin(),
                                                                   removals.end(), t);
                                     }),
                      triples.end());
    triples.insert(triples.end(), additions.begin(), additions.end());
    auto graph = std::make_shared<const ErGraph>(ErGraph::build(std::move(triples), build_opts_));

    Entry e;
    e.info.id = entries_.back().info.id + 1;
    e.info.parent = entries_.back().info.id;
    e.info.created_at = now_ms();
    e.info.added = additions.size();
    e.info.removed = removals.size();
    e.info.triple_count = graph->triple_count();
    e.additions = std::move(additions);
    e.removals = std::move(removals);
    e.full = std::move(graph);  // the tip stays materialized

    // previous tip keeps its cache only at compaction bases; deltas replay
    // the rest on demand
    Entry& prev = entries_.back();
    if (prev.info.id != 0 && prev.info.id % kCompactionThreshold != 0) prev.full.reset();
    entries_.push_back(std::move(e));
    return entries_.back().info.id;
}

std::uint64_t SnapshotCatalog::commit_graph(ErGraph g) {
    std::lock_guard lock(mutex_);
    Entry e;
    e.info.id = entries_.back().info.id + 1;
    e.info.parent = entries_.back().info.id;
    e.info.created_at = now_ms();
    e.info.triple_count = g.triple_count();
    auto prev = materialize_locked(entries_.back().info.id);
    // record the delta against the previous snapshot so the chain replays
    std::set_difference(g.triples().begin(), g.triples().end(), prev->triples().begin(),
                        prev->triples().end(), std::back_inserter(e.additions));
    std::set_difference(prev->triples().begin(), prev->triples().end(), g.triples().begin(),
                        g.triples().end(), std::back_inserter(e.removals));
    e.info.added = e.additions.size();
    e.info.removed = e.removals.size();
    e.full = std::make_shared<const ErGraph>(std::move(g));
    Entry& prev_tip = entries_.back();
    if (prev_tip.info.id != 0 && prev_tip.info.id % kCompactionThreshold != 0)
        prev_tip.full.reset();
    entries_.push_back(std::move(e));
    return entries_.back().info.id;
}

std::vector<SnapshotInfo> SnapshotCatalog::history() const {
    std::lock_guard lock(mutex_);
    std::vector<SnapshotInfo> out;
    out.reserve(entries_.size());
    for (const Entry& e : entries_) out.push_back(e.info);
    return out;
}

void SnapshotCatalog::drop_snapshot(std::uint64_t id, const FolderCatalog& folders) {
    std::lock_guard lock(mutex_);
    if (id >= entries_.size()) throw Error("unknown snapshot " + std::to_string(id));
    for (const auto& name : folders.names())
        if (folders.find(name)->snapshot_id == id)
            throw Error("snapshot " + std::to_string(id) + " is pinned by folder " + name);
    if (id == entries_.back().info.id)
        throw Error("cannot drop the latest snapshot");
    entries_[id].dropped = true;
    if (id % kCompactionThreshold != 0 && id != 0) entries_[id].full.reset();
}

}  // namespace procgraph
