#include "procgraph/session.hpp"

#include "procgraph/errors.hpp"
#include "procgraph/parser.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace procgraph {

namespace fs = std::filesystem;
using nlohmann::json;

std::string StatementResult::render(OutputFormat format) const {
    if (format == OutputFormat::Json) {
        json j;
        switch (kind) {
            case Kind::Rows: {
                j["kind"] = "rows";
                j["columns"] = columns;
                j["rows"] = rows;
                break;
            }
            case Kind::Paths: {
                j["kind"] = "paths";
                json list = json::array();
                for (const auto& [label, text] : paths) {
                    json p;
                    if (!label.empty()) p["id"] = label;
                    p["path"] = text;
                    list.push_back(std::move(p));
                }
                j["paths"] = std::move(list);
                if (!stored_as.empty()) j["stored_as"] = stored_as;
                break;
            }
            case Kind::Folders: {
                j["kind"] = "folders";
                json list = json::array();
                for (const auto& f : folders)
                    list.push_back({{"name", f.name}, {"cardinality", f.cardinality}});
                j["folders"] = std::move(list);
                break;
            }
            case Kind::Message: {
                j["kind"] = "message";
                j["message"] = message;
                break;
            }
        }
        return j.dump() + "\n";
    }

    std::ostringstream out;
    switch (kind) {
        case Kind::Rows: {
            for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "\t" : "") << columns[i];
            out << '\n';
            for (const auto& row : rows) {
                for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << row[i];
                out << '\n';
            }
            break;
        }
        case Kind::Paths: {
            for (const auto& [label, text] : paths) {
                if (!label.empty()) out << label << '\t';
                out << text << '\n';
            }
            if (!stored_as.empty()) out << "stored as " << stored_as << '\n';
            break;
        }
        case Kind::Folders: {
            for (const auto& f : folders) out << f.name << '\t' << f.cardinality << '\n';
            break;
        }
        case Kind::Message: {
            if (!message.empty()) out << message << '\n';
            break;
        }
    }
    return out.str();
}

Session::Session(SessionOptions opts)
    : opts_(std::move(opts)),
      registry_(AlgorithmRegistry::with_builtins()),
      catalog_(GraphBuildOptions{opts_.allow_cycles}) {
    if (!opts_.catalog_dir.empty()) load_catalog();
}

ExecOptions Session::exec_options() const {
    ExecOptions exec;
    exec.parallelism = opts_.parallelism;
    exec.timeout_secs = opts_.timeout_secs;
    return exec;
}

std::uint64_t Session::load_triples(const std::string& path, IngestReport* report) {
    auto [graph, rep] = load_triple_file(path, GraphBuildOptions{opts_.allow_cycles});
    if (report) *report = rep;
    auto id = catalog_.commit_graph(std::move(graph));
    if (!opts_.catalog_dir.empty()) save_catalog();
    return id;
}

std::uint64_t Session::load_event_log(const std::string& path, const EventLogMapping& mapping,
                                      IngestReport* report) {
    auto [graph, rep] = procgraph::load_event_log(path, mapping,
                                                  GraphBuildOptions{opts_.allow_cycles});
    if (report) *report = rep;
    auto id = catalog_.commit_graph(std::move(graph));
    if (!opts_.catalog_dir.empty()) save_catalog();
    return id;
}

StatementResult Session::execute(std::string_view statement_text) {
    return execute(parse(statement_text));
}

StatementResult Session::execute(const Statement& stmt) {
    if (const auto* e = std::get_if<EntityStmt>(&stmt.node)) return run_entity(*e);
    if (const auto* c = std::get_if<CorrelationStmt>(&stmt.node)) return run_correlation(*c);
    if (const auto* r = std::get_if<RelationshipStmt>(&stmt.node)) return run_relationship(*r);
    if (const auto* m = std::get_if<MetadataStmt>(&stmt.node)) return run_metadata(*m);
    return run_select(std::get<SelectStmt>(stmt.node));
}

LogicalPlan Session::plan_for(const SelectStmt& stmt) const {
    AlgebraTree tree = build_algebra(stmt, opts_.allow_product);
    GraphStats stats = GraphStats::of(*graph());
    PlanOptions plan_opts;
    plan_opts.allow_product = opts_.allow_product;
    plan_opts.pushdown = opts_.pushdown;
    return compile_plan(tree, &stats, plan_opts);
}

std::string Session::explain(std::string_view statement_text) {
    Statement stmt = parse(statement_text);
    if (const auto* e = std::get_if<EntityStmt>(&stmt.node))
        return procgraph::explain(plan_for(translate_entity(*e)));
    if (const auto* s = std::get_if<SelectStmt>(&stmt.node))
        return procgraph::explain(plan_for(*s));
    throw Error("explain supports entity and select statements");
}

StatementResult Session::run_select(const SelectStmt& stmt) {
    StatementResult result;
    result.kind = StatementResult::Kind::Rows;
    auto snapshot = graph();
    BindingTable table = procgraph::execute(plan_for(stmt), *snapshot, exec_options(),
                                            &result.stats);
    result.columns = table.columns;
    for (const auto& row : table.rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (const NodeId& v : row) cells.push_back(v.id);
        result.rows.push_back(std::move(cells));
    }
    return result;
}

StatementResult Session::run_entity(const EntityStmt& stmt) {
    return run_select(translate_entity(stmt));
}

CorrelationPredicateFn Session::predicate_for(const CorrelationCondition& cond) const {
    if (cond.kind != CorrelationCondition::Kind::Registered) return {};
    const CorrelationPredicateFn* fn =
        registry_.find_correlation_predicate(cond.registered_name);
    if (!fn) throw UnknownRegisteredCondition(cond.registered_name);
    return *fn;
}

StatementResult Session::run_correlation(const CorrelationStmt& stmt) {
    CorrelationCondition cond;
    if (stmt.cond == CorrelationStmt::CondKind::AttrEquality) {
        cond.kind = CorrelationCondition::Kind::AttrEquality;
        cond.attr_x = stmt.attr_x;
        cond.attr_y = stmt.attr_y;
    } else {
        cond.kind = CorrelationCondition::Kind::Registered;
        cond.registered_name = stmt.registered_name;
    }

    std::string prefix = stmt.into ? *stmt.into + ":" : "";
    auto snapshot = graph();
    auto folders = partition_by_correlation(*snapshot, cond, prefix, predicate_for(cond));

    StatementResult result;
    result.kind = StatementResult::Kind::Folders;
    std::uint64_t snapshot_id = current_snapshot();
    for (FolderNode& f : folders) {
        f.timed = stmt.timed;
        f.snapshot_id = snapshot_id;
        f.attributes["snapshot"] = std::to_string(snapshot_id);
        if (f.timed)
            for (const NodeId& id : f.members) f.log.push_back({id, snapshot_id, std::nullopt});
        result.folders.push_back({f.name, f.members.size()});
        catalog_.folders().replace(std::move(f));
    }
    if (!opts_.catalog_dir.empty()) save_catalog();
    return result;
}

StatementResult Session::run_relationship(const RelationshipStmt& stmt) {
    auto snapshot = graph();
    StatementResult result;
    result.kind = StatementResult::Kind::Paths;

    if (stmt.into) {
        PathNodeSpec spec;
        spec.name = *stmt.into;
        spec.regex_source = stmt.regex_source;
        spec.timed = stmt.timed;
        const PathNode& node =
            catalog_.path_nodes().materialize(spec, *snapshot, current_snapshot());
        for (const Path& p : node.current_paths()) result.paths.emplace_back("", format_path(p));
        result.stored_as = spec.name;
        return result;
    }

    FindPathsOptions find_opts;
    if (snapshot->cycles_allowed()) find_opts.max_hops = 16;
    auto paths = find_paths(*snapshot, PathRegex::compile(stmt.regex_source), find_opts);
    for (const Path& p : paths) result.paths.emplace_back("", format_path(p));
    return result;
}

StatementResult Session::run_metadata(const MetadataStmt& stmt) {
    MetadataRequest req = translate_metadata(stmt);
    auto snapshot = graph();
    MetadataResult meta =
        procgraph::run_metadata(*snapshot, req, &catalog_.path_nodes(), current_snapshot());

    StatementResult result;
    switch (meta.mode) {
        case MetadataMode::Evolution: {
            result.kind = StatementResult::Kind::Paths;
            for (const auto& [label, p] : meta.paths)
                result.paths.emplace_back(label, format_path(p));
            result.stored_as = "evolutionOf:" + req.target.id;
            break;
        }
        case MetadataMode::Derivation: {
            result.kind = StatementResult::Kind::Rows;
            result.columns = {"ancestor"};
            for (const NodeId& a : meta.ancestors) result.rows.push_back({a.id});
            break;
        }
        case MetadataMode::Timeseries: {
            result.kind = StatementResult::Kind::Rows;
            result.columns = {"snapshot", "at"};
            for (const auto& s : meta.series)
                result.rows.push_back({s.id.id, format_instant(s.at)});
            break;
        }
    }
    return result;
}

StatementResult Session::refresh_folder(const std::string& name) {
    const FolderNode* folder = catalog_.folders().find(name);
    if (!folder) throw UnknownEntity("folder " + name);
    if (!folder->timed) throw Error("folder " + name + " is not timed");

    CorrelationPredicateFn predicate;
    if (const auto* cond = std::get_if<CorrelationCondition>(&folder->defining_query))
        predicate = predicate_for(*cond);

    FolderNode updated =
        refresh_timed_folder(*folder, *graph(), current_snapshot(), predicate);
    const FolderNode& stored = catalog_.folders().replace(std::move(updated));
    if (!opts_.catalog_dir.empty()) save_catalog();

    StatementResult result;
    result.kind = StatementResult::Kind::Folders;
    result.folders.push_back({stored.name, stored.members.size()});
    return result;
}

namespace {

std::string snapshot_file(std::uint64_t id, const char* suffix) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%08llu.%s.tsv", static_cast<unsigned long long>(id),
                  suffix);
    return buf;
}

void write_triples(const std::vector<Triple>& triples, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const Triple& t : triples) out << format_triple_line(t) << '\n';
}

}  // namespace

// Snapshots persist as per-commit add/del triple files plus index.json, so a
// later process replays the same chain and keeps the same ids.
void Session::save_catalog() const {
    if (opts_.catalog_dir.empty()) return;
    fs::path dir(opts_.catalog_dir);
    fs::create_directories(dir / "folders");
    fs::create_directories(dir / "snapshots");

    for (const auto& name : catalog_.folders().names())
        save_folder(*catalog_.folders().find(name), (dir / "folders").string());

    json index = json::array();
    for (const SnapshotInfo& info : catalog_.history()) {
        json j;
        j["id"] = info.id;
        j["created_at"] = info.created_at;
        j["parent"] = info.parent;
        j["added"] = info.added;
        j["removed"] = info.removed;
        j["triples"] = info.triple_count;
        index.push_back(std::move(j));
        if (info.id == 0) continue;
        auto add_path = dir / "snapshots" / snapshot_file(info.id, "add");
        if (fs::exists(add_path)) continue;  // snapshots are immutable once written
        auto prev = catalog_.graph(info.parent);
        auto cur = catalog_.graph(info.id);
        std::vector<Triple> added, removed;
        std::set_difference(cur->triples().begin(), cur->triples().end(),
                            prev->triples().begin(), prev->triples().end(),
                            std::back_inserter(added));
        std::set_difference(prev->triples().begin(), prev->triples().end(),
                            cur->triples().begin(), cur->triples().end(),
                            std::back_inserter(removed));
        write_triples(added, add_path);
        write_triples(removed, dir / "snapshots" / snapshot_file(info.id, "del"));
    }
    std::ofstream idx(dir / "snapshots" / "index.json", std::ios::binary);
    if (!idx) throw IoError("cannot write snapshot index");
    idx << index.dump(2) << '\n';
}

void Session::load_catalog() {
    fs::path dir(opts_.catalog_dir);
    auto index_path = dir / "snapshots" / "index.json";
    if (fs::exists(index_path)) {
        std::ifstream in(index_path, std::ios::binary);
        json index = json::parse(in);
        for (const auto& j : index) {
            std::uint64_t id = j.value("id", 0ull);
            if (id == 0) continue;
            auto adds = read_triples((dir / "snapshots" / snapshot_file(id, "add")).string());
            auto dels = read_triples((dir / "snapshots" / snapshot_file(id, "del")).string());
            catalog_.commit(std::move(adds), std::move(dels));
        }
    }
    auto folder_dir = (dir / "folders").string();
    for (const auto& name : list_saved_folders(folder_dir)) {
        FolderNode folder = load_folder(folder_dir, name);
        catalog_.folders().replace(std::move(folder));
    }
}

}  // namespace procgraph
