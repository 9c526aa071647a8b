#include "procgraph/errors.hpp"
#include "procgraph/graph.hpp"
#include "procgraph/ingest.hpp"
#include "procgraph/metadata.hpp"
#include "procgraph/parser.hpp"
#include "procgraph/path.hpp"
#include "procgraph/plan.hpp"
#include "procgraph/session.hpp"
#include "procgraph/summarize.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace procgraph;

namespace {

py::dict result_to_dict(const StatementResult& result) {
    py::dict out;
    switch (result.kind) {
        case StatementResult::Kind::Rows: {
            out["kind"] = "rows";
            out["columns"] = result.columns;
            out["rows"] = result.rows;
            break;
        }
        case StatementResult::Kind::Paths: {
            out["kind"] = "paths";
            py::list paths;
            for (const auto& [label, text] : result.paths) {
                py::dict p;
                if (!label.empty()) p["id"] = label;
                p["path"] = text;
                paths.append(std::move(p));
            }
            out["paths"] = std::move(paths);
            if (!result.stored_as.empty()) out["stored_as"] = result.stored_as;
            break;
        }
        case StatementResult::Kind::Folders: {
            out["kind"] = "folders";
            py::list folders;
            for (const auto& f : result.folders) {
                py::dict d;
                d["name"] = f.name;
                d["cardinality"] = f.cardinality;
                folders.append(std::move(d));
            }
            out["folders"] = std::move(folders);
            break;
        }
        case StatementResult::Kind::Message: {
            out["kind"] = "message";
            out["message"] = result.message;
            break;
        }
    }
    return out;
}

EventLogMapping mapping_from_dict(const py::dict& d) {
    EventLogMapping m;
    if (d.contains("event_id")) m.event_id_column = py::cast<std::string>(d["event_id"]);
    if (d.contains("timestamp")) m.timestamp_column = py::cast<std::string>(d["timestamp"]);
    if (d.contains("actor")) m.actor_column = py::cast<std::string>(d["actor"]);
    if (d.contains("activity")) m.activity_column = py::cast<std::string>(d["activity"]);
    if (d.contains("timefmt")) m.timefmt = py::cast<std::string>(d["timefmt"]);
    return m;
}

}  // namespace

PYBIND11_MODULE(_procgraph, m) {
    m.doc() = "process-graph query engine";

    py::register_exception<Error>(m, "ProcGraphError");

    py::class_<ErGraph, std::shared_ptr<ErGraph>>(m, "Graph")
        .def_property_readonly("node_count", &ErGraph::node_count)
        .def_property_readonly("triple_count", &ErGraph::triple_count)
        .def_property_readonly("edge_count", &ErGraph::relationship_edge_count)
        .def("neighbors",
             [](const ErGraph& g, const std::string& node, const std::string& direction,
                const std::optional<std::string>& predicate) {
                 auto dir = direction == "in" ? ErGraph::Direction::In
                                              : ErGraph::Direction::Out;
                 std::vector<std::pair<std::string, std::string>> out;
                 for (auto& [pred, other] : g.neighbors(NodeId::uri(node), dir, predicate))
                     out.emplace_back(pred.id, other.id);
                 return out;
             },
             py::arg("node"), py::arg("direction") = "out",
             py::arg("predicate") = std::nullopt)
        .def("entity",
             [](const ErGraph& g, const std::string& id) {
                 EntityRecord rec = g.get_entity(NodeId::uri(id));
                 py::dict out;
                 out["id"] = rec.id.id;
                 out["type"] = rec.entity_type;
                 out["attributes"] = rec.attributes;
                 return out;
             })
        .def("export_text", &export_triples_text);

    m.def(
        "load_triples",
        [](const std::string& path, bool allow_cycles) {
            auto [g, report] = load_triple_file(path, GraphBuildOptions{allow_cycles});
            return std::make_shared<ErGraph>(std::move(g));
        },
        py::arg("path"), py::arg("allow_cycles") = false);

    m.def(
        "parse_triples",
        [](const std::string& text, bool allow_cycles) {
            auto [g, report] = load_triples_text(text, GraphBuildOptions{allow_cycles});
            return std::make_shared<ErGraph>(std::move(g));
        },
        py::arg("text"), py::arg("allow_cycles") = false);

    m.def(
        "find_paths",
        [](std::shared_ptr<ErGraph> g, const std::string& regex,
           std::optional<std::size_t> limit, std::optional<std::size_t> max_hops) {
            FindPathsOptions opts;
            opts.limit = limit;
            opts.max_hops = max_hops;
            std::vector<std::string> out;
            for (const Path& p : find_paths(*g, PathRegex::compile(regex), opts))
                out.push_back(format_path(p));
            return out;
        },
        py::arg("graph"), py::arg("regex"), py::arg("limit") = std::nullopt,
        py::arg("max_hops") = std::nullopt);

    m.def(
        "is_reachable",
        [](std::shared_ptr<ErGraph> g, const std::string& from, const std::string& to,
           const std::optional<std::string>& regex) {
            if (!regex) return is_reachable(*g, NodeId::uri(from), NodeId::uri(to));
            PathRegex compiled = PathRegex::compile(*regex);
            return is_reachable(*g, NodeId::uri(from), NodeId::uri(to), &compiled);
        },
        py::arg("graph"), py::arg("from_node"), py::arg("to_node"),
        py::arg("regex") = std::nullopt);

    py::class_<Session>(m, "Session")
        .def(py::init([](bool allow_cycles, bool allow_product, int parallelism,
                         double timeout, const std::string& catalog_dir) {
                 SessionOptions opts;
                 opts.allow_cycles = allow_cycles;
                 opts.allow_product = allow_product;
                 opts.parallelism = parallelism;
                 opts.timeout_secs = timeout;
                 opts.catalog_dir = catalog_dir;
                 return std::make_unique<Session>(opts);
             }),
             py::arg("allow_cycles") = false, py::arg("allow_product") = false,
             py::arg("parallelism") = 1, py::arg("timeout") = 0.0,
             py::arg("catalog_dir") = "")
        .def("load_triples",
             [](Session& s, const std::string& path) { return s.load_triples(path); })
        .def("load_triples_text",
             [](Session& s, const std::string& text) {
                 auto [g, report] = load_triples_text(
                     text, GraphBuildOptions{s.options().allow_cycles});
                 return s.catalog().commit_graph(std::move(g));
             })
        .def(
            "load_event_log",
            [](Session& s, const std::string& path, const py::dict& mapping) {
                return s.load_event_log(path, mapping_from_dict(mapping));
            },
            py::arg("path"), py::arg("mapping") = py::dict())
        .def("execute",
             [](Session& s, const std::string& text) { return result_to_dict(s.execute(text)); })
        .def("explain", [](Session& s, const std::string& text) { return s.explain(text); })
        .def("graph", [](const Session& s) {
            return std::make_shared<ErGraph>(*s.graph());
        })
        .def_property_readonly("snapshot", &Session::current_snapshot)
        .def("pin_snapshot",
             [](Session& s, std::optional<std::uint64_t> id) { s.pin_snapshot(id); })
        .def("commit",
             [](Session& s, const std::string& add_text, const std::string& remove_text) {
                 std::vector<Triple> adds, dels;
                 for (const std::string& chunk : {add_text, remove_text}) (void)chunk;
                 auto parse_lines = [](const std::string& text) {
                     std::vector<Triple> out;
                     std::size_t pos = 0, line_no = 0;
                     while (pos <= text.size()) {
                         auto nl = text.find('\n', pos);
                         std::string line = text.substr(
                             pos, nl == std::string::npos ? text.size() - pos : nl - pos);
                         pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
                         ++line_no;
                         if (line.empty() || line[0] == '#') continue;
                         std::string error;
                         auto t = parse_triple_line(line, &error);
                         if (!t) throw MalformedTriple(line_no, error);
                         out.push_back(std::move(*t));
                     }
                     return out;
                 };
                 adds = parse_lines(add_text);
                 dels = parse_lines(remove_text);
                 return s.catalog().commit(std::move(adds), std::move(dels));
             },
             py::arg("add") = "", py::arg("remove") = "")
        .def("folders",
             [](const Session& s) {
                 py::list out;
                 for (const auto& name : s.catalog().folders().names()) {
                     const FolderNode* f = s.catalog().folders().find(name);
                     py::dict d;
                     d["name"] = f->name;
                     d["members"] = [&] {
                         std::vector<std::string> ids;
                         for (const NodeId& id : f->members) ids.push_back(id.id);
                         return ids;
                     }();
                     d["timed"] = f->timed;
                     d["snapshot"] = f->snapshot_id;
                     out.append(std::move(d));
                 }
                 return out;
             })
        .def("path_nodes",
             [](const Session& s) {
                 py::list out;
                 for (const auto& name : s.catalog().path_nodes().names()) {
                     const PathNode* node = s.catalog().path_nodes().find(name);
                     py::dict d;
                     d["name"] = name;
                     std::vector<std::string> paths;
                     for (const Path& p : node->current_paths()) paths.push_back(format_path(p));
                     d["paths"] = std::move(paths);
                     out.append(std::move(d));
                 }
                 return out;
             })
        .def("refresh_folder", [](Session& s, const std::string& name) {
            return result_to_dict(s.refresh_folder(name));
        });

    m.attr("__version__") = "0.1.0";
}
