#pragma once

#include "procgraph/graph.hpp"
#include "procgraph/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace procgraph {

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t triples_emitted = 0;
    std::size_t rows_rejected = 0;
    std::vector<std::pair<std::size_t, std::string>> rejects;  // (line number, reason)

    std::size_t rows_accepted() const { return rows_read - rows_rejected; }
};

// One triple per line: subject<TAB>predicate<TAB>object. Literals quoted with
// '"', blank nodes prefixed '_:', attribute predicates begin '@'. '#' starts
// a comment line.
std::optional<Triple> parse_triple_line(std::string_view line, std::string* error = nullptr);
std::string format_triple_line(const Triple& t);

std::pair<ErGraph, IngestReport> load_triple_file(const std::string& path,
                                                  GraphBuildOptions opts = {});
std::pair<ErGraph, IngestReport> load_triples_text(std::string_view text,
                                                   GraphBuildOptions opts = {});
// Strict read without graph construction (snapshot delta files); an empty
// file is an empty vector, malformed lines throw MalformedTriple.
std::vector<Triple> read_triples(const std::string& path);
void export_triple_file(const ErGraph& g, const std::string& path);
std::string export_triples_text(const ErGraph& g);

struct EventLogRow {
    std::string event_id;
    InstantMs timestamp = 0;
    std::string actor;
    std::string activity;
    std::map<std::string, std::string> extra;
};

// Column mapping for CSV event logs; loadable from a key=value config file
// with keys col.event_id, col.timestamp, col.actor, col.activity, timefmt.
struct EventLogMapping {
    std::string event_id_column = "event_id";
    std::string timestamp_column = "timestamp";
    std::string actor_column = "actor";
    std::string activity_column = "activity";
    std::string timefmt = "iso8601";  // or "epochms"

    static EventLogMapping from_file(const std::string& path);
    static EventLogMapping from_text(std::string_view text);
};

// Emits per accepted row: the event node's @type/@timestamp/@activity
// attributes, one actor->performed->event edge, and one attribute per extra
// column. Events are not auto-linked; correlation is a query.
std::pair<ErGraph, IngestReport> load_event_log(const std::string& path,
                                                const EventLogMapping& mapping,
                                                GraphBuildOptions opts = {});
std::pair<ErGraph, IngestReport> load_event_log_text(std::string_view text,
                                                     const EventLogMapping& mapping,
                                                     GraphBuildOptions opts = {});

// New snapshot with `happened-before` edges forming the covering relation of
// the timestamp order over the scoped events (ties by event id). Scope is the
// whole graph when `scope` is empty.
ErGraph emit_time_order_edges(const ErGraph& g, const std::vector<NodeId>& scope = {});

}  // namespace procgraph
