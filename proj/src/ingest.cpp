#include "procgraph/ingest.hpp"

#include "procgraph/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace procgraph {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool unescape(std::string_view in, std::string& out, std::string* error) {
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
        char c = in[i];
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        if (++i == in.size()) {
            if (error) *error = "dangling backslash in literal";
            return false;
        }
        switch (in[i]) {
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case '\\': out.push_back('\\'); break;
            case '"': out.push_back('"'); break;
            default:
                if (error) *error = std::string("bad escape \\") + in[i];
                return false;
        }
    }
    return true;
}

std::string escape(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (char c : in) {
        switch (c) {
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::optional<NodeId> parse_term(std::string_view field, bool allow_literal,
                                 std::string* error) {
    if (field.empty()) {
        if (error) *error = "empty field";
        return std::nullopt;
    }
    if (field.front() == '"') {
        if (!allow_literal) {
            if (error) *error = "literal not allowed here";
            return std::nullopt;
        }
        if (field.size() < 2 || field.back() != '"') {
            if (error) *error = "unterminated literal quote";
            return std::nullopt;
        }
        std::string value;
        if (!unescape(field.substr(1, field.size() - 2), value, error)) return std::nullopt;
        return NodeId::literal(std::move(value));
    }
    if (field.starts_with("_:")) {
        if (field.size() == 2) {
            if (error) *error = "empty blank node label";
            return std::nullopt;
        }
        return NodeId::blank(std::string(field.substr(2)));
    }
    return NodeId::uri(std::string(field));
}

}  // namespace

std::optional<Triple> parse_triple_line(std::string_view line, std::string* error) {
    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab1 == std::string_view::npos || tab2 == std::string_view::npos) {
        if (error) *error = "expected three tab-separated fields";
        return std::nullopt;
    }
    if (line.find('\t', tab2 + 1) != std::string_view::npos) {
        if (error) *error = "more than three fields";
        return std::nullopt;
    }
    auto s = parse_term(line.substr(0, tab1), false, error);
    if (!s) return std::nullopt;
    if (s->kind == NodeKind::Literal) {
        if (error) *error = "literal node as subject";
        return std::nullopt;
    }
    auto p_field = line.substr(tab1 + 1, tab2 - tab1 - 1);
    if (p_field.empty() || p_field.front() == '"' || p_field.starts_with("_:")) {
        if (error) *error = "predicate must be a bare uri";
        return std::nullopt;
    }
    if (p_field == "@") {
        if (error) *error = "empty attribute name";
        return std::nullopt;
    }
    auto o = parse_term(line.substr(tab2 + 1), true, error);
    if (!o) return std::nullopt;

    Triple t;
    t.subject = std::move(*s);
    t.predicate = NodeId::uri(std::string(p_field));
    t.object = std::move(*o);
    if (t.is_attribute() && t.object.kind != NodeKind::Literal) {
        if (error) *error = "attribute object must be a quoted literal";
        return std::nullopt;
    }
    if (!t.is_attribute() && t.object.kind == NodeKind::Literal) {
        if (error) *error = "relationship object cannot be a literal";
        return std::nullopt;
    }
    return t;
}

std::string format_triple_line(const Triple& t) {
    auto term = [](const NodeId& n) -> std::string {
        switch (n.kind) {
            case NodeKind::Literal: return "\"" + escape(n.id) + "\"";
            case NodeKind::Blank: return "_:" + n.id;
            case NodeKind::Uri: return n.id;
        }
        return n.id;
    };
    return term(t.subject) + "\t" + t.predicate.id + "\t" + term(t.object);
}

std::pair<ErGraph, IngestReport> load_triples_text(std::string_view text,
                                                   GraphBuildOptions opts) {
    IngestReport report;
    std::vector<Triple> triples;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                              : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        ++report.rows_read;
        std::string error;
        if (auto t = parse_triple_line(line, &error)) {
            triples.push_back(std::move(*t));
        } else {
            ++report.rows_rejected;
            report.rejects.emplace_back(line_no, error);
        }
    }
    if (report.rows_accepted() == 0) throw EmptyInput("no well-formed triples in input");
    report.triples_emitted = triples.size();
    return {ErGraph::build(std::move(triples), opts), std::move(report)};
}

std::pair<ErGraph, IngestReport> load_triple_file(const std::string& path,
                                                  GraphBuildOptions opts) {
    return load_triples_text(read_file(path), opts);
}

std::vector<Triple> read_triples(const std::string& path) {
    std::string text = read_file(path);
    std::vector<Triple> triples;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line =
            std::string_view(text).substr(pos, nl == std::string::npos ? text.size() - pos
                                                                       : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        std::string error;
        auto t = parse_triple_line(line, &error);
        if (!t) throw MalformedTriple(line_no, error);
        triples.push_back(std::move(*t));
    }
    return triples;
}

std::string export_triples_text(const ErGraph& g) {
    std::string out;
    for (const Triple& t : g.triples()) {
        out += format_triple_line(t);
        out += '\n';
    }
    return out;
}

void export_triple_file(const ErGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << export_triples_text(g);
}

EventLogMapping EventLogMapping::from_text(std::string_view text) {
    EventLogMapping m;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                              : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) continue;
        std::string key(line.substr(0, eq));
        std::string value(line.substr(eq + 1));
        if (key == "col.event_id") m.event_id_column = value;
        else if (key == "col.timestamp") m.timestamp_column = value;
        else if (key == "col.actor") m.actor_column = value;
        else if (key == "col.activity") m.activity_column = value;
        else if (key == "timefmt") m.timefmt = value;
    }
    return m;
}

EventLogMapping EventLogMapping::from_file(const std::string& path) {
    return from_text(read_file(path));
}

namespace {

// RFC-4180: quoted fields may contain commas, newlines, and doubled quotes.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"': quoted = true; any = true; break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r': break;
            case '\n':
                if (any || !field.empty() || !row.empty()) {
                    row.push_back(std::move(field));
                    field.clear();
                    rows.push_back(std::move(row));
                    row.clear();
                    any = false;
                }
                break;
            default: field.push_back(c); any = true;
        }
    }
    if (any || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::optional<InstantMs> parse_log_timestamp(const std::string& text,
                                             const std::string& timefmt) {
    if (timefmt == "epochms") {
        if (text.empty()) return std::nullopt;
        for (char c : text)
            if (!std::isdigit(static_cast<unsigned char>(c)) && c != '-') return std::nullopt;
        try {
            return std::stoll(text);
        } catch (...) {
            return std::nullopt;
        }
    }
    return parse_instant(text);
}

}  // namespace

std::pair<ErGraph, IngestReport> load_event_log_text(std::string_view text,
                                                     const EventLogMapping& mapping,
                                                     GraphBuildOptions opts) {
    auto rows = parse_csv(text);
    if (rows.empty()) throw EmptyInput("event log has no header row");
    const auto& header = rows.front();
    auto column_of = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw MissingColumn(name);
        return static_cast<std::size_t>(it - header.begin());
    };
    std::size_t id_col = column_of(mapping.event_id_column);
    std::size_t ts_col = column_of(mapping.timestamp_column);
    std::size_t actor_col = column_of(mapping.actor_column);
    std::size_t activity_col = column_of(mapping.activity_column);

    std::vector<std::size_t> extra_cols;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (c != id_col && c != ts_col && c != actor_col && c != activity_col)
            extra_cols.push_back(c);

    IngestReport report;
    std::vector<Triple> triples;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        ++report.rows_read;
        auto reject = [&](const std::string& reason) {
            ++report.rows_rejected;
            report.rejects.emplace_back(r + 1, reason);
        };
        if (row.size() != header.size()) {
            reject("expected " + std::to_string(header.size()) + " fields, got " +
                   std::to_string(row.size()));
            continue;
        }
        if (row[id_col].empty()) {
            reject("empty event id");
            continue;
        }
        auto instant = parse_log_timestamp(row[ts_col], mapping.timefmt);
        if (!instant) {
            reject("bad timestamp '" + row[ts_col] + "'");
            continue;
        }
        NodeId event = NodeId::uri(row[id_col]);
        triples.push_back({event, NodeId::uri("@type"), NodeId::literal("event")});
        triples.push_back({event, NodeId::uri("@timestamp"),
                           NodeId::literal(format_instant(*instant))});
        triples.push_back({event, NodeId::uri("@activity"), NodeId::literal(row[activity_col])});
        triples.push_back({NodeId::uri(row[actor_col]), NodeId::uri("performed"), event});
        for (auto c : extra_cols)
            triples.push_back({event, NodeId::uri("@" + header[c]), NodeId::literal(row[c])});
    }
    if (report.rows_accepted() == 0) throw EmptyInput("no well-formed event rows in input");
    report.triples_emitted = triples.size();
    return {ErGraph::build(std::move(triples), opts), std::move(report)};
}

std::pair<ErGraph, IngestReport> load_event_log(const std::string& path,
                                                const EventLogMapping& mapping,
                                                GraphBuildOptions opts) {
    return load_event_log_text(read_file(path), mapping, opts);
}

ErGraph emit_time_order_edges(const ErGraph& g, const std::vector<NodeId>& scope) {
    std::vector<NodeId> events = scope;
    if (events.empty()) events = g.entities_of_type("event");

    std::vector<std::pair<InstantMs, NodeId>> ordered;
    ordered.reserve(events.size());
    for (const NodeId& id : events) ordered.emplace_back(g.get_event(id).timestamp, id);
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });

    std::vector<Triple> triples = g.triples();
    for (std::size_t i = 0; i + 1 < ordered.size(); ++i)
        triples.push_back({ordered[i].second, NodeId::uri("happened-before"),
                           ordered[i + 1].second});
    GraphBuildOptions opts;
    opts.allow_cycles = g.cycles_allowed();
    return ErGraph::build(std::move(triples), opts);
}

}  // namespace procgraph
