#include "procgraph/errors.hpp"
#include "procgraph/ingest.hpp"
#include "procgraph/parser.hpp"
#include "procgraph/session.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace procgraph;

struct GlobalFlags {
    std::string graph_file;
    std::string log_file;
    std::string map_file;
    std::string format = "tsv";
    int parallelism = 1;
    bool allow_cycles = false;
    bool allow_product = false;
    double timeout = 0;
    std::string catalog_dir;
};

SessionOptions session_options(const GlobalFlags& flags) {
    SessionOptions opts;
    opts.allow_cycles = flags.allow_cycles;
    opts.allow_product = flags.allow_product;
    opts.parallelism = flags.parallelism;
    opts.timeout_secs = flags.timeout;
    opts.format = flags.format == "json" ? OutputFormat::Json : OutputFormat::Tsv;
    opts.catalog_dir = flags.catalog_dir;
    return opts;
}

void load_sources(Session& session, const GlobalFlags& flags) {
    if (!flags.graph_file.empty()) session.load_triples(flags.graph_file);
    if (!flags.log_file.empty()) {
        EventLogMapping mapping;
        if (!flags.map_file.empty()) mapping = EventLogMapping::from_file(flags.map_file);
        session.load_event_log(flags.log_file, mapping);
    }
}

void print_report(const IngestReport& report) {
    std::cout << "rows_read\t" << report.rows_read << "\n"
              << "rows_accepted\t" << report.rows_accepted() << "\n"
              << "rows_rejected\t" << report.rows_rejected << "\n"
              << "triples_emitted\t" << report.triples_emitted << "\n";
    for (const auto& [line, reason] : report.rejects)
        std::cerr << "line " << line << ": " << reason << "\n";
}

int run_statements(Session& session, const std::string& script) {
    for (const std::string& text : split_statements(script)) {
        try {
            StatementResult result = session.execute(text);
            std::cout << result.render(session.options().format);
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    return 0;
}

int cmd_query(const GlobalFlags& flags, const std::string& stmt_file) {
    Session session(session_options(flags));
    load_sources(session, flags);
    std::ifstream in(stmt_file, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open " << stmt_file << "\n";
        return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return run_statements(session, buf.str());
}

int cmd_explain(const GlobalFlags& flags, const std::string& statement) {
    Session session(session_options(flags));
    load_sources(session, flags);
    try {
        std::cout << session.explain(statement);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

// \load, \folders, \paths, \explain, \format, \quit plus statements.
int cmd_repl(const GlobalFlags& flags) {
    Session session(session_options(flags));
    load_sources(session, flags);

    std::filesystem::path history_path =
        flags.catalog_dir.empty() ? std::filesystem::path(".procgraph_history")
                                  : std::filesystem::path(flags.catalog_dir) / "history";
    std::ofstream history(history_path, std::ios::app);

    std::string buffer;
    auto brace_depth = [](const std::string& s) {
        int depth = 0;
        char quote = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            char c = s[i];
            if (quote) {
                if (c == '\\') ++i;
                else if (c == quote) quote = 0;
            } else if (c == '\'' || c == '"') quote = c;
            else if (c == '{') ++depth;
            else if (c == '}') --depth;
        }
        return depth;
    };
    auto run_buffer = [&] {
        if (buffer.find_first_not_of(" \t\r\n") == std::string::npos) {
            buffer.clear();
            return;
        }
        history << buffer << "\n";
        history.flush();
        try {
            StatementResult result = session.execute(buffer);
            std::cout << result.render(session.options().format);
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
        }
        buffer.clear();
    };

    std::string line;
    std::cerr << "procgraph> " << std::flush;
    while (std::getline(std::cin, line)) {
        std::string trimmed = line;
        while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\r'))
            trimmed.pop_back();

        if (!trimmed.empty() && trimmed[0] == '\\' && buffer.empty()) {
            history << trimmed << "\n";
            history.flush();
            std::istringstream cmd(trimmed);
            std::string name, arg;
            cmd >> name;
            std::getline(cmd, arg);
            if (!arg.empty() && arg.front() == ' ') arg.erase(0, arg.find_first_not_of(' '));
            try {
                if (name == "\\quit" || name == "\\q") {
                    return 0;
                } else if (name == "\\load") {
                    IngestReport report;
                    session.load_triples(arg, &report);
                    std::cout << "snapshot " << session.current_snapshot() << ": "
                              << report.triples_emitted << " triples\n";
                } else if (name == "\\folders") {
                    for (const auto& fname : session.catalog().folders().names())
                        std::cout << fname << '\t'
                                  << session.catalog().folders().find(fname)->members.size()
                                  << "\n";
                } else if (name == "\\paths") {
                    for (const auto& pname : session.catalog().path_nodes().names())
                        std::cout << pname << '\t'
                                  << session.catalog()
                                         .path_nodes()
                                         .find(pname)
                                         ->current_paths()
                                         .size()
                                  << "\n";
                } else if (name == "\\explain") {
                    std::cout << session.explain(arg);
                } else if (name == "\\format") {
                    if (arg == "json") session.options().format = OutputFormat::Json;
                    else if (arg == "tsv") session.options().format = OutputFormat::Tsv;
                    else std::cerr << "error: unknown format '" << arg << "'\n";
                } else if (name == "\\refresh") {
                    StatementResult result = session.refresh_folder(arg);
                    std::cout << result.render(session.options().format);
                } else {
                    std::cerr << "error: unknown command " << name << "\n";
                }
            } catch (const Error& e) {
                std::cerr << "error: " << e.what() << "\n";
            }
            std::cerr << "procgraph> " << std::flush;
            continue;
        }

        buffer += line;
        buffer += '\n';
        bool complete = false;
        if (brace_depth(buffer) <= 0) {
            if (trimmed.empty()) complete = true;
            if (!trimmed.empty() && trimmed.back() == ';') complete = true;
        }
        if (complete) {
            // strip one trailing ';'
            auto pos = buffer.find_last_of(';');
            if (pos != std::string::npos && brace_depth(buffer.substr(0, pos)) <= 0)
                buffer.erase(pos, 1);
            run_buffer();
            std::cerr << "procgraph> " << std::flush;
        }
    }
    run_buffer();
    return 0;
}

int cmd_snapshot_list(const GlobalFlags& flags) {
    Session session(session_options(flags));
    std::cout << "id\tcreated_at\tparent\tadded\tremoved\ttriples\n";
    for (const SnapshotInfo& info : session.catalog().history())
        std::cout << info.id << '\t' << format_instant(info.created_at) << '\t' << info.parent
                  << '\t' << info.added << '\t' << info.removed << '\t' << info.triple_count
                  << "\n";
    return 0;
}

int cmd_snapshot_commit(const GlobalFlags& flags, const std::string& add_file,
                        const std::string& remove_file) {
    Session session(session_options(flags));
    std::vector<Triple> adds, dels;
    if (!add_file.empty()) adds = read_triples(add_file);
    if (!remove_file.empty()) dels = read_triples(remove_file);
    auto id = session.catalog().commit(std::move(adds), std::move(dels));
    session.save_catalog();
    std::cout << "snapshot " << id << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"process-graph query engine"};
    app.require_subcommand(1);

    GlobalFlags flags;
    if (const char* env = std::getenv("PROCGRAPH_CATALOG")) flags.catalog_dir = env;
    app.add_option("--graph", flags.graph_file, "triple file to load");
    app.add_option("--log", flags.log_file, "CSV event log to load");
    app.add_option("--map", flags.map_file, "event log column mapping (key=value file)");
    app.add_option("--format", flags.format, "output format")
        ->check(CLI::IsMember({"tsv", "json"}));
    app.add_option("--parallelism", flags.parallelism, "worker count");
    app.add_flag("--allow-cycles", flags.allow_cycles,
                 "accept cyclic graphs (bounded path search)");
    app.add_flag("--allow-product", flags.allow_product, "allow cartesian-product joins");
    app.add_option("--timeout", flags.timeout, "query wall-clock cap in seconds");
    app.add_option("--catalog", flags.catalog_dir, "catalog directory")
        ->envname("PROCGRAPH_CATALOG");

    auto* ingest = app.add_subcommand("ingest", "load and validate inputs");
    ingest->require_subcommand(1);
    std::string ingest_file, ingest_out, ingest_map;
    auto* ingest_triples = ingest->add_subcommand("triples", "load a triple file");
    ingest_triples->add_option("file", ingest_file, "triple file")->required();
    ingest_triples->add_option("--out", ingest_out, "re-export the loaded graph");
    auto* ingest_log = ingest->add_subcommand("log", "load a CSV event log");
    ingest_log->add_option("file", ingest_file, "event log")->required();
    ingest_log->add_option("--map", ingest_map, "column mapping file");
    ingest_log->add_option("--out", ingest_out, "re-export the loaded graph");

    std::string stmt_file;
    auto* query = app.add_subcommand("query", "run a statement file");
    query->add_option("file", stmt_file, "statement file")->required();

    std::string explain_stmt;
    auto* explain_cmd = app.add_subcommand("explain", "print the logical plan");
    explain_cmd->add_option("statement", explain_stmt, "entity or select statement")
        ->required();

    auto* repl = app.add_subcommand("repl", "interactive shell");

    auto* snapshot = app.add_subcommand("snapshot", "snapshot catalog");
    snapshot->require_subcommand(1);
    auto* snap_list = snapshot->add_subcommand("list", "list snapshots");
    std::string add_file, remove_file;
    auto* snap_commit = snapshot->add_subcommand("commit", "commit a triple delta");
    snap_commit->add_option("--add", add_file, "triples to add");
    snap_commit->add_option("--remove", remove_file, "triples to remove");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (ingest_triples->parsed() || ingest_log->parsed()) {
            Session session(session_options(flags));
            IngestReport report;
            if (ingest_triples->parsed()) {
                session.load_triples(ingest_file, &report);
            } else {
                EventLogMapping mapping;
                if (!ingest_map.empty()) mapping = EventLogMapping::from_file(ingest_map);
                else if (!flags.map_file.empty())
                    mapping = EventLogMapping::from_file(flags.map_file);
                session.load_event_log(ingest_file, mapping, &report);
            }
            print_report(report);
            if (!ingest_out.empty()) export_triple_file(*session.graph(), ingest_out);
            return 0;
        }
        if (query->parsed()) return cmd_query(flags, stmt_file);
        if (explain_cmd->parsed()) return cmd_explain(flags, explain_stmt);
        if (repl->parsed()) return cmd_repl(flags);
        if (snap_list->parsed()) return cmd_snapshot_list(flags);
        if (snap_commit->parsed()) return cmd_snapshot_commit(flags, add_file, remove_file);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
