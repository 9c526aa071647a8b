#pragma once

#include "procgraph/ast.hpp"
#include "procgraph/ingest.hpp"
#include "procgraph/metadata.hpp"
#include "procgraph/plan.hpp"
#include "procgraph/registry.hpp"
#include "procgraph/summarize.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace procgraph {

enum class OutputFormat { Tsv, Json };

struct SessionOptions {
    bool allow_cycles = false;
    bool allow_product = false;
    bool pushdown = false;
    int parallelism = 1;
    double timeout_secs = 0;
    OutputFormat format = OutputFormat::Tsv;
    std::string catalog_dir;  // empty: in-memory only
};

// Rendered outcome of one statement.
struct StatementResult {
    enum class Kind { Rows, Paths, Folders, Message };
    Kind kind = Kind::Message;

    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::vector<std::pair<std::string, std::string>> paths;  // (label, rendering)
    std::string stored_as;  // path node / folder prefix when materialized

    struct FolderSummary {
        std::string name;
        std::size_t cardinality = 0;
    };
    std::vector<FolderSummary> folders;

    std::string message;
    ExecStats stats;

    std::string render(OutputFormat format) const;
};

// One engine instance: snapshot catalog, folder/path-node catalogs, the
// algorithm registry, and statement dispatch. Statements always run against
// a pinned snapshot.
class Session {
public:
    explicit Session(SessionOptions opts = {});

    SessionOptions& options() { return opts_; }
    const SessionOptions& options() const { return opts_; }

    AlgorithmRegistry& registry() { return registry_; }
    SnapshotCatalog& catalog() { return catalog_; }
    const SnapshotCatalog& catalog() const { return catalog_; }

    // Loads a triple file / event log as a new snapshot; returns its id.
    std::uint64_t load_triples(const std::string& path, IngestReport* report = nullptr);
    std::uint64_t load_event_log(const std::string& path, const EventLogMapping& mapping,
                                 IngestReport* report = nullptr);

    std::uint64_t current_snapshot() const { return pinned_ ? *pinned_ : catalog_.latest(); }
    // Pin all queries to one snapshot (empty to follow the latest).
    void pin_snapshot(std::optional<std::uint64_t> id) { pinned_ = id; }
    std::shared_ptr<const ErGraph> graph() const { return catalog_.graph(current_snapshot()); }

    // Parses and runs one statement.
    StatementResult execute(std::string_view statement_text);
    StatementResult execute(const Statement& stmt);

    // Plan listing for entity/select statements.
    std::string explain(std::string_view statement_text);

    // Re-evaluates one timed folder against the current snapshot.
    StatementResult refresh_folder(const std::string& name);

    ExecOptions exec_options() const;

    // Catalog-dir persistence.
    void save_catalog() const;
    void load_catalog();

private:
    StatementResult run_select(const SelectStmt& stmt);
    StatementResult run_entity(const EntityStmt& stmt);
    StatementResult run_correlation(const CorrelationStmt& stmt);
    StatementResult run_relationship(const RelationshipStmt& stmt);
    StatementResult run_metadata(const MetadataStmt& stmt);
    LogicalPlan plan_for(const SelectStmt& stmt) const;
    CorrelationPredicateFn predicate_for(const CorrelationCondition& cond) const;

    SessionOptions opts_;
    AlgorithmRegistry registry_;
    SnapshotCatalog catalog_;
    std::optional<std::uint64_t> pinned_;
};

}  // namespace procgraph
