#pragma once

#include "procgraph/graph.hpp"
#include "procgraph/ingest.hpp"

#include <string>
#include <vector>

namespace procgraph::testing {

inline Triple rel(const std::string& s, const std::string& p, const std::string& o) {
    return {NodeId::uri(s), NodeId::uri(p), NodeId::uri(o)};
}

inline Triple attr(const std::string& s, const std::string& name, const std::string& value) {
    return {NodeId::uri(s), NodeId::uri("@" + name), NodeId::literal(value)};
}

// The six relationship triples of the banking walk-through.
inline std::vector<Triple> banking_edges() {
    return {
        rel("Adam", "submitted", "document"),
        rel("document", "part-of", "work-item"),
        rel("work-item", "assigned-to", "Staff"),
        rel("Staff", "created", "report"),
        rel("report", "approved-by", "Manager"),
        rel("Adam", "submitted", "Home-Loan-Document"),
    };
}

// Full banking fixture: the walk-through edges, the report filed as the
// Home-Loan-Report artifact, and entity typing/attributes.
inline ErGraph banking_graph() {
    std::vector<Triple> triples = banking_edges();
    triples.push_back(rel("report", "finalized-as", "Home-Loan-Report"));
    triples.push_back(attr("Adam", "type", "actor"));
    triples.push_back(attr("Staff", "type", "actor"));
    triples.push_back(attr("Manager", "type", "actor"));
    triples.push_back(attr("document", "type", "document"));
    triples.push_back(attr("report", "type", "document"));
    triples.push_back(attr("work-item", "type", "work-item"));
    triples.push_back(attr("Home-Loan-Document", "type", "artifact"));
    triples.push_back(attr("Home-Loan-Document", "category", "home-loan"));
    triples.push_back(attr("Home-Loan-Document", "submission-branch", "Sydney"));
    triples.push_back(attr("Home-Loan-Report", "type", "artifact"));
    triples.push_back(attr("Home-Loan-Report", "category", "home-loan"));
    return ErGraph::build(std::move(triples));
}

// Version lineage v1 -> v2 with three reified activity paths; two activities
// are lifecycle/create, one is archiving/store.
inline ErGraph fig4_graph() {
    std::vector<Triple> triples = {
        rel("Adam_loan_document_v1", "version-of", "Adam_loan_document"),
        rel("Adam_loan_document_v2", "version-of", "Adam_loan_document"),
        rel("Adam_loan_document_v1", "evolved-into", "Adam_loan_document_v2"),
        rel("Adam_loan_document_v1", "input-to", "act1"),
        rel("act1", "generated", "Adam_loan_document_v2"),
        rel("Adam_loan_document_v1", "input-to", "act2"),
        rel("act2", "generated", "Adam_loan_document_v2"),
        rel("Adam_loan_document_v1", "input-to", "act3"),
        rel("act3", "generated", "Adam_loan_document_v2"),
        attr("Adam_loan_document", "type", "artifact"),
        attr("Adam_loan_document_v1", "type", "version"),
        attr("Adam_loan_document_v1", "created-at", "2017-12-01T09:00:00Z"),
        attr("Adam_loan_document_v2", "type", "version"),
        attr("Adam_loan_document_v2", "created-at", "2017-12-05T09:00:00Z"),
        attr("act1", "type", "activity"),
        attr("act1", "what", "lifecycle"),
        attr("act1", "how", "create"),
        attr("act1", "who", "Tim"),
        attr("act1", "when", "2017-12-02T10:00:00Z"),
        attr("act2", "type", "activity"),
        attr("act2", "what", "lifecycle"),
        attr("act2", "how", "create"),
        attr("act2", "who", "Eli"),
        attr("act2", "when", "2017-12-03T10:00:00Z"),
        attr("act3", "type", "activity"),
        attr("act3", "what", "archiving"),
        attr("act3", "how", "store"),
        attr("act3", "who", "Ben"),
        attr("act3", "when", "2017-12-04T10:00:00Z"),
        attr("Tim", "type", "actor"),
        attr("Eli", "type", "actor"),
        attr("Ben", "type", "actor"),
    };
    return ErGraph::build(std::move(triples));
}

inline std::string data_file(const std::string& name) {
    return std::string(PROCGRAPH_TEST_DATA_DIR) + "/" + name;
}

}  // namespace procgraph::testing
