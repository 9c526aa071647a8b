#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "procgraph/errors.hpp"
#include "procgraph/ingest.hpp"
#include "procgraph/summarize.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

#include <filesystem>

using namespace procgraph;
using namespace procgraph::testing;

namespace {

CorrelationCondition type_equality() {
    CorrelationCondition cond;
    cond.attr_x = "type";
    cond.attr_y = "type";
    return cond;
}

// banking entities retyped so documents count as artifacts, as in the
// partition walk-through
ErGraph partition_fixture() {
    std::vector<Triple> triples = banking_edges();
    triples.push_back(attr("Adam", "type", "actor"));
    triples.push_back(attr("Staff", "type", "actor"));
    triples.push_back(attr("Manager", "type", "actor"));
    triples.push_back(attr("document", "type", "artifact"));
    triples.push_back(attr("report", "type", "artifact"));
    triples.push_back(attr("Home-Loan-Document", "type", "artifact"));
    return ErGraph::build(std::move(triples));
}

std::vector<std::string> ids(const std::vector<NodeId>& nodes) {
    std::vector<std::string> out;
    for (const NodeId& n : nodes) out.push_back(n.id);
    return out;
}

}  // namespace

TEST_CASE("partition by type equality: one folder per entity type") {
    ErGraph g = partition_fixture();
    auto folders = partition_by_correlation(g, type_equality());
    REQUIRE(folders.size() == 2);
    CHECK(folders[0].name == "type=actor");
    CHECK(ids(folders[0].members) == std::vector<std::string>{"Adam", "Manager", "Staff"});
    CHECK(folders[1].name == "type=artifact");
    CHECK(ids(folders[1].members) ==
          std::vector<std::string>{"Home-Loan-Document", "document", "report"});

    // folder subgraphs are induced ER subgraphs
    REQUIRE(folders[1].subgraph);
    CHECK(folders[1].subgraph->relationship_edge_count() == 0);
    CHECK(folders[1].subgraph->triple_count() == 3);  // the three @type triples
    REQUIRE(folders[0].subgraph);
    CHECK(folders[0].subgraph->node_count() == 3);
}

TEST_CASE("partition: no entity carries the attribute") {
    ErGraph g = ErGraph::build(banking_edges());
    CHECK(partition_by_correlation(g, type_equality()).empty());
}

TEST_CASE("partition of a generated log matches the group-by oracle") {
    Rng rng(5);
    std::string csv = random_event_log(rng, 400, 12);
    auto [g, report] = load_event_log_text(csv, {});

    CorrelationCondition cond;
    cond.attr_x = "order-id";
    cond.attr_y = "order-id";
    auto folders = partition_by_correlation(g, cond, "由");

    auto oracle = groupby_oracle(g, "order-id");
    REQUIRE(folders.size() == oracle.size());
    for (const FolderNode& f : folders) {
        std::string value = f.name.substr(std::string("由order-id=").size());
        CHECK(f.members == oracle.at(value));
    }
}

TEST_CASE("partition laws: disjoint and covering") {
    Rng rng(6);
    std::string csv = random_event_log(rng, 600, 17);
    auto [g, report] = load_event_log_text(csv, {});
    CorrelationCondition cond;
    cond.attr_x = "order-id";
    cond.attr_y = "order-id";
    auto folders = partition_by_correlation(g, cond);

    std::set<NodeId> seen;
    std::size_t total = 0;
    for (const FolderNode& f : folders) {
        for (const NodeId& id : f.members) CHECK(seen.insert(id).second);  // disjoint
        total += f.members.size();
    }
    std::size_t carrying = 0;
    for (const auto& [id, idx] : g.nodes())
        if (g.attribute(id, "order-id")) ++carrying;
    CHECK(total == carrying);  // covering
}

TEST_CASE("cross-attribute equality links buckets") {
    std::vector<Triple> triples = {
        attr("a", "sends-to", "k1"),  attr("b", "receives-from", "k1"),
        attr("c", "sends-to", "k2"),  attr("d", "receives-from", "k3"),
        attr("e", "sends-to", "k3"),  attr("e", "receives-from", "k2"),
    };
    ErGraph g = ErGraph::build(std::move(triples));
    CorrelationCondition cond;
    cond.attr_x = "sends-to";
    cond.attr_y = "receives-from";
    auto folders = partition_by_correlation(g, cond);
    // ψ(x,y): x.sends-to = y.receives-from; components: {a,b}, {c,d,e}
    REQUIRE(folders.size() == 2);
    CHECK(ids(folders[0].members) == std::vector<std::string>{"a", "b"});
    CHECK(ids(folders[1].members) == std::vector<std::string>{"c", "d", "e"});
}

TEST_CASE("registered predicate partition and ψ-consistency") {
    Rng rng(9);
    std::string csv = random_event_log(rng, 80, 6);
    auto [g, report] = load_event_log_text(csv, {});

    CorrelationPredicateFn same_order = [](const EntityRecord& a, const EntityRecord& b) {
        auto x = a.attributes.find("order-id");
        auto y = b.attributes.find("order-id");
        return x != a.attributes.end() && y != b.attributes.end() && x->second == y->second;
    };
    CorrelationCondition cond;
    cond.kind = CorrelationCondition::Kind::Registered;
    cond.registered_name = "same-order";
    auto folders = partition_by_correlation(g, cond, "", same_order);

    // every in-folder pair is ψ-true (equivalence condition), no cross-folder
    // pair is, on this bounded instance
    std::map<NodeId, std::size_t> folder_of;
    for (std::size_t k = 0; k < folders.size(); ++k)
        for (const NodeId& id : folders[k].members) folder_of[id] = k;
    std::vector<NodeId> all;
    for (const auto& [id, k] : folder_of) all.push_back(id);
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            bool same_folder = folder_of[all[i]] == folder_of[all[j]];
            bool related = same_order(g.get_entity(all[i]), g.get_entity(all[j]));
            if (g.get_entity(all[i]).attributes.count("order-id") &&
                g.get_entity(all[j]).attributes.count("order-id"))
                CHECK(same_folder == related);
        }

    CorrelationCondition unknown;
    unknown.kind = CorrelationCondition::Kind::Registered;
    unknown.registered_name = "nope";
    CHECK_THROWS_AS(partition_by_correlation(g, unknown), UnknownRegisteredCondition);
}

TEST_CASE("apply_path_condition: staff reachable from Adam") {
    ErGraph g = banking_graph();
    FolderNode folder =
        apply_path_condition(g, {"Adam (edge node)* assigned-to Staff"}, "adam-staff");
    CHECK(ids(folder.members) == std::vector<std::string>{"Staff"});

    FolderNode none = apply_path_condition(g, {"Manager (edge node)+ node"}, "none");
    CHECK(none.members.empty());
}

TEST_CASE("apply_path_condition: extension adds a second member") {
    std::vector<Triple> triples = banking_edges();
    triples.push_back(rel("work-item", "assigned-to", "Second-Staff"));
    ErGraph g = ErGraph::build(std::move(triples));
    FolderNode folder =
        apply_path_condition(g, {"Adam (edge node)* assigned-to node"}, "staff");
    CHECK(ids(folder.members) == std::vector<std::string>{"Second-Staff", "Staff"});
}

TEST_CASE("process instances: chronological order with ties by id") {
    auto [g, report] = load_event_log_text(
        "event_id,timestamp,actor,activity,order-id\n"
        "e3,2017-12-01T12:00:00Z,Tim,C,o1\n"
        "e1,2017-12-01T10:00:00Z,Tim,A,o1\n"
        "e2,2017-12-01T11:00:00Z,Tim,B,o1\n"
        "f2,2017-12-02T10:00:00Z,Eli,C,o2\n"
        "f1,2017-12-02T09:00:00Z,Eli,A,o2\n",
        {});
    CorrelationCondition cond;
    cond.attr_x = "order-id";
    cond.attr_y = "order-id";
    auto folders = partition_by_correlation(g, cond);
    auto instances = build_process_instances(folders, g);
    REQUIRE(instances.size() == 2);
    CHECK(instances[0].activities() == std::vector<std::string>{"A", "B", "C"});
    CHECK(instances[1].activities() == std::vector<std::string>{"A", "C"});
    for (const auto& inst : instances)
        for (std::size_t i = 0; i + 1 < inst.events.size(); ++i)
            CHECK(inst.events[i].timestamp <= inst.events[i + 1].timestamp);
}

TEST_CASE("process instances: single event and non-event folders") {
    auto [g, report] = load_event_log_text(
        "event_id,timestamp,actor,activity\ne1,2017-12-01T10:00:00Z,Tim,A\n", {});
    FolderNode f;
    f.name = "solo";
    f.members = {NodeId::uri("e1")};
    CHECK(build_process_instance(f, g).events.size() == 1);

    FolderNode bad;
    bad.name = "bad";
    bad.members = {NodeId::uri("Tim")};
    CHECK_THROWS_AS(build_process_instance(bad, g), NotAnEvent);
}

TEST_CASE("dfg discovery: hand-counted frequencies") {
    ProcessInstance abc, ac;
    auto mk = [](const char* id, const char* act, InstantMs t) {
        EventRecord e;
        e.id = NodeId::uri(id);
        e.timestamp = t;
        e.data["activity"] = act;
        return e;
    };
    abc.events = {mk("e1", "A", 1), mk("e2", "B", 2), mk("e3", "C", 3)};
    ac.events = {mk("f1", "A", 1), mk("f2", "C", 2)};
    std::vector<ProcessInstance> instances{abc, ac};

    ProcessModel model = discover_dfg(instances);
    CHECK(model.activities == std::vector<std::string>{"A", "B", "C"});
    CHECK(model.edges.at({"A", "B"}) == 1);
    CHECK(model.edges.at({"B", "C"}) == 1);
    CHECK(model.edges.at({"A", "C"}) == 1);
    CHECK(model.starts.at("A") == 2);
    CHECK(model.ends.at("C") == 2);

    CHECK(to_dot(model) ==
          "A -> B [label=1]\nA -> C [label=1]\nB -> C [label=1]\n");
}

TEST_CASE("dfg discovery: single activity and frequency additivity") {
    ProcessInstance a;
    EventRecord e;
    e.id = NodeId::uri("e1");
    e.data["activity"] = "A";
    a.events = {e};
    std::vector<ProcessInstance> one{a};
    ProcessModel model = discover_dfg(one);
    CHECK(model.edges.empty());
    CHECK(model.starts.at("A") == 1);
    CHECK(model.ends.at("A") == 1);

    ProcessInstance ab;
    EventRecord e1 = e, e2 = e;
    e2.id = NodeId::uri("e2");
    e2.data["activity"] = "B";
    e2.timestamp = 2;
    ab.events = {e1, e2};
    std::vector<ProcessInstance> two{ab, ab};
    CHECK(discover_dfg(two).edges.at({"A", "B"}) == 2);

    std::vector<ProcessInstance> none;
    CHECK_THROWS_AS(discover_dfg(none), EmptyInput);
}

TEST_CASE("dfg flow conservation on generated logs") {
    Rng rng(17);
    std::string csv = random_event_log(rng, 800, 23);
    auto [g, report] = load_event_log_text(csv, {});
    CorrelationCondition cond;
    cond.attr_x = "order-id";
    cond.attr_y = "order-id";
    auto folders = partition_by_correlation(g, cond);
    auto instances = build_process_instances(folders, g);
    ProcessModel model = discover_dfg(instances);

    for (const std::string& a : model.activities) {
        std::size_t out = 0, in = 0;
        for (const auto& [edge, freq] : model.edges) {
            if (edge.first == a) out += freq;
            if (edge.second == a) in += freq;
        }
        std::size_t starts = model.starts.count(a) ? model.starts.at(a) : 0;
        std::size_t ends = model.ends.count(a) ? model.ends.at(a) : 0;
        CHECK(out + ends == in + starts);
    }
    std::size_t start_total = 0;
    for (const auto& [act, n] : model.starts) start_total += n;
    CHECK(start_total == instances.size());
}

TEST_CASE("group_summarize: counts per activity match the oracle") {
    Rng rng(19);
    std::string csv = random_event_log(rng, 300, 9);
    auto [g, report] = load_event_log_text(csv, {});
    SummaryTable table = group_summarize(g, nullptr, {"activity"}, {Aggregate{}});

    auto oracle = groupby_oracle(g, "activity");
    std::size_t bucket_rows = 0, total = 0;
    for (const auto& row : table.rows) {
        total += std::stoul(row[1]);
        if (row[0] == "⊥") {
            ++bucket_rows;
            continue;
        }
        CHECK(std::stoul(row[1]) == oracle.at(row[0]).size());
    }
    CHECK(bucket_rows == 1);  // actor nodes carry no @activity
    CHECK(total == g.node_count());
    CHECK(std::is_sorted(table.rows.begin(), table.rows.end()));
}

TEST_CASE("group_summarize: empty folder, measures, unknown aggregate") {
    ErGraph g = banking_graph();
    FolderNode empty;
    empty.name = "empty";
    CHECK(group_summarize(g, &empty, {"type"}, {Aggregate{}}).rows.empty());

    // artifacts by submission-branch
    std::vector<std::string> artifact_ids;
    FolderNode artifacts;
    artifacts.members = {NodeId::uri("Home-Loan-Document"), NodeId::uri("Home-Loan-Report")};
    SummaryTable t = group_summarize(g, &artifacts, {"submission-branch"}, {Aggregate{}});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"Sydney", "1"});
    CHECK(t.rows[1] == std::vector<std::string>{"⊥", "1"});

    CHECK(Aggregate::parse("sum(requestsize)").attribute == "requestsize");
    CHECK_THROWS_AS(Aggregate::parse("median(x)"), UnknownAggregate);
}

TEST_CASE("group_summarize: numeric aggregates") {
    std::vector<Triple> triples = {
        attr("m1", "kind", "req"), attr("m1", "size", "10"),
        attr("m2", "kind", "req"), attr("m2", "size", "30"),
        attr("m3", "kind", "rsp"), attr("m3", "size", "5"),
    };
    ErGraph g = ErGraph::build(std::move(triples));
    SummaryTable t = group_summarize(
        g, nullptr, {"kind"},
        {Aggregate::parse("count"), Aggregate::parse("sum(size)"),
         Aggregate::parse("min(size)"), Aggregate::parse("max(size)"),
         Aggregate::parse("avg(size)")});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"req", "2", "40", "10", "30", "20"});
    CHECK(t.rows[1] == std::vector<std::string>{"rsp", "1", "5", "5", "5", "5"});
}

TEST_CASE("refresh_timed_folder: fixpoint, joiners, leavers") {
    ErGraph g1 = partition_fixture();
    auto folders = partition_by_correlation(g1, type_equality());
    FolderNode artifacts = folders[1];
    artifacts.timed = true;
    artifacts.snapshot_id = 1;
    for (const NodeId& id : artifacts.members) artifacts.log.push_back({id, 1, std::nullopt});

    // unchanged snapshot: no log entries
    FolderNode same = refresh_timed_folder(artifacts, g1, 2);
    CHECK(same.members == artifacts.members);
    CHECK(same.log.size() == artifacts.log.size());

    // one artifact joins, one loses its type attribute
    std::vector<Triple> changed;
    for (const Triple& t : g1.triples())
        if (!(t.subject == NodeId::uri("report") && t.is_attribute())) changed.push_back(t);
    changed.push_back(attr("New-Contract", "type", "artifact"));
    ErGraph g2 = ErGraph::build(std::move(changed));

    FolderNode updated = refresh_timed_folder(artifacts, g2, 3);
    CHECK(ids(updated.members) ==
          std::vector<std::string>{"Home-Loan-Document", "New-Contract", "document"});
    bool joined = false, left = false;
    for (const auto& entry : updated.log) {
        if (entry.id == NodeId::uri("New-Contract") && entry.added_at == 3) joined = true;
        if (entry.id == NodeId::uri("report") && entry.removed_at == 3) left = true;
    }
    CHECK(joined);
    CHECK(left);

    FolderNode no_query;
    no_query.name = "adhoc";
    no_query.timed = true;
    CHECK_THROWS_AS(refresh_timed_folder(no_query, g2, 4), NoDefiningQuery);
}

TEST_CASE("folder catalog: duplicate names") {
    FolderCatalog catalog;
    FolderNode f;
    f.name = "orders";
    catalog.store(f);
    CHECK_THROWS_AS(catalog.store(f), DuplicateName);
    CHECK(catalog.replace(f).name == "orders");
    CHECK(catalog.names() == std::vector<std::string>{"orders"});
}

TEST_CASE("folder persistence round trip") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "procgraph_folder_test";
    fs::remove_all(dir);

    ErGraph g = partition_fixture();
    auto folders = partition_by_correlation(g, type_equality());
    FolderNode timed = folders[0];
    timed.timed = true;
    timed.snapshot_id = 2;
    for (const NodeId& id : timed.members) timed.log.push_back({id, 2, std::nullopt});
    timed.log.push_back({NodeId::uri("Gone"), 1, 2});

    save_folder(timed, dir.string());
    save_folder(folders[1], dir.string());
    CHECK(list_saved_folders(dir.string()) ==
          std::vector<std::string>{"type=actor", "type=artifact"});

    FolderNode loaded = load_folder(dir.string(), "type=actor");
    CHECK(loaded.members == timed.members);
    CHECK(loaded.timed);
    CHECK(loaded.snapshot_id == 2);
    CHECK(loaded.log.size() == timed.log.size());
    const auto* cond = std::get_if<CorrelationCondition>(&loaded.defining_query);
    REQUIRE(cond);
    CHECK(cond->attr_x == "type");

    FolderNode plain = load_folder(dir.string(), "type=artifact");
    CHECK(plain.members == folders[1].members);
    CHECK_FALSE(plain.timed);
    fs::remove_all(dir);
}
