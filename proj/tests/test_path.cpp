#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "procgraph/errors.hpp"
#include "procgraph/path.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

#include <set>

using namespace procgraph;
using namespace procgraph::testing;

namespace {

std::set<std::string> path_strings(const std::vector<Path>& paths) {
    std::set<std::string> out;
    for (const Path& p : paths) out.insert(format_path(p));
    return out;
}

}  // namespace

TEST_CASE("compile_regex: walk-through expressions") {
    CHECK(PathRegex::compile("Adam (edge node)* assigned-to Staff").start_hint() == "Adam");
    CHECK(PathRegex::compile("Adam (edge node)+ approved-by Manager").end_hint() == "Manager");
    PathRegex typed = PathRegex::compile("Adam (edge node)* edge @type='artifact'");
    CHECK(typed.end_hint() == "artifact");
}

TEST_CASE("compile_regex: syntax errors carry a position") {
    CHECK_THROWS_AS(PathRegex::compile("Adam (edge"), RegexSyntaxError);
    CHECK_THROWS_AS(PathRegex::compile(""), RegexSyntaxError);
    CHECK_THROWS_AS(PathRegex::compile("Adam edge"), RegexSyntaxError);  // ends on an edge
    CHECK_THROWS_AS(PathRegex::compile("edge Staff"), RegexSyntaxError);  // starts on an edge
    CHECK_THROWS_AS(PathRegex::compile("Adam edge edge Staff"), RegexSyntaxError);
    CHECK_THROWS_AS(PathRegex::compile("Adam )"), RegexSyntaxError);
}

TEST_CASE("endpoint constraint after a node-ending group") {
    // `X (edge node)* Y` reads as: any path from X whose final node is Y
    ErGraph g = banking_graph();
    auto to_staff = find_paths(g, PathRegex::compile("Adam (edge node)* Staff"));
    REQUIRE(to_staff.size() == 1);
    CHECK(to_staff[0].triples.size() == 3);

    auto nothing = find_paths(g, PathRegex::compile("Manager (edge node)* Adam"));
    CHECK(nothing.empty());

    // zero repetitions require the endpoints to coincide, and the zero-edge
    // path is not emitted
    CHECK(find_paths(g, PathRegex::compile("Adam (edge node)* Adam")).empty());
}

TEST_CASE("find_paths: Example 3 yields the staff path") {
    ErGraph g = banking_graph();
    auto paths = find_paths(g, PathRegex::compile("Adam (edge node)* assigned-to Staff"));
    REQUIRE(paths.size() == 1);
    CHECK(format_path(paths[0]) ==
          "Adam ->(submitted)-> document ->(part-of)-> work-item ->(assigned-to)-> Staff");
}

TEST_CASE("find_paths: Example 4 yields the 5-hop manager path") {
    ErGraph g = banking_graph();
    auto paths = find_paths(g, PathRegex::compile("Adam (edge node)+ approved-by Manager"));
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].triples.size() == 5);
    CHECK(format_path(paths[0]) ==
          "Adam ->(submitted)-> document ->(part-of)-> work-item ->(assigned-to)-> Staff "
          "->(created)-> report ->(approved-by)-> Manager");
}

TEST_CASE("find_paths: Example 5 yields exactly the two artifact paths") {
    ErGraph g = banking_graph();
    auto paths = find_paths(g, PathRegex::compile("Adam (edge node)* edge @type='artifact'"));
    REQUIRE(paths.size() == 2);
    CHECK(format_path(paths[0]) == "Adam ->(submitted)-> Home-Loan-Document");
    CHECK(paths[1].triples.size() == 5);
    CHECK(paths[1].node_sequence().back() == NodeId::uri("Home-Loan-Report"));
}

TEST_CASE("find_paths: no match from a sink node") {
    ErGraph g = banking_graph();
    CHECK(find_paths(g, PathRegex::compile("Manager (edge node)* Adam")).empty());
}

TEST_CASE("find_paths: chaining invariant and limit") {
    ErGraph g = banking_graph();
    auto all = find_paths(g, PathRegex::compile("node (edge node)+"));
    CHECK(all.size() > 5);
    for (const Path& p : all) CHECK(p.chained());

    auto limited = find_paths(g, PathRegex::compile("node (edge node)+"), {.limit = 3});
    REQUIRE(limited.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(limited[i] == all[i]);
}

TEST_CASE("find_paths: cyclic graphs need max_hops") {
    ErGraph g = ErGraph::build({rel("a", "p", "b"), rel("b", "p", "a")},
                               {.allow_cycles = true});
    CHECK_THROWS_AS(find_paths(g, PathRegex::compile("a (edge node)+")), UnboundedSearch);
    auto paths = find_paths(g, PathRegex::compile("a (edge node)+"), {.max_hops = 16});
    // simple-path semantics: a->b only
    REQUIRE(paths.size() == 1);
    CHECK(format_path(paths[0]) == "a ->(p)-> b");
}

TEST_CASE("is_reachable") {
    ErGraph g = banking_graph();
    CHECK(is_reachable(g, NodeId::uri("Adam"), NodeId::uri("Manager")));
    CHECK_FALSE(is_reachable(g, NodeId::uri("Manager"), NodeId::uri("Adam")));
    CHECK(is_reachable(g, NodeId::uri("Adam"), NodeId::uri("Adam")));  // empty path
    CHECK_THROWS_AS(is_reachable(g, NodeId::uri("ghost"), NodeId::uri("Adam")), UnknownNode);

    PathRegex re = PathRegex::compile("Adam (edge node)* assigned-to Staff");
    CHECK(is_reachable(g, NodeId::uri("Adam"), NodeId::uri("Staff"), &re));
    CHECK_FALSE(is_reachable(g, NodeId::uri("Adam"), NodeId::uri("Manager"), &re));

    PathRegex self = PathRegex::compile("Adam");
    CHECK(is_reachable(g, NodeId::uri("Adam"), NodeId::uri("Adam"), &self));
    CHECK_FALSE(is_reachable(g, NodeId::uri("Staff"), NodeId::uri("Staff"), &self));
}

TEST_CASE("star/plus containment") {
    Rng rng(31);
    for (int round = 0; round < 40; ++round) {
        ErGraph g = random_dag(rng, 18, 40);
        auto star = path_strings(find_paths(g, PathRegex::compile("node (edge node)*")));
        auto plus2 = path_strings(
            find_paths(g, PathRegex::compile("node (edge node) (edge node)*")));
        // the >=2-segment matches are a subset of the >=1-segment matches
        for (const auto& p : plus2) CHECK(star.count(p) == 1);
        // the difference is exactly the one-hop paths
        for (const auto& p : star)
            if (!plus2.count(p))
                CHECK(std::count(p.begin(), p.end(), '(') == 1);
    }
}

TEST_CASE("monotonicity: adding triples never removes timed path-node matches") {
    ErGraph g1 = ErGraph::build({rel("a", "p", "b"), rel("b", "q", "c")});
    std::vector<Triple> extended = g1.triples();
    extended.push_back(rel("b", "q", "d"));
    ErGraph g2 = ErGraph::build(std::move(extended));

    PathNodeCatalog catalog;
    PathNodeSpec spec{"walks", "a (edge node)+", true};
    auto first = path_strings(catalog.materialize(spec, g1, 1).current_paths());
    auto second = path_strings(catalog.materialize(spec, g2, 2).current_paths());
    for (const auto& p : first) CHECK(second.count(p) == 1);
    CHECK(second.size() == first.size() + 1);

    // refresh keeps first_seen for surviving paths
    const PathNode* node = catalog.find("walks");
    for (const auto& entry : node->entries)
        if (second.count(format_path(entry.path)) && first.count(format_path(entry.path)))
            CHECK(entry.first_seen == 1);
}

TEST_CASE("materialize_path_node: duplicate names and empty results") {
    ErGraph g = banking_graph();
    PathNodeCatalog catalog;
    PathNodeSpec spec{"ex3", "Adam (edge node)* assigned-to Staff", false};
    CHECK(catalog.materialize(spec, g, 1).current_paths().size() == 1);
    CHECK_THROWS_AS(catalog.materialize(spec, g, 2), DuplicateName);

    PathNodeSpec empty{"none", "Manager (edge node)+ Adam", false};
    CHECK(catalog.materialize(empty, g, 1).current_paths().empty());
}

TEST_CASE("oracle equivalence on random dags and regexes") {
    Rng rng(41);
    int rounds = 0;
    int attempts = 0;
    while (rounds < 60 && attempts < 400) {
        ++attempts;
        ErGraph g = random_dag(rng, 28, 60);
        std::string source = random_regex(rng, g);
        CAPTURE(source);

        PathRegex compiled = PathRegex::compile(source);
        RefRegex reference = ref_parse(source);

        std::set<std::string> expected;
        if (!ref_enumerate_paths(g, reference, expected, 2'000'000)) continue;  // too dense

        auto actual = path_strings(find_paths(g, compiled));
        CHECK(actual == expected);
        ++rounds;
    }
    CHECK(rounds == 60);
}

TEST_CASE("lexicographic enumeration order") {
    Rng rng(43);
    for (int round = 0; round < 10; ++round) {
        ErGraph g = random_dag(rng, 15, 30);
        auto paths = find_paths(g, PathRegex::compile("node (edge node)+"));
        std::vector<std::vector<NodeId>> sequences;
        for (const Path& p : paths) sequences.push_back(p.node_sequence());
        CHECK(std::is_sorted(sequences.begin(), sequences.end()));
    }
}
