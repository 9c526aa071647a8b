#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "procgraph/errors.hpp"
#include "procgraph/parser.hpp"
#include "procgraph/plan.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace procgraph;
using namespace procgraph::testing;

TEST_CASE("entity statement: walk-through example") {
    Statement stmt =
        parse("entity artifact \\category='home-loan' AND \\submission-branch='Sydney'");
    const auto& e = std::get<EntityStmt>(stmt.node);
    CHECK(e.entity_type == "artifact");
    REQUIRE(e.filter);
    REQUIRE(e.filter->kind == FilterExpr::Kind::And);
    REQUIRE(e.filter->children.size() == 2);
    CHECK(e.filter->children[0].lhs == Term::attribute("category"));
    CHECK(e.filter->children[0].rhs == Term::literal("home-loan"));
    CHECK(e.filter->children[1].lhs == Term::attribute("submission-branch"));
}

TEST_CASE("correlation statement: type equality") {
    Statement stmt = parse("correlation x.type = y.type");
    const auto& c = std::get<CorrelationStmt>(stmt.node);
    CHECK(c.cond == CorrelationStmt::CondKind::AttrEquality);
    CHECK(c.attr_x == "type");
    CHECK(c.attr_y == "type");
    CHECK_FALSE(c.timed);
    CHECK_FALSE(c.into);
}

TEST_CASE("correlation statement: registered name, timed, into") {
    Statement stmt = parse("correlation same-order timed into orders");
    const auto& c = std::get<CorrelationStmt>(stmt.node);
    CHECK(c.cond == CorrelationStmt::CondKind::Registered);
    CHECK(c.registered_name == "same-order");
    CHECK(c.timed);
    CHECK(c.into == "orders");
}

TEST_CASE("truncated entity filter is a syntax error with a position") {
    try {
        parse("entity artifact \\a=");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 1);
        CHECK(e.column >= 19);
        CHECK(std::string(e.what()).find("quoted value") != std::string::npos);
    }
}

TEST_CASE("relationship statement keeps the regex verbatim") {
    Statement stmt = parse("relationship Adam (edge node)* assigned-to Staff into found");
    const auto& r = std::get<RelationshipStmt>(stmt.node);
    CHECK(r.regex_source == "Adam (edge node)* assigned-to Staff");
    CHECK(r.into == "found");
}

TEST_CASE("metadata statement forms") {
    Statement a = parse("metadata evolutionOf Adam_loan_document_v2");
    CHECK(std::get<MetadataStmt>(a.node).mode == MetadataMode::Evolution);
    CHECK(std::get<MetadataStmt>(a.node).target == "Adam_loan_document_v2");

    // bare form without the metadata keyword
    Statement b = parse("evolutionOf Adam_loan_document_v2 \\what='lifecycle' \\how='create'");
    const auto& m = std::get<MetadataStmt>(b.node);
    REQUIRE(m.filters.size() == 2);
    CHECK(m.filters[0] == std::pair<std::string, std::string>("what", "lifecycle"));
    CHECK(m.filters[1] == std::pair<std::string, std::string>("how", "create"));

    // bracketed filter form is equivalent
    Statement c = parse("evolutionOf Adam_loan_document_v2 filter [what='lifecycle', how='create']");
    CHECK(b == c);

    Statement d = parse("timeseriesOf X \\why='fraud'");
    CHECK(std::get<MetadataStmt>(d.node).mode == MetadataMode::Timeseries);
    CHECK(std::get<MetadataStmt>(d.node).filters[0].first == "why");
}

TEST_CASE("select statement: message query") {
    Statement stmt = parse(
        "select ?m where { ?m @type message. ?m @requestsize ?x. ?m @responsesize ?y. "
        "?m @timestamp ?t. FILTER (?x=?y && ?t > t1 && ?t < t2). }");
    const auto& s = std::get<SelectStmt>(stmt.node);
    CHECK(s.projection == std::vector<std::string>{"m"});
    REQUIRE(s.patterns.size() == 4);
    CHECK(s.patterns[0].predicate == Term::iri("@type"));
    CHECK(s.patterns[0].object == Term::literal("message"));  // bare attribute object
    REQUIRE(s.filter);
    CHECK(s.filter->kind == FilterExpr::Kind::And);
    CHECK(s.filter->children.size() == 3);
}

TEST_CASE("select statement: unbound projection refused") {
    CHECK_THROWS_AS(parse("select ?zz where { ?m @type message }"), SyntaxError);
}

TEST_CASE("operator precedence: AND binds tighter than OR") {
    Statement stmt = parse("entity artifact \\a='1' AND \\b='2' OR \\c='3'");
    const auto& f = *std::get<EntityStmt>(stmt.node).filter;
    REQUIRE(f.kind == FilterExpr::Kind::Or);
    REQUIRE(f.children.size() == 2);
    CHECK(f.children[0].kind == FilterExpr::Kind::And);
    CHECK(f.children[1].kind == FilterExpr::Kind::Compare);
}

TEST_CASE("filter precedence: ! > comparison > && > ||") {
    Statement stmt = parse(
        "select ?x where { ?x @a ?v. FILTER(!?v='1' && ?v<'5' || ?v>'9') }");
    const auto& f = *std::get<SelectStmt>(stmt.node).filter;
    REQUIRE(f.kind == FilterExpr::Kind::Or);
    REQUIRE(f.children.size() == 2);
    CHECK(f.children[0].kind == FilterExpr::Kind::And);
    CHECK(f.children[0].children[0].kind == FilterExpr::Kind::Not);
}

TEST_CASE("keywords are case-insensitive, identifiers are not") {
    Statement a = parse("ENTITY artifact \\a='1' and \\b='2'");
    Statement b = parse("entity artifact \\a='1' AND \\b='2'");
    CHECK(a == b);
    Statement c = parse("entity Artifact \\a='1' AND \\b='2'");
    CHECK_FALSE(a == c);
}

TEST_CASE("comments are ignored outside quotes") {
    Statement a = parse("entity artifact # trailing comment\n \\a='with # inside'");
    const auto& e = std::get<EntityStmt>(a.node);
    REQUIRE(e.filter);
    CHECK(e.filter->rhs == Term::literal("with # inside"));
}

TEST_CASE("parse/print round trip over the statement corpus") {
    const char* corpus[] = {
        "entity artifact \\category='home-loan' AND \\submission-branch='Sydney'",
        "entity actor",
        "entity artifact \\category='home-loan' AND (\\submission-date>='01-12-2017' AND "
        "\\submission-date<='31-12-2017')",
        "entity artifact \\a='1' AND \\b='2' OR \\c='3'",
        "correlation x.type = y.type",
        "correlation x.order-id = y.order-id into orders timed",
        "correlation same-order",
        "relationship Adam (edge node)* assigned-to Staff",
        "relationship Adam (edge node)+ approved-by Manager into managers",
        "relationship Adam (edge node)* edge @type='artifact' timed into artifacts",
        "metadata evolutionOf Adam_loan_document_v2",
        "evolutionOf Adam_loan_document_v2 \\what='lifecycle' \\how='create'",
        "metadata derivationOf v9",
        "metadata timeseriesOf Adam_loan_document \\when='2017-12-01..2017-12-31'",
        "select ?m where { ?m @type message. ?m @requestsize ?x. ?m @responsesize ?y. "
        "?m @timestamp ?t. FILTER (?x=?y && ?t > '1' && ?t < '2') }",
        "select ?v ?o where { ?o of-vendor ?v. ?v @name ?n. FILTER(!?n='x' || ?n<'b') }",
        "select ?s ?p ?o where { ?s ?p ?o }",
    };
    for (const char* text : corpus) {
        CAPTURE(text);
        Statement first = parse(text);
        std::string printed = print_statement(first);
        CAPTURE(printed);
        Statement second = parse(printed);
        CHECK(first == second);
        CHECK(print_statement(second) == printed);
    }
}

TEST_CASE("translate_entity: walk-through translation scheme") {
    Statement stmt =
        parse("entity artifact \\category='home-loan' AND \\submission-branch='Sydney'");
    SelectStmt select = translate_entity(std::get<EntityStmt>(stmt.node));

    CHECK(select.projection == std::vector<std::string>{"e"});
    REQUIRE(select.patterns.size() == 3);
    CHECK(select.patterns[0] ==
          TriplePattern{Term::variable("e"), Term::iri("@type"), Term::literal("artifact")});
    CHECK(select.patterns[1] ==
          TriplePattern{Term::variable("e"), Term::iri("@category"), Term::variable("v1")});
    CHECK(select.patterns[2] == TriplePattern{Term::variable("e"),
                                              Term::iri("@submission-branch"),
                                              Term::variable("v2")});
    REQUIRE(select.filter);
    REQUIRE(select.filter->kind == FilterExpr::Kind::And);
    CHECK(select.filter->children[0] ==
          FilterExpr::compare(Term::variable("v1"), Comparator::Eq,
                              Term::literal("home-loan")));
}

TEST_CASE("translate_entity: no filter means no FILTER clause") {
    SelectStmt select = translate_entity(std::get<EntityStmt>(parse("entity actor").node));
    CHECK(select.patterns.size() == 1);
    CHECK_FALSE(select.filter);
}

TEST_CASE("translate_entity: date range adds one variable with two conjuncts") {
    Statement stmt = parse(
        "entity artifact \\category='home-loan' AND \\submission-branch='Sydney' AND "
        "(\\submission-date>='01-12-2017' AND \\submission-date<='31-12-2017')");
    SelectStmt select = translate_entity(std::get<EntityStmt>(stmt.node));
    REQUIRE(select.patterns.size() == 4);  // @type + three distinct attributes
    CHECK(select.patterns[3].predicate == Term::iri("@submission-date"));
    std::string printed = print_statement(Statement{select, 0, 0});
    CHECK(printed.find("?v3>='01-12-2017'") != std::string::npos);
    CHECK(printed.find("?v3<='31-12-2017'") != std::string::npos);
}

TEST_CASE("translate_entity is semantics-preserving on random graphs") {
    Rng rng(23);
    const char* statements[] = {
        "entity artifact \\color='red'",
        "entity artifact \\color='red' AND \\size>'2'",
        "entity artifact \\color='red' OR \\color='blue'",
        "entity event \\size!='3'",
    };
    for (int round = 0; round < 30; ++round) {
        // random entities with random color/size attributes
        std::vector<Triple> triples;
        std::uniform_int_distribution<int> count(1, 30);
        std::uniform_int_distribution<int> coin(0, 1);
        std::uniform_int_distribution<int> color(0, 2);
        std::uniform_int_distribution<int> size(1, 4);
        const char* colors[] = {"red", "blue", "green"};
        int n = count(rng);
        for (int i = 0; i < n; ++i) {
            std::string id = "e" + std::to_string(i);
            triples.push_back(attr(id, "type", coin(rng) ? "artifact" : "event"));
            if (coin(rng)) triples.push_back(attr(id, "color", colors[color(rng)]));
            if (coin(rng)) triples.push_back(attr(id, "size", std::to_string(size(rng))));
        }
        ErGraph g = ErGraph::build(std::move(triples));

        for (const char* text : statements) {
            CAPTURE(round);
            CAPTURE(text);
            const auto& entity = std::get<EntityStmt>(parse(text).node);
            SelectStmt select = translate_entity(entity);

            // oracle: brute-force attribute filter; mandatory-join semantics
            // (an entity lacking a referenced attribute fails the statement)
            std::vector<std::vector<std::string>> expected;
            std::vector<std::string> attrs;
            if (entity.filter) collect_for_test(*entity.filter, attrs);
            for (const auto& [id, idx] : g.nodes()) {
                const EntityRecord* rec = g.find_entity(id);
                if (!rec || rec->entity_type != entity.entity_type) continue;
                bool has_all = true;
                for (const auto& a : attrs)
                    if (!rec->attributes.count(a)) has_all = false;
                if (!has_all) continue;
                if (entity.filter && !eval_attr_filter(*entity.filter, *rec)) continue;
                expected.push_back({id.id});
            }
            std::sort(expected.begin(), expected.end());

            CHECK(naive_match(g, select) == expected);
        }
    }
}

TEST_CASE("translate_metadata validates filter keys") {
    MetadataRequest req = translate_metadata(std::get<MetadataStmt>(
        parse("evolutionOf v2 \\what='lifecycle' \\how='create'").node));
    CHECK(req.mode == MetadataMode::Evolution);
    CHECK(req.target == NodeId::uri("v2"));
    CHECK(req.filters.size() == 2);

    CHECK_THROWS_AS(translate_metadata(std::get<MetadataStmt>(
                        parse("evolutionOf v2 \\badkey='x'").node)),
                    UnknownFilterKey);
}

TEST_CASE("statement splitter: blank lines and semicolons") {
    auto statements = split_statements(
        "entity actor\n"
        "\n"
        "select ?m where {\n  ?m @type message.\n\n  ?m @a ?x.\n}\n"
        "; entity artifact \\a='semi;colon'\n");
    REQUIRE(statements.size() == 3);
    CHECK(statements[0] == "entity actor");
    CHECK(statements[1].find("?m @a ?x") != std::string::npos);
    CHECK(statements[2] == "entity artifact \\a='semi;colon'");
}
