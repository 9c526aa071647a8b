#pragma once

#include "procgraph/ast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace procgraph {

// Parses one BP-SPARQL statement. '#' comments outside quotes are ignored.
// Throws SyntaxError with 1-based line:column.
Statement parse(std::string_view text);

// Canonical re-print; parse(print_statement(parse(s))) is structurally equal
// to parse(s).
std::string print_statement(const Statement& stmt);

// Entity statements become SELECT queries: one fresh subject variable, a
// @type pattern, one @attr pattern per referenced attribute, and the filter
// tree mirrored over the fresh value variables.
SelectStmt translate_entity(const EntityStmt& stmt);

// Validates filter keys (what/how/when/who/where/which/why); throws
// UnknownFilterKey.
MetadataRequest translate_metadata(const MetadataStmt& stmt);

// Splits a batch script into statements: ';' or a blank line terminates a
// statement outside braces/quotes.
std::vector<std::string> split_statements(std::string_view script);

}  // namespace procgraph
