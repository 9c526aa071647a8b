#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace procgraph {

// Base class for every error raised by the engine.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedTriple : Error {
    MalformedTriple(std::size_t index, const std::string& reason)
        : Error("malformed triple at index " + std::to_string(index) + ": " + reason),
          index(index), reason(reason) {}
    std::size_t index;
    std::string reason;
};

struct CyclicRelationshipError : Error {
    explicit CyclicRelationshipError(std::vector<std::string> cycle_nodes);
    std::vector<std::string> cycle;
};

struct UnknownNode : Error {
    explicit UnknownNode(const std::string& id) : Error("unknown node: " + id), id(id) {}
    std::string id;
};

struct UnknownEntity : Error {
    explicit UnknownEntity(const std::string& id) : Error("unknown entity: " + id), id(id) {}
    std::string id;
};

struct NotAnEvent : Error {
    explicit NotAnEvent(const std::string& id) : Error("not an event node: " + id), id(id) {}
    std::string id;
};

struct NotAVersion : Error {
    explicit NotAVersion(const std::string& id) : Error("not a version node: " + id), id(id) {}
    std::string id;
};

struct IoError : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct MissingColumn : Error {
    explicit MissingColumn(const std::string& name)
        : Error("missing column: " + name), column(name) {}
    std::string column;
};

// Query-text error with 1-based line:column position.
struct SyntaxError : Error {
    SyntaxError(std::size_t line, std::size_t column, const std::string& detail)
        : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) +
                ": " + detail),
          line(line), column(column), detail(detail) {}
    std::size_t line;
    std::size_t column;
    std::string detail;
};

struct RegexSyntaxError : Error {
    RegexSyntaxError(std::size_t position, const std::string& detail)
        : Error("regex syntax error at token " + std::to_string(position) + ": " + detail),
          position(position), detail(detail) {}
    std::size_t position;
    std::string detail;
};

struct UnboundedSearch : Error {
    using Error::Error;
};

struct DuplicateName : Error {
    explicit DuplicateName(const std::string& name)
        : Error("duplicate name: " + name), name(name) {}
    std::string name;
};

struct UnknownAttribute : Error {
    explicit UnknownAttribute(const std::string& name)
        : Error("no entity in scope carries attribute: " + name), attribute(name) {}
    std::string attribute;
};

struct UnknownRegisteredCondition : Error {
    explicit UnknownRegisteredCondition(const std::string& name)
        : Error("unknown registered correlation condition: " + name), name(name) {}
    std::string name;
};

struct UnknownAlgorithm : Error {
    explicit UnknownAlgorithm(const std::string& name)
        : Error("unknown algorithm: " + name), name(name) {}
    std::string name;
};

struct UnknownAggregate : Error {
    explicit UnknownAggregate(const std::string& name)
        : Error("unknown aggregate: " + name), name(name) {}
    std::string name;
};

struct UnknownFilterKey : Error {
    explicit UnknownFilterKey(const std::string& key)
        : Error("unknown metadata filter key: " + key), key(key) {}
    std::string key;
};

struct NoDefiningQuery : Error {
    using Error::Error;
};

struct DisconnectedQuery : Error {
    using Error::Error;
};

struct EvaluationTimeout : Error {
    using Error::Error;
};

}  // namespace procgraph
