#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xrewrite/model.hpp"

namespace xr {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": " + msg : msg),
          line(line), column(column) {}
    int line;
    int column;
};

// Everything a .dlog file can hold: rules, constraints, queries and facts.
struct OntologyDocument {
    std::vector<RawTGD> tgds;
    std::vector<NegativeConstraint> ncs;
    std::vector<FunctionalDependency> fds;
    std::vector<Query> queries;
    std::vector<Atom> facts;
    std::map<uint32_t, size_t> arities;
};

OntologyDocument parseOntology(std::string_view text);
// Exactly one query, with or without the leading '?'.
Query parseQuery(std::string_view text);
// Ground facts only.
std::vector<Atom> parseDatabase(std::string_view text);

// Throws ParseError when the query uses a predicate with another arity.
void checkArities(const OntologyDocument& doc, const Query& q);
void checkArities(const OntologyDocument& doc, const std::vector<Atom>& facts);

std::string serialize(const OntologyDocument& doc);
std::string serialize(const Query& q);

std::string readFile(const std::string& path);

}  // namespace xr
