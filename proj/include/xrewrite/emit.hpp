#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "xrewrite/model.hpp"
#include "xrewrite/parallel.hpp"
#include "xrewrite/rewriter.hpp"

namespace xr {

class EmitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TableBinding {
    std::string table;
    std::vector<std::string> columns;
};

// Predicate name to table. Unknown predicates fall back to the default
// binding (table named after the predicate, columns c1..cn) only when
// `defaults` is set.
class SchemaMapping {
public:
    std::map<std::string, TableBinding> tables;
    bool defaults = false;

    // {"pred": {"table": "t", "columns": ["a", "b"]}, ...}
    static SchemaMapping fromJson(const std::string& text);
    static SchemaMapping defaultMapping();

    TableBinding lookup(const std::string& pred, size_t arity) const;
};

std::string sqlLiteral(Term constant);
std::string toSQL(const Query& q, const SchemaMapping& mapping);
std::string toSQL(const std::vector<Query>& ucq, const SchemaMapping& mapping);

// One rule per line, variables prettified.
std::string ucqText(const std::vector<Query>& ucq);
// Component rewritings over aux_q<i> followed by the reconciliation rule.
std::string toDatalog(const PipelineResult& r);

std::string statsText(const RewriteMetrics& m);
std::string statsKeyValue(const RewriteMetrics& m);

}  // namespace xr
