#pragma once

#include <set>
#include <vector>

#include "xrewrite/graphs.hpp"
#include "xrewrite/rewriter.hpp"

namespace xr {

struct Decomposition {
    Query query;                              // the decomposed query
    std::vector<std::vector<Atom>> components;
    std::vector<Query> componentQueries;      // heads aux_q<i>(...)
    Query reconciliation;                     // p(X) :- aux_q1(...), ..., aux_qm(...)

    size_t size() const { return components.size(); }
};

// Variables whose body occurrences all sit at positions affected w.r.t. one TGD.
std::vector<Term> existentialJoinVariables(const Query& q, const std::vector<std::set<Position>>& affected);

Decomposition decompose(const Query& q, const std::vector<std::set<Position>>& affected);
// One component holding the whole body.
Decomposition trivialDecomposition(const Query& q);

// Expands rho over the disjuncts of each component rewriting.
std::vector<Query> unfold(const std::vector<std::vector<Query>>& rewritings, const Query& rho);

struct PipelineResult {
    std::vector<Query> ucq;
    Decomposition decomposition;
    std::vector<std::vector<Query>> componentUcqs;
    RewriteMetrics metrics;
};

// Reduce, decompose, rewrite the components concurrently, unfold, prune.
// With parallel off this is XRewrite plus the requested subsumption mode.
PipelineResult rewriteQuery(const Query& q, const RewriteContext& ctx);
PipelineResult xrewriteParallel(const Query& q, const RewriteContext& ctx);

}  // namespace xr
