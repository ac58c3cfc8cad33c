#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "xrewrite/eliminate.hpp"
#include "xrewrite/lru_cache.hpp"
#include "xrewrite/model.hpp"
#include "xrewrite/normalize.hpp"
#include "xrewrite/subsume.hpp"

namespace xr {

struct RewriteOptions {
    bool elimination = true;
    bool parallel = true;
    SubsumptionMode subsumption = SubsumptionMode::None;
    size_t budget = 0;            // rewriting steps, 0 = unbounded
    size_t jobs = 0;              // 0 = one worker per component
    size_t mguCache = 4500;
    size_t renameCache = 55000;
    size_t eliminationCache = 2000;
    size_t maxPathLength = 0;     // cover graph cap, 0 = none
    // sees every query admitted to the rewriting set; called from worker
    // threads when components are rewritten in parallel
    std::function<void(const Query&)> observer;
};

struct RewriteMetrics {
    size_t size = 0;
    size_t atoms = 0;
    size_t joins = 0;
    size_t explored = 0;
    size_t generated = 0;
    size_t factorizations = 0;
    size_t steps = 0;              // the counter i
    size_t components = 1;
    size_t mguHits = 0, mguMisses = 0;
    size_t renameHits = 0, renameMisses = 0;
    size_t eliminationHits = 0, eliminationMisses = 0;
    double rewriteMs = 0, splitMs = 0, unfoldMs = 0, totalMs = 0;
};

// Σ over disjuncts of Σ over variables of max(occurrences - 1, 0), body only.
size_t countJoins(const Query& q);
size_t countJoins(const std::vector<Query>& ucq);
void fillShapeMetrics(RewriteMetrics& m, const std::vector<Query>& ucq);

class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QueryNode {
    Query query;
    char origin = 'r';     // 'r' or 'f'
    bool explored = false;
    bool removed = false;  // pruned by IRew
    std::vector<size_t> parents;
};

// Provenance: an edge from a query to every query produced from it.
class QueryGraph {
public:
    std::vector<QueryNode> nodes;
    std::vector<std::vector<size_t>> children;

    size_t add(QueryNode n);
    void link(size_t parent, size_t child);
    std::vector<size_t> descendants(size_t v) const;
    bool acyclic() const;
};

// Everything derived once per ontology and shared by rewriter instances.
class RewriteContext {
public:
    RewriteContext(NormalizedOntology onto, const RewriteOptions& opts);

    const NormalizedOntology& ontology() const { return onto_; }
    const std::vector<TGD>& tgds() const { return onto_.tgds; }
    const std::vector<uint32_t>& byHead(uint32_t pred) const;
    const RewriteOptions& options() const { return opts_; }
    // null when elimination is off or the TGDs are not linear
    const Eliminator* eliminator() const { return elim_.get(); }
    bool linear() const { return linear_; }

    std::string canonicalKey(const Query& q) const;
    std::optional<Substitution> unify(const std::vector<Atom>& atoms, const VarRank& rank) const;
    Query reduce(const Query& q) const;

    void collect(RewriteMetrics& m) const;

private:
    NormalizedOntology onto_;
    RewriteOptions opts_;
    bool linear_ = false;
    std::unordered_map<uint32_t, std::vector<uint32_t>> index_;
    std::unique_ptr<Eliminator> elim_;
    mutable LruCache<std::string, std::optional<Substitution>> mguCache_;
    mutable LruCache<Query, std::string, QueryHash> renameCache_;
};

// σ with every variable X renamed to X^i.
TGD renameTGD(const TGD& t, uint32_t i);

bool applicable(const TGD& sigma, const std::vector<Atom>& S, const Query& q);
bool factorizable(const std::vector<Atom>& S, const TGD& sigma, const Query& q);
// Representative preference used by both steps: variables of the input
// query, then other variables of q, then the rest.
VarRank stepRank(const Query& q);
// nullopt if S ∪ {head(σ^i)} does not unify
std::optional<Query> rewriteStep(const Query& q, const std::vector<Atom>& S, const TGD& sigma, uint32_t i);
std::optional<Query> factorizeStep(const Query& q, const std::vector<Atom>& S);

struct RewriteResult {
    std::vector<Query> ucq;
    QueryGraph graph;
    RewriteMetrics metrics;
};

// Rewrites q into a UCQ (with elimination and IRew when the options ask for them).
// Throws BudgetExhausted when the step budget runs out.
RewriteResult xrewrite(const Query& q, const RewriteContext& ctx);
RewriteResult xrewrite(const Query& q, const RewriteContext& ctx, SubsumptionMode mode);
RewriteResult xrewrite(const Query& q, const NormalizedOntology& onto, const RewriteOptions& opts);

// Display form: variables renamed A, B, C, ... in order of first use.
Query prettify(const Query& q);

}  // namespace xr
