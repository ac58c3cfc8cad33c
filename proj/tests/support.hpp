#pragma once

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "xrewrite/chase.hpp"
#include "xrewrite/model.hpp"
#include "xrewrite/normalize.hpp"
#include "xrewrite/parallel.hpp"
#include "xrewrite/parser.hpp"
#include "xrewrite/rewriter.hpp"

namespace xrt {

using namespace xr;

OntologyDocument doc(const std::string& text);
NormalizedOntology onto(const std::string& text);
Query cq(const std::string& text);
Atom atom(const std::string& text);   // "r(A,b)"

std::set<std::string> canonSet(const std::vector<Query>& ucq);
std::string repoPath(const std::string& rel);

// --- independent oracles ---

// Tries every assignment of the variables of `from` to terms of `to`.
bool bruteHomomorphism(const std::vector<Atom>& from, const std::vector<Atom>& to,
                       const std::vector<Term>& headFrom = {}, const std::vector<Term>& headTo = {});
bool bruteSubsumes(const Query& q1, const Query& q2);
// Nested-loop join over the facts; constant tuples only.
AnswerSet bruteEval(const Query& q, const std::vector<Atom>& facts);
AnswerSet bruteEval(const std::vector<Query>& ucq, const std::vector<Atom>& facts);

// Counts the queries p <- p_{i1}(A1), ..., p_{in}(An) with each atom picked
// independently among p_0..p_m.
size_t productCount(size_t m, size_t n);
// Closure of the Boolean query p <- p0(A1..An) under the rules p_i(X) -> p0(X),
// counted as distinct bodies modulo renaming, with a rewriting step allowed
// to fold several p0 atoms into one.
size_t foldedMultisetCount(size_t m, size_t n);
std::string sizeLawOntology(size_t m);
std::string sizeLawQuery(size_t n);

// --- random instances ---

struct Instance {
    std::string text;            // rules in the input language
    std::vector<RawTGD> raw;
    NormalizedOntology onto;
    Query query;
    std::vector<Atom> db;
    bool sticky = false;
};

struct GenParams {
    size_t maxTgds = 6;
    size_t maxArity = 3;
    size_t predicates = 4;
    size_t maxFacts = 8;
    size_t constants = 4;
    size_t maxQueryAtoms = 3;
};

// Linear sets in normal form.
Instance randomLinear(std::mt19937& rng, const GenParams& p = {});
// Sticky sets in normal form, some with two body atoms.
Instance randomSticky(std::mt19937& rng, const GenParams& p = {});
std::vector<Atom> randomDatabase(std::mt19937& rng, const std::map<uint32_t, size_t>& arities, size_t maxFacts,
                                 size_t constants);
Query randomQuery(std::mt19937& rng, const std::map<uint32_t, size_t>& arities, size_t maxAtoms, size_t maxBodyVars,
                  size_t constants);

std::map<uint32_t, size_t> aritiesOf(const std::vector<RawTGD>& tgds);

struct CheckReport {
    size_t instances = 0;
    size_t skipped = 0;           // rewriting budget ran out
    size_t unsaturated = 0;       // chase stopped at the budget
    size_t violations = 0;
    std::vector<std::string> details;
};

// Soundness against the chase at `chaseBudget`, completeness against every
// chase prefix up to it.
CheckReport soundCompleteSuite(size_t count, unsigned seed, size_t chaseBudget, size_t stepBudget);

struct InvariantReport {
    size_t queries = 0;
    size_t violations = 0;
    std::vector<std::string> details;
};

// Size bound for linear sets and single occurrence of fresh variables for
// sticky sets, on every query the rewriter admits.
InvariantReport rewritingInvariants(size_t count, unsigned seed, size_t stepBudget);

struct StrategyReport {
    size_t queries = 0;
    size_t mismatches = 0;
    std::vector<std::string> details;
};

// Every body permutation eliminates the same number of atoms.
StrategyReport strategyInvariance(size_t count, unsigned seed);

}  // namespace xrt
