#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "xrewrite/model.hpp"

namespace xr {

using Tuple = std::vector<Term>;
using AnswerSet = std::set<Tuple>;

struct ChaseStep {
    size_t tgd;
    Substitution trigger;
};

struct ChaseInstance {
    std::vector<Atom> atoms;      // insertion order, duplicate free
    uint32_t nullCounter = 0;
    std::vector<ChaseStep> log;
    bool saturated = false;       // no trigger left when the chase stopped

    bool contains(const Atom& a) const;
};

// Oblivious chase with FIFO triggers; stops after k applications.
ChaseInstance chaseUpTo(const std::vector<Atom>& db, const std::vector<RawTGD>& tgds, size_t k);
ChaseInstance chaseUpTo(const std::vector<Atom>& db, const std::vector<TGD>& tgds, size_t k);

// Tuples of constants; tuples holding a null are dropped.
AnswerSet evaluateCQ(const Query& q, const std::vector<Atom>& instance);
AnswerSet evaluateUCQ(const std::vector<Query>& ucq, const std::vector<Atom>& instance);
// Facts matched by the first homomorphism found, empty if none.
std::vector<Atom> witness(const Query& q, const std::vector<Atom>& instance);

struct OracleAnswer {
    AnswerSet answers;
    bool saturated = false;
};

OracleAnswer certainAnswers(const Query& q, const std::vector<Atom>& db, const std::vector<RawTGD>& tgds,
                            size_t budget);

// One Boolean query per right-hand attribute, joined with neq.
std::vector<Query> fdCheckQueries(const std::vector<FunctionalDependency>& fds,
                                  const std::map<uint32_t, size_t>& arities);
std::vector<Query> ncCheckQueries(const std::vector<NegativeConstraint>& ncs);
// db plus neq(a, b) for all distinct constants a, b of its active domain
std::vector<Atom> withNeq(const std::vector<Atom>& db);

}  // namespace xr
