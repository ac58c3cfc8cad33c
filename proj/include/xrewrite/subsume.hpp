#pragma once

#include <string>
#include <vector>

#include "xrewrite/model.hpp"

namespace xr {

enum class SubsumptionMode { None, Tail, IDec, IRew };

SubsumptionMode parseSubsumptionMode(const std::string& s);   // throws std::invalid_argument
std::string toString(SubsumptionMode m);

// h(body(q1)) ⊆ body(q2) and h(head(q1)) = head(q2)
bool subsumes(const Query& q1, const Query& q2);

// Drops every subsumed disjunct. Of two equivalent disjuncts the one with
// the smaller canonical form stays. The result keeps the input order.
std::vector<Query> pruneTail(const std::vector<Query>& ucq);

}  // namespace xr
