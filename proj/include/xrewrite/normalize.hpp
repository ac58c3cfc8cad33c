#pragma once

#include <set>
#include <string>
#include <vector>

#include "xrewrite/model.hpp"
#include "xrewrite/parser.hpp"

namespace xr {

struct NormalizedOntology {
    std::vector<TGD> tgds;
    std::vector<int> provenance;        // source rule index per TGD
    std::set<uint32_t> auxPredicates;

    bool isAux(uint32_t pred) const { return auxPredicates.count(pred) > 0; }
    bool mentionsAux(const Query& q) const;
};

inline constexpr const char* kAuxPrefix = "aux_";
bool isReservedPredicate(uint32_t pred);
// Throws ParseError if the user's input uses the reserved prefix.
void checkReservedPredicates(const OntologyDocument& doc);

// Single head atom with its existential position filled in.
TGD makeTGD(std::vector<Atom> body, Atom head, std::string label = {}, int origin = -1);
bool inNormalForm(const RawTGD& r);

NormalizedOntology normalizeTGDs(const std::vector<RawTGD>& raw);
NormalizedOntology normalizeTGDs(const OntologyDocument& doc);

bool isLinear(const std::vector<TGD>& tgds);
bool isMultiLinear(const std::vector<TGD>& tgds);
bool isLinear(const std::vector<RawTGD>& tgds);
bool isMultiLinear(const std::vector<RawTGD>& tgds);

struct MarkedTGDSet {
    std::vector<RawTGD> tgds;
    std::vector<std::set<Term>> markedVars;
    // (body atom index, argument index) of every marked occurrence
    std::vector<std::vector<std::pair<size_t, size_t>>> marks;
};

MarkedTGDSet smark(const std::vector<RawTGD>& tgds);
MarkedTGDSet smark(const std::vector<TGD>& tgds);
bool isSticky(const MarkedTGDSet& marked);
bool isSticky(const std::vector<TGD>& tgds);
bool isSticky(const std::vector<RawTGD>& tgds);

std::vector<RawTGD> asRaw(const std::vector<TGD>& tgds);

}  // namespace xr
