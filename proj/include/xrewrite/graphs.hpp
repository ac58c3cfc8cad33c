#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "xrewrite/model.hpp"

namespace xr {

struct LabeledEdge {
    Position from;
    Position to;
    uint32_t tgd;   // index into the TGD list

    friend auto operator<=>(const LabeledEdge&, const LabeledEdge&) = default;
    friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

class PropagationGraph {
public:
    std::vector<Position> nodes;     // every schema position, sorted
    std::vector<LabeledEdge> edges;  // sorted, duplicate free

    size_t nodeIndex(Position p) const;
    bool hasNode(Position p) const;
    const std::vector<size_t>& outgoing(Position p) const;   // edge indices

    void finish();

private:
    std::vector<std::vector<size_t>> out_;
};

// `arities` adds positions of predicates that no TGD mentions.
PropagationGraph buildPropagationGraph(const std::vector<TGD>& tgds,
                                       const std::map<uint32_t, size_t>& arities = {});

struct LabeledPath {
    std::vector<Position> nodes;
    std::vector<uint32_t> labels;
};

// Paths with at least one edge and no immediately repeated labelled segment.
// maxEdges bounds the search; 0 means the default of 4 * |edges| + 4.
std::vector<LabeledPath> minimalPaths(const PropagationGraph& pg, Position from, Position to, size_t maxEdges = 0);
bool isMinimalPath(const LabeledPath& p);

// Throws std::invalid_argument on a TGD with more than one body atom.
bool isTight(const std::vector<TGD>& seq);
bool isCompatible(const std::vector<TGD>& seq, const Atom& a);
// body(second) maps onto head(first)
bool tightPair(const TGD& first, const TGD& second);

using LabelSeq = std::vector<uint32_t>;

// Pair-keyed closure of the propagation graph over tight label sequences
// that use every TGD at most once.
class CoverGraph {
public:
    std::map<std::pair<Position, Position>, std::vector<LabelSeq>> reach;
    bool truncated = false;   // a length cap cut the search short

    const std::vector<LabelSeq>& sequences(Position from, Position to) const;
    size_t edgeCount() const;
};

// maxLength 0 means no cap.
CoverGraph buildCoverGraph(const std::vector<TGD>& tgds, const PropagationGraph& pg, size_t maxLength = 0);
CoverGraph buildCoverGraph(const std::vector<TGD>& tgds, size_t maxLength = 0);

// Affected positions w.r.t. each TGD, as a least fixpoint.
std::vector<std::set<Position>> affectedPositions(const std::vector<TGD>& tgds);

std::string dumpPropagationGraph(const PropagationGraph& pg, const std::vector<TGD>& tgds);
std::string dumpCoverGraph(const CoverGraph& cg, const std::vector<TGD>& tgds);

}  // namespace xr
