#pragma once

#include <memory>
#include <string>
#include <vector>

#include "xrewrite/graphs.hpp"
#include "xrewrite/lru_cache.hpp"
#include "xrewrite/model.hpp"

namespace xr {

// Constants of q and variables shared in q that occur in a.
std::vector<Term> sharedTerms(const Query& q, const Atom& a);

// Query elimination over a set of linear TGDs.
class Eliminator {
public:
    // Throws std::invalid_argument unless every TGD is linear.
    explicit Eliminator(std::vector<TGD> tgds, size_t maxPathLength = 0, size_t cacheCapacity = 2000);

    // a covers b: b follows from a and can be dropped.
    bool covers(const Atom& a, const Atom& b, const Query& q) const;

    // cover[i] lists the indices j != i of atoms that cover body[i],
    // closed under transitivity.
    std::vector<std::vector<size_t>> coverSets(const Query& q) const;

    // Indices of eliminable atoms, scanning body atoms in `strategy` order.
    std::vector<size_t> eliminate(const Query& q, const std::vector<size_t>& strategy) const;
    std::vector<size_t> eliminate(const Query& q, const std::vector<std::vector<size_t>>& cover,
                                  const std::vector<size_t>& strategy) const;

    // Drops the atoms eliminated under the canonical strategy.
    Query reduce(const Query& q) const;

    const std::vector<TGD>& tgds() const { return tgds_; }
    const CoverGraph& coverGraph() const { return cg_; }
    const PropagationGraph& propagationGraph() const { return pg_; }
    size_t cacheHits() const { return cache_->hits(); }
    size_t cacheMisses() const { return cache_->misses(); }

private:
    std::vector<TGD> tgds_;
    PropagationGraph pg_;
    CoverGraph cg_;
    // predicates produced at the end of a tight chain starting at each TGD
    std::vector<std::vector<uint32_t>> chainHeads_;
    std::shared_ptr<LruCache<std::string, std::vector<size_t>>> cache_;
};

}  // namespace xr
