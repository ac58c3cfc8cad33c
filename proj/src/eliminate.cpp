#include "xrewrite/eliminate.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace xr {

std::vector<Term> sharedTerms(const Query& q, const Atom& a) {
    std::vector<Term> out;
    for (Term t : a.args) {
        bool keep = t.isVariable() ? isShared(q, t) : true;
        if (keep && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
    return out;
}

Eliminator::Eliminator(std::vector<TGD> tgds, size_t maxPathLength, size_t cacheCapacity)
    : tgds_(std::move(tgds)),
      cache_(std::make_shared<LruCache<std::string, std::vector<size_t>>>(cacheCapacity)) {
    for (const auto& t : tgds_)
        if (t.body.size() != 1) throw std::invalid_argument("query elimination needs linear TGDs");
    pg_ = buildPropagationGraph(tgds_);
    cg_ = buildCoverGraph(tgds_, pg_, maxPathLength);

    size_t n = tgds_.size();
    std::vector<std::vector<size_t>> next(n);
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b)
            if (tightPair(tgds_[a], tgds_[b])) next[a].push_back(b);
    chainHeads_.resize(n);
    for (size_t s = 0; s < n; ++s) {
        std::vector<char> seen(n, 0);
        std::deque<size_t> todo{s};
        seen[s] = 1;
        while (!todo.empty()) {
            size_t cur = todo.front();
            todo.pop_front();
            chainHeads_[s].push_back(tgds_[cur].head.pred);
            for (size_t nx : next[cur])
                if (!seen[nx]) {
                    seen[nx] = 1;
                    todo.push_back(nx);
                }
        }
        std::sort(chainHeads_[s].begin(), chainHeads_[s].end());
        chainHeads_[s].erase(std::unique(chainHeads_[s].begin(), chainHeads_[s].end()), chainHeads_[s].end());
    }
}

bool Eliminator::covers(const Atom& a, const Atom& b, const Query& q) const {
    if (a == b) return false;
    auto T = sharedTerms(q, b);
    for (Term t : T)
        if (!containsTerm(a, t)) return false;

    auto compatible = [&](uint32_t s) { return findHomomorphism(tgds_[s].body, {a}).has_value(); };

    if (T.empty()) {
        for (uint32_t s = 0; s < tgds_.size(); ++s)
            if (std::binary_search(chainHeads_[s].begin(), chainHeads_[s].end(), b.pred) && compatible(s))
                return true;
        return false;
    }

    std::vector<LabelSeq> candidates;
    bool first = true;
    for (Term t : T)
        for (uint32_t j = 0; j < b.arity(); ++j) {
            if (b.args[j] != t) continue;
            Position target{b.pred, j};
            std::vector<LabelSeq> here;
            for (uint32_t i = 0; i < a.arity(); ++i) {
                if (a.args[i] != t) continue;
                const auto& seqs = cg_.sequences(Position{a.pred, i}, target);
                here.insert(here.end(), seqs.begin(), seqs.end());
            }
            std::sort(here.begin(), here.end());
            here.erase(std::unique(here.begin(), here.end()), here.end());
            if (first) {
                candidates = std::move(here);
                first = false;
            } else {
                std::vector<LabelSeq> both;
                std::set_intersection(candidates.begin(), candidates.end(), here.begin(), here.end(),
                                      std::back_inserter(both));
                candidates = std::move(both);
            }
            if (candidates.empty()) return false;
        }
    for (const auto& seq : candidates)
        if (compatible(seq.front())) return true;
    return false;
}

std::vector<std::vector<size_t>> Eliminator::coverSets(const Query& q) const {
    size_t n = q.body.size();
    std::vector<std::vector<char>> rel(n, std::vector<char>(n, 0));   // rel[i][j]: body[j] covers body[i]
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (i != j) rel[i][j] = covers(q.body[j], q.body[i], q);
    for (size_t k = 0; k < n; ++k)
        for (size_t i = 0; i < n; ++i)
            if (rel[i][k])
                for (size_t j = 0; j < n; ++j)
                    if (rel[k][j]) rel[i][j] = 1;
    std::vector<std::vector<size_t>> out(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (i != j && rel[i][j]) out[i].push_back(j);
    return out;
}

std::vector<size_t> Eliminator::eliminate(const Query& q, const std::vector<std::vector<size_t>>& cover0,
                                          const std::vector<size_t>& strategy) const {
    auto cover = cover0;
    std::vector<char> removed(q.body.size(), 0);
    std::vector<size_t> out;
    for (size_t a : strategy) {
        if (cover[a].empty()) continue;
        removed[a] = 1;
        out.push_back(a);
        for (size_t b = 0; b < cover.size(); ++b) {
            if (removed[b]) continue;
            auto& c = cover[b];
            c.erase(std::remove(c.begin(), c.end(), a), c.end());
        }
    }
    return out;
}

std::vector<size_t> Eliminator::eliminate(const Query& q, const std::vector<size_t>& strategy) const {
    return eliminate(q, coverSets(q), strategy);
}

Query Eliminator::reduce(const Query& q) const {
    if (q.body.size() < 2) return q;
    auto [canon, renaming] = canonicalRenaming(q);
    std::string key = canon.str();
    std::vector<size_t> gone;
    if (auto hit = cache_->get(key)) {
        gone = std::move(*hit);
    } else {
        std::vector<size_t> order(canon.body.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        gone = eliminate(canon, order);
        std::sort(gone.begin(), gone.end());
        cache_->put(key, gone);
    }
    if (gone.empty()) return q;
    Substitution back;
    for (const auto& [from, to] : renaming.entries()) back.set(to, from);
    Query out = q;
    out.body.clear();
    for (size_t i = 0; i < canon.body.size(); ++i)
        if (!std::binary_search(gone.begin(), gone.end(), i)) out.body.push_back(back.apply(canon.body[i]));
    out.normalize();
    return out;
}

}  // namespace xr
