#include "xrewrite/rewriter.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <unordered_set>

namespace xr {

size_t countJoins(const Query& q) {
    size_t joins = 0;
    for (Term v : variablesOf(q.body)) {
        size_t n = 0;
        for (const auto& a : q.body) n += std::count(a.args.begin(), a.args.end(), v);
        if (n > 1) joins += n - 1;
    }
    return joins;
}

size_t countJoins(const std::vector<Query>& ucq) {
    size_t n = 0;
    for (const auto& q : ucq) n += countJoins(q);
    return n;
}

void fillShapeMetrics(RewriteMetrics& m, const std::vector<Query>& ucq) {
    m.size = ucq.size();
    m.atoms = 0;
    for (const auto& q : ucq) m.atoms += q.body.size();
    m.joins = countJoins(ucq);
}

// --- query graph ---

size_t QueryGraph::add(QueryNode n) {
    nodes.push_back(std::move(n));
    children.emplace_back();
    return nodes.size() - 1;
}

void QueryGraph::link(size_t parent, size_t child) {
    if (parent >= child) return;   // keeps the graph acyclic with a single root
    auto& c = children[parent];
    if (std::find(c.begin(), c.end(), child) != c.end()) return;
    c.push_back(child);
    nodes[child].parents.push_back(parent);
}

std::vector<size_t> QueryGraph::descendants(size_t v) const {
    std::vector<size_t> out;
    std::vector<char> seen(nodes.size(), 0);
    std::vector<size_t> stack{v};
    while (!stack.empty()) {
        size_t cur = stack.back();
        stack.pop_back();
        for (size_t c : children[cur])
            if (!seen[c]) {
                seen[c] = 1;
                out.push_back(c);
                stack.push_back(c);
            }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool QueryGraph::acyclic() const {
    std::vector<size_t> indeg(nodes.size(), 0);
    for (const auto& cs : children)
        for (size_t c : cs) ++indeg[c];
    std::vector<size_t> ready;
    for (size_t v = 0; v < nodes.size(); ++v)
        if (!indeg[v]) ready.push_back(v);
    size_t seen = 0;
    while (!ready.empty()) {
        size_t v = ready.back();
        ready.pop_back();
        ++seen;
        for (size_t c : children[v])
            if (--indeg[c] == 0) ready.push_back(c);
    }
    return seen == nodes.size();
}

// --- context ---

RewriteContext::RewriteContext(NormalizedOntology onto, const RewriteOptions& opts)
    : onto_(std::move(onto)), opts_(opts), mguCache_(opts.mguCache), renameCache_(opts.renameCache) {
    linear_ = isLinear(onto_.tgds);
    for (uint32_t s = 0; s < onto_.tgds.size(); ++s) index_[onto_.tgds[s].head.pred].push_back(s);
    if (opts_.elimination && linear_)
        elim_ = std::make_unique<Eliminator>(onto_.tgds, opts_.maxPathLength, opts_.eliminationCache);
}

const std::vector<uint32_t>& RewriteContext::byHead(uint32_t pred) const {
    static const std::vector<uint32_t> none;
    auto it = index_.find(pred);
    return it == index_.end() ? none : it->second;
}

std::string RewriteContext::canonicalKey(const Query& q) const {
    if (auto hit = renameCache_.get(q)) return *hit;
    std::string key = canonicalString(q);
    renameCache_.put(q, key);
    return key;
}

std::optional<Substitution> RewriteContext::unify(const std::vector<Atom>& atoms, const VarRank& rank) const {
    // variables renamed by first occurrence so that equal shapes share an entry
    std::vector<Term> vars = variablesOf(atoms);
    std::vector<int> ranks(vars.size());
    std::string key;
    auto put = [&](uint64_t x) { key.append(reinterpret_cast<const char*>(&x), sizeof x); };
    for (size_t k = 0; k < vars.size(); ++k) ranks[k] = rank ? rank(vars[k]) : 0;
    auto slot = [&](Term t) { return size_t(std::find(vars.begin(), vars.end(), t) - vars.begin()); };
    std::vector<Atom> shaped;
    for (const auto& a : atoms) {
        put(a.pred);
        put(a.arity());
        Atom s(a.pred, {});
        for (Term t : a.args) {
            if (t.isGround()) {
                put(t.bits());
                s.args.push_back(t);
            } else {
                size_t k = slot(t);
                put(~uint64_t(0) - k);
                put(uint64_t(ranks[k]));
                s.args.push_back(Term::generated(uint32_t(k + 1)));
            }
        }
        shaped.push_back(std::move(s));
    }
    std::optional<Substitution> shapedMgu;
    if (auto hit = mguCache_.get(key)) {
        shapedMgu = std::move(*hit);
    } else {
        shapedMgu = mgu(shaped, [&](Term t) { return ranks[t.tag() - 1]; });
        mguCache_.put(key, shapedMgu);
    }
    if (!shapedMgu) return std::nullopt;
    Substitution out;
    auto back = [&](Term t) { return t.isGround() ? t : vars[t.tag() - 1]; };
    for (const auto& [from, to] : shapedMgu->entries()) out.set(back(from), back(to));
    return out;
}

Query RewriteContext::reduce(const Query& q) const { return elim_ ? elim_->reduce(q) : q; }

void RewriteContext::collect(RewriteMetrics& m) const {
    m.mguHits = mguCache_.hits();
    m.mguMisses = mguCache_.misses();
    m.renameHits = renameCache_.hits();
    m.renameMisses = renameCache_.misses();
    if (elim_) {
        m.eliminationHits = elim_->cacheHits();
        m.eliminationMisses = elim_->cacheMisses();
    }
}

// --- steps ---

TGD renameTGD(const TGD& t, uint32_t i) {
    TGD out = t;
    auto ren = [&](Atom& a) {
        for (Term& x : a.args)
            if (x.isVariable()) x = x.withTag(i);
    };
    for (auto& a : out.body) ren(a);
    ren(out.head);
    return out;
}

namespace {

constexpr uint32_t kProbeTag = 0xffffffffu;

using Unifier = std::function<std::optional<Substitution>(const std::vector<Atom>&, const VarRank&)>;

std::optional<Substitution> plainUnify(const std::vector<Atom>& atoms, const VarRank& rank) { return mgu(atoms, rank); }

bool existentialSafe(const TGD& sigma, const std::vector<Atom>& S, const Query& q) {
    if (sigma.existPos < 0) return true;
    for (const auto& a : S) {
        if (a.pred != sigma.head.pred || a.arity() != sigma.head.arity()) return false;
        Term t = a.args[size_t(sigma.existPos)];
        if (!t.isVariable() || isShared(q, t)) return false;
    }
    return true;
}

std::optional<Query> rewriteWith(const Query& q, const std::vector<Atom>& S, const TGD& sigma, uint32_t i,
                                 const Unifier& unify) {
    TGD si = renameTGD(sigma, i);
    std::vector<Atom> atoms = S;
    atoms.push_back(si.head);
    auto gamma = unify(atoms, stepRank(q));
    if (!gamma) return std::nullopt;
    Query out = q;
    out.body.clear();
    for (const auto& a : q.body)
        if (std::find(S.begin(), S.end(), a) == S.end()) out.body.push_back(a);
    out.body.insert(out.body.end(), si.body.begin(), si.body.end());
    return gamma->apply(out);
}

std::optional<Query> factorizeWith(const Query& q, const std::vector<Atom>& S, const Unifier& unify) {
    auto gamma = unify(S, stepRank(q));
    if (!gamma) return std::nullopt;
    return gamma->apply(q);
}

}  // namespace

VarRank stepRank(const Query& q) {
    auto vars = std::make_shared<std::vector<Term>>(variablesOf(q));
    std::sort(vars->begin(), vars->end());
    return [vars](Term v) {
        if (v.tag() == 0 && v.sym() != 0) return 0;
        return std::binary_search(vars->begin(), vars->end(), v) ? 1 : 2;
    };
}

bool applicable(const TGD& sigma, const std::vector<Atom>& S, const Query& q) {
    if (S.empty() || !existentialSafe(sigma, S, q)) return false;
    std::vector<Atom> atoms = S;
    atoms.push_back(renameTGD(sigma, kProbeTag).head);
    return mgu(atoms).has_value();
}

bool factorizable(const std::vector<Atom>& S, const TGD& sigma, const Query& q) {
    if (S.size() < 2 || sigma.existPos < 0) return false;
    for (const auto& a : S)
        if (a.pred != sigma.head.pred || a.arity() != sigma.head.arity()) return false;
    if (!mgu(S)) return false;
    std::vector<Atom> rest;
    for (const auto& a : q.body)
        if (std::find(S.begin(), S.end(), a) == S.end()) rest.push_back(a);
    auto outside = variablesOf(rest);
    size_t ep = size_t(sigma.existPos);
    Term v = S.front().args[ep];
    if (!v.isVariable() || std::find(outside.begin(), outside.end(), v) != outside.end()) return false;
    for (const auto& a : S)
        for (size_t k = 0; k < a.arity(); ++k)
            if ((a.args[k] == v) != (k == ep)) return false;
    return true;
}

std::optional<Query> rewriteStep(const Query& q, const std::vector<Atom>& S, const TGD& sigma, uint32_t i) {
    return rewriteWith(q, S, sigma, i, plainUnify);
}

std::optional<Query> factorizeStep(const Query& q, const std::vector<Atom>& S) {
    return factorizeWith(q, S, plainUnify);
}

// --- rewriting loop ---

namespace {

class Loop {
public:
    Loop(const RewriteContext& ctx, RewriteResult& res, SubsumptionMode mode) : ctx_(ctx), res_(res), G(res.graph) {
        unify_ = [this](const std::vector<Atom>& atoms, const VarRank& rank) { return ctx_.unify(atoms, rank); };
        irew_ = mode == SubsumptionMode::IRew;
    }

    void run(const Query& input) {
        Query q0 = ctx_.reduce(input);
        q0.normalize();
        inputVars_ = variablesOf(q0);
        std::sort(inputVars_.begin(), inputVars_.end());
        std::string key = ctx_.canonicalKey(q0);
        size_t root = G.add(QueryNode{q0, 'r', false, false, {}});
        rKeys_[key] = root;
        allKeys_[key] = root;
        observe(q0);

        const size_t budget = ctx_.options().budget;
        while (true) {
            std::vector<size_t> temp;
            for (size_t v = 0; v < G.nodes.size(); ++v)
                if (!G.nodes[v].explored && !G.nodes[v].removed) temp.push_back(v);
            if (temp.empty()) break;
            for (size_t v : temp) {
                if (G.nodes[v].removed) continue;
                const Query cur = G.nodes[v].query;
                std::set<uint32_t> sigmas;
                for (const auto& a : cur.body)
                    for (uint32_t s : ctx_.byHead(a.pred)) sigmas.insert(s);
                for (uint32_t s : sigmas) {
                    const TGD& sigma = ctx_.tgds()[s];
                    std::vector<Atom> cand;
                    for (const auto& a : cur.body)
                        if (a.pred == sigma.head.pred && a.arity() == sigma.head.arity()) cand.push_back(a);
                    // rewriting step
                    forSubsets(cand, 1, [&](const std::vector<Atom>& S) {
                        if (!existentialSafe(sigma, S, cur)) return;
                        auto next = rewriteWith(cur, S, sigma, step_ + 1, unify_);
                        if (!next) return;
                        ++step_;
                        ++res_.metrics.generated;
                        if (budget && step_ > budget)
                            throw BudgetExhausted("step budget of " + std::to_string(budget) + " exhausted");
                        admitR(v, ctx_.reduce(*next));
                    });
                    // factorization step
                    if (sigma.existPos < 0) continue;
                    forSubsets(cand, 2, [&](const std::vector<Atom>& S) {
                        if (!factorizable(S, sigma, cur)) return;
                        auto next = factorizeWith(cur, S, unify_);
                        if (!next) return;
                        ++res_.metrics.factorizations;
                        admitF(v, ctx_.reduce(*next));
                    });
                }
                G.nodes[v].explored = true;
                ++res_.metrics.explored;
            }
        }
        res_.metrics.steps = step_;
    }

private:
    template <class F>
    static void forSubsets(const std::vector<Atom>& cand, size_t minSize, F&& fn) {
        size_t n = cand.size();
        std::vector<size_t> idx;
        std::vector<Atom> S;
        for (size_t k = minSize; k <= n; ++k) {
            idx.resize(k);
            for (size_t j = 0; j < k; ++j) idx[j] = j;
            while (true) {
                S.clear();
                for (size_t j : idx) S.push_back(cand[j]);
                fn(S);
                size_t j = k;
                while (j > 0 && idx[j - 1] == n - k + j - 1) --j;
                if (j == 0) break;
                ++idx[j - 1];
                for (size_t t = j; t < k; ++t) idx[t] = idx[t - 1] + 1;
            }
        }
    }

    void observe(const Query& q) {
        if (ctx_.options().observer) ctx_.options().observer(q);
    }

    bool loneFresh(const Query& q, Term t) const {
        return t.isVariable() && !std::binary_search(inputVars_.begin(), inputVars_.end(), t) && occurrences(q, t) == 1;
    }

    // Two atoms that agree once every fresh variable occurring once is read as
    // an anonymous term are the same atom; keep one of them.
    void foldFresh(Query& q) const {
        for (bool changed = true; changed;) {
            changed = false;
            for (size_t i = 0; i < q.body.size() && !changed; ++i)
                for (size_t j = 0; j < q.body.size() && !changed; ++j) {
                    const Atom &a = q.body[i], &b = q.body[j];
                    if (i == j || a.pred != b.pred || a.arity() != b.arity()) continue;
                    bool maps = true;
                    for (size_t k = 0; k < a.arity() && maps; ++k)
                        maps = a.args[k] == b.args[k] || (loneFresh(q, a.args[k]) && loneFresh(q, b.args[k]));
                    if (!maps) continue;
                    q.body.erase(q.body.begin() + i);
                    changed = true;
                }
        }
    }

    void admitR(size_t parent, Query q) {
        q.normalize();
        foldFresh(q);
        std::string key = ctx_.canonicalKey(q);
        if (auto it = rKeys_.find(key); it != rKeys_.end()) {
            G.link(parent, it->second);
            return;
        }
        observe(q);
        if (irew_) {
            for (size_t w = 0; w < G.nodes.size(); ++w) {
                const auto& n = G.nodes[w];
                if (n.origin == 'r' && !n.removed && subsumes(n.query, q)) return;
            }
            for (size_t w = 0; w < G.nodes.size(); ++w) {
                const auto& n = G.nodes[w];
                if (n.origin == 'r' && !n.removed && subsumes(q, n.query)) remove(w);
            }
        }
        size_t id = G.add(QueryNode{std::move(q), 'r', false, false, {}});
        rKeys_[key] = id;
        allKeys_.emplace(key, id);
        G.link(parent, id);
    }

    void admitF(size_t parent, Query q) {
        q.normalize();
        foldFresh(q);
        std::string key = ctx_.canonicalKey(q);
        if (auto it = allKeys_.find(key); it != allKeys_.end()) {
            G.link(parent, it->second);
            return;
        }
        observe(q);
        size_t id = G.add(QueryNode{std::move(q), 'f', false, false, {}});
        allKeys_[key] = id;
        G.link(parent, id);
    }

    // IRew removal; a descendant goes only once all of its parents are gone
    void remove(size_t w) {
        std::vector<size_t> stack{w};
        while (!stack.empty()) {
            size_t v = stack.back();
            stack.pop_back();
            auto& n = G.nodes[v];
            if (n.removed || n.origin != 'r') continue;
            n.removed = true;
            std::string key = ctx_.canonicalKey(n.query);
            if (auto it = rKeys_.find(key); it != rKeys_.end() && it->second == v) rKeys_.erase(it);
            if (auto it = allKeys_.find(key); it != allKeys_.end() && it->second == v) allKeys_.erase(it);
            for (size_t c : G.children[v]) {
                const auto& ps = G.nodes[c].parents;
                bool orphan = std::all_of(ps.begin(), ps.end(), [&](size_t p) { return G.nodes[p].removed; });
                if (orphan) stack.push_back(c);
            }
        }
    }

    const RewriteContext& ctx_;
    RewriteResult& res_;
    QueryGraph& G;
    Unifier unify_;
    bool irew_ = false;
    uint32_t step_ = 0;
    std::vector<Term> inputVars_;
    std::unordered_map<std::string, size_t> rKeys_, allKeys_;
};

}  // namespace

RewriteResult xrewrite(const Query& q, const RewriteContext& ctx) { return xrewrite(q, ctx, ctx.options().subsumption); }

RewriteResult xrewrite(const Query& q, const RewriteContext& ctx, SubsumptionMode mode) {
    auto t0 = std::chrono::steady_clock::now();
    RewriteResult res;
    Loop loop(ctx, res, mode);
    loop.run(q);
    const auto& onto = ctx.ontology();
    for (const auto& n : res.graph.nodes)
        if (n.origin == 'r' && n.explored && !n.removed && !onto.mentionsAux(n.query)) res.ucq.push_back(n.query);
    if (mode == SubsumptionMode::Tail || mode == SubsumptionMode::IDec) res.ucq = pruneTail(res.ucq);
    auto t1 = std::chrono::steady_clock::now();
    res.metrics.rewriteMs = std::chrono::duration<double, std::milli>(t1 - t0).count();
    res.metrics.totalMs = res.metrics.rewriteMs;
    fillShapeMetrics(res.metrics, res.ucq);
    ctx.collect(res.metrics);
    return res;
}

RewriteResult xrewrite(const Query& q, const NormalizedOntology& onto, const RewriteOptions& opts) {
    RewriteContext ctx(onto, opts);
    return xrewrite(q, ctx);
}

Query prettify(const Query& q) {
    Substitution s;
    size_t next = 0;
    auto name = [](size_t k) {
        std::string n(1, char('A' + k % 26));
        if (k >= 26) n += std::to_string(k / 26);
        return n;
    };
    for (Term v : variablesOf(q)) s.set(v, Term::variable(name(next++)));
    Query out = s.apply(q);
    return out;
}

}  // namespace xr
