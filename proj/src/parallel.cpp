#include "xrewrite/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <numeric>
#include <unordered_set>

#include <omp.h>

namespace xr {

std::vector<Term> existentialJoinVariables(const Query& q, const std::vector<std::set<Position>>& affected) {
    std::vector<Term> out;
    for (Term v : variablesOf(q.body)) {
        std::vector<Position> where;
        for (const auto& a : q.body)
            for (uint32_t i = 0; i < a.arity(); ++i)
                if (a.args[i] == v) where.push_back({a.pred, i});
        for (const auto& aff : affected) {
            if (aff.empty()) continue;
            bool all = std::all_of(where.begin(), where.end(), [&](Position p) { return aff.count(p) > 0; });
            if (all) {
                out.push_back(v);
                break;
            }
        }
    }
    return out;
}

namespace {

Decomposition build(const Query& q, const std::vector<std::vector<size_t>>& groups) {
    Decomposition d;
    d.query = q;
    auto vars = variablesOf(q);
    d.reconciliation = Query(q.headPred, q.head, {});
    for (size_t c = 0; c < groups.size(); ++c) {
        std::vector<Atom> comp;
        for (size_t i : groups[c]) comp.push_back(q.body[i]);
        auto mine = variablesOf(comp);
        std::vector<Atom> others;
        for (size_t c2 = 0; c2 < groups.size(); ++c2)
            if (c2 != c)
                for (size_t i : groups[c2]) others.push_back(q.body[i]);
        auto theirs = variablesOf(others);
        std::vector<Term> head;
        for (Term v : vars) {
            bool inMine = std::find(mine.begin(), mine.end(), v) != mine.end();
            bool distinguished = std::find(q.head.begin(), q.head.end(), v) != q.head.end();
            bool elsewhere = std::find(theirs.begin(), theirs.end(), v) != theirs.end();
            if (inMine && (distinguished || elsewhere)) head.push_back(v);
        }
        uint32_t pred = Symbols::intern("aux_q" + std::to_string(c + 1));
        d.components.push_back(comp);
        d.componentQueries.emplace_back(pred, head, comp);
        d.reconciliation.body.emplace_back(pred, head);
    }
    return d;
}

}  // namespace

Decomposition trivialDecomposition(const Query& q) {
    std::vector<size_t> all(q.body.size());
    std::iota(all.begin(), all.end(), 0);
    return build(q, {all});
}

Decomposition decompose(const Query& q, const std::vector<std::set<Position>>& affected) {
    size_t n = q.body.size();
    std::vector<size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (Term v : existentialJoinVariables(q, affected)) {
        size_t first = SIZE_MAX;
        for (size_t i = 0; i < n; ++i) {
            if (!containsTerm(q.body[i], v)) continue;
            if (first == SIZE_MAX) first = i;
            else parent[find(i)] = find(first);
        }
    }
    std::vector<std::vector<size_t>> groups;
    std::vector<size_t> groupOf(n, SIZE_MAX);
    for (size_t i = 0; i < n; ++i) {
        size_t r = find(i);
        if (groupOf[r] == SIZE_MAX) {
            groupOf[r] = groups.size();
            groups.emplace_back();
        }
        groups[groupOf[r]].push_back(i);
    }
    if (groups.empty()) groups.emplace_back();
    return build(q, groups);
}

std::vector<Query> unfold(const std::vector<std::vector<Query>>& rewritings, const Query& rho) {
    std::vector<Query> out;
    for (const auto& r : rewritings)
        if (r.empty()) return out;
    size_t m = rewritings.size();
    std::vector<size_t> pick(m, 0);
    std::unordered_set<std::string> seen;
    auto rhoVars = variablesOf(rho);
    std::sort(rhoVars.begin(), rhoVars.end());
    VarRank rank = [&](Term v) { return std::binary_search(rhoVars.begin(), rhoVars.end(), v) ? 0 : 1; };
    while (true) {
        uint32_t fresh = 0;
        Atom lhs(Symbols::intern("="), {}), rhs(lhs.pred, {});
        std::vector<Atom> body;
        for (size_t j = 0; j < m; ++j) {
            const Query& d = rewritings[j][pick[j]];
            Substitution apart;
            for (Term v : variablesOf(d)) apart.set(v, Term::generated(++fresh));
            Query dj = apart.apply(d);
            lhs.args.insert(lhs.args.end(), dj.head.begin(), dj.head.end());
            const auto& target = rho.body[j].args;
            rhs.args.insert(rhs.args.end(), target.begin(), target.end());
            body.insert(body.end(), dj.body.begin(), dj.body.end());
        }
        if (auto gamma = mgu({lhs, rhs}, rank)) {
            Query q = gamma->apply(Query(rho.headPred, rho.head, body));
            if (seen.insert(canonicalString(q)).second) out.push_back(std::move(q));
        }
        size_t j = m;
        while (j > 0) {
            --j;
            if (++pick[j] < rewritings[j].size()) break;
            pick[j] = 0;
            if (j == 0) return out;
        }
        if (m == 0) return out;
    }
}

namespace {

double msSince(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PipelineResult xrewriteParallel(const Query& q, const RewriteContext& ctx) {
    auto t0 = std::chrono::steady_clock::now();
    PipelineResult res;
    const auto mode = ctx.options().subsumption;

    Query reduced = ctx.reduce(q);
    reduced.normalize();
    auto affected = affectedPositions(ctx.tgds());
    res.decomposition = decompose(reduced, affected);
    res.metrics.splitMs = msSince(t0);
    size_t m = res.decomposition.size();
    res.metrics.components = m;

    if (m <= 1) {
        auto r = xrewrite(q, ctx, mode);
        res.ucq = std::move(r.ucq);
        res.decomposition = trivialDecomposition(q);
        res.componentUcqs = {res.ucq};
        double split = res.metrics.splitMs;
        res.metrics = r.metrics;
        res.metrics.splitMs = split;
        res.metrics.components = 1;
        res.metrics.totalMs = msSince(t0);
        return res;
    }

    SubsumptionMode inner = mode == SubsumptionMode::Tail   ? SubsumptionMode::None
                            : mode == SubsumptionMode::IDec ? SubsumptionMode::Tail
                                                            : mode;
    std::vector<RewriteResult> parts(m);
    std::vector<std::exception_ptr> errors(m);
    int threads = int(ctx.options().jobs ? std::min(ctx.options().jobs, m) : m);
    auto tr = std::chrono::steady_clock::now();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long c = 0; c < long(m); ++c) {
        try {
            parts[size_t(c)] = xrewrite(res.decomposition.componentQueries[size_t(c)], ctx, inner);
        } catch (...) {
            errors[size_t(c)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    res.metrics.rewriteMs = msSince(tr);

    for (auto& p : parts) {
        res.componentUcqs.push_back(p.ucq);
        res.metrics.explored += p.metrics.explored;
        res.metrics.generated += p.metrics.generated;
        res.metrics.factorizations += p.metrics.factorizations;
        res.metrics.steps += p.metrics.steps;
    }
    auto tu = std::chrono::steady_clock::now();
    res.ucq = unfold(res.componentUcqs, res.decomposition.reconciliation);
    if (mode == SubsumptionMode::Tail) res.ucq = pruneTail(res.ucq);
    res.metrics.unfoldMs = msSince(tu);
    fillShapeMetrics(res.metrics, res.ucq);
    ctx.collect(res.metrics);
    res.metrics.totalMs = msSince(t0);
    return res;
}

PipelineResult rewriteQuery(const Query& q, const RewriteContext& ctx) {
    if (ctx.options().parallel) return xrewriteParallel(q, ctx);
    PipelineResult res;
    auto r = xrewrite(q, ctx);
    res.ucq = std::move(r.ucq);
    res.decomposition = trivialDecomposition(q);
    res.componentUcqs = {res.ucq};
    res.metrics = r.metrics;
    return res;
}

}  // namespace xr
