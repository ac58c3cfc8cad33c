#include "xrewrite/chase.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_set>

namespace xr {

bool ChaseInstance::contains(const Atom& a) const { return std::find(atoms.begin(), atoms.end(), a) != atoms.end(); }

namespace {

struct Trigger {
    size_t tgd;
    Substitution h;
};

class Chaser {
public:
    Chaser(const std::vector<RawTGD>& tgds) : tgds_(tgds) {
        for (const auto& t : tgds_) {
            auto vars = variablesOf(t.body);
            std::sort(vars.begin(), vars.end());
            bodyVars_.push_back(vars);
        }
    }

    ChaseInstance run(const std::vector<Atom>& db, size_t k) {
        for (const auto& a : db) addAtom(a);
        for (size_t s = 0; s < tgds_.size(); ++s)
            forEachHomomorphism(tgds_[s].body, index_, {}, [&](const Substitution& h) {
                enqueue(s, h);
                return true;
            });
        while (!queue_.empty() && inst_.log.size() < k) {
            Trigger t = std::move(queue_.front());
            queue_.pop_front();
            apply(t);
        }
        inst_.saturated = queue_.empty();
        return std::move(inst_);
    }

private:
    bool addAtom(const Atom& a) {
        if (!present_.insert(a).second) return false;
        inst_.atoms.push_back(a);
        index_.add(a);
        return true;
    }

    void enqueue(size_t s, const Substitution& h) {
        std::vector<uint64_t> key{s};
        for (Term v : bodyVars_[s]) key.push_back(h.get(v).bits());
        if (!seen_.insert(key).second) return;
        queue_.push_back({s, h});
    }

    void apply(const Trigger& t) {
        const RawTGD& r = tgds_[t.tgd];
        Substitution h = t.h;
        for (Term z : r.existentials()) h.set(z, Term::null(++inst_.nullCounter));
        inst_.log.push_back({t.tgd, t.h});
        std::vector<Atom> added;
        for (const auto& a : r.head) {
            Atom img = h.apply(a);
            if (addAtom(img)) added.push_back(img);
        }
        for (const auto& a : added) discover(a);
    }

    // triggers that use the new atom somewhere in the body
    void discover(const Atom& fresh) {
        for (size_t s = 0; s < tgds_.size(); ++s) {
            const auto& body = tgds_[s].body;
            for (size_t b = 0; b < body.size(); ++b) {
                const Atom& pat = body[b];
                if (pat.pred != fresh.pred || pat.arity() != fresh.arity()) continue;
                auto seed = findHomomorphism({pat}, {fresh});
                if (!seed) continue;
                std::vector<Atom> rest;
                for (size_t o = 0; o < body.size(); ++o)
                    if (o != b) rest.push_back(body[o]);
                forEachHomomorphism(rest, index_, *seed, [&](const Substitution& h) {
                    enqueue(s, h);
                    return true;
                });
            }
        }
    }

    struct KeyHash {
        size_t operator()(const std::vector<uint64_t>& v) const noexcept {
            size_t h = 1469598103934665603ULL;
            for (uint64_t x : v) h = (h ^ x) * 1099511628211ULL;
            return h;
        }
    };

    const std::vector<RawTGD>& tgds_;
    std::vector<std::vector<Term>> bodyVars_;
    ChaseInstance inst_;
    AtomIndex index_;
    std::unordered_set<Atom, AtomHash> present_;
    std::unordered_set<std::vector<uint64_t>, KeyHash> seen_;
    std::deque<Trigger> queue_;
};

}  // namespace

ChaseInstance chaseUpTo(const std::vector<Atom>& db, const std::vector<RawTGD>& tgds, size_t k) {
    Chaser c(tgds);
    return c.run(db, k);
}

ChaseInstance chaseUpTo(const std::vector<Atom>& db, const std::vector<TGD>& tgds, size_t k) {
    std::vector<RawTGD> raw;
    for (const auto& t : tgds) raw.push_back(RawTGD{t.body, {t.head}, t.label});
    return chaseUpTo(db, raw, k);
}

AnswerSet evaluateCQ(const Query& q, const std::vector<Atom>& instance) {
    AnswerSet out;
    AtomIndex index(instance);
    forEachHomomorphism(q.body, index, {}, [&](const Substitution& h) {
        Tuple t;
        for (Term x : q.head) {
            Term y = h.apply(x);
            if (!y.isConstant()) return true;
            t.push_back(y);
        }
        out.insert(std::move(t));
        return !q.head.empty();
    });
    return out;
}

AnswerSet evaluateUCQ(const std::vector<Query>& ucq, const std::vector<Atom>& instance) {
    AnswerSet out;
    for (const auto& q : ucq) {
        auto part = evaluateCQ(q, instance);
        out.insert(part.begin(), part.end());
    }
    return out;
}

std::vector<Atom> witness(const Query& q, const std::vector<Atom>& instance) {
    std::vector<Atom> out;
    AtomIndex index(instance);
    forEachHomomorphism(q.body, index, {}, [&](const Substitution& h) {
        out = h.apply(q.body);
        return false;
    });
    return out;
}

OracleAnswer certainAnswers(const Query& q, const std::vector<Atom>& db, const std::vector<RawTGD>& tgds,
                            size_t budget) {
    auto inst = chaseUpTo(db, tgds, budget);
    return {evaluateCQ(q, inst.atoms), inst.saturated};
}

std::vector<Query> fdCheckQueries(const std::vector<FunctionalDependency>& fds,
                                  const std::map<uint32_t, size_t>& arities) {
    std::vector<Query> out;
    uint32_t head = Symbols::intern("p");
    uint32_t neq = Symbols::intern("neq");
    for (const auto& fd : fds) {
        auto it = arities.find(fd.pred);
        if (it == arities.end()) continue;
        size_t n = it->second;
        for (uint32_t i : fd.lhs)
            if (i >= n) throw std::invalid_argument("functional dependency " + fd.str() + " exceeds arity " + std::to_string(n));
        for (uint32_t i : fd.rhs)
            if (i >= n) throw std::invalid_argument("functional dependency " + fd.str() + " exceeds arity " + std::to_string(n));
        for (uint32_t j : fd.rhs) {
            if (std::find(fd.lhs.begin(), fd.lhs.end(), j) != fd.lhs.end()) continue;
            Atom a(fd.pred, {}), b(fd.pred, {});
            for (size_t i = 0; i < n; ++i) {
                Term x = Term::variable("X" + std::to_string(i + 1));
                bool key = std::find(fd.lhs.begin(), fd.lhs.end(), i) != fd.lhs.end();
                a.args.push_back(x);
                b.args.push_back(key ? x : Term::variable("Y" + std::to_string(i + 1)));
            }
            Atom diff(neq, {a.args[j], b.args[j]});
            out.emplace_back(head, std::vector<Term>{}, std::vector<Atom>{a, b, diff});
        }
    }
    return out;
}

std::vector<Query> ncCheckQueries(const std::vector<NegativeConstraint>& ncs) {
    std::vector<Query> out;
    uint32_t head = Symbols::intern("p");
    for (const auto& nc : ncs) out.emplace_back(head, std::vector<Term>{}, nc.body);
    return out;
}

std::vector<Atom> withNeq(const std::vector<Atom>& db) {
    std::vector<Term> dom;
    for (const auto& a : db)
        for (Term t : a.args)
            if (t.isConstant()) dom.push_back(t);
    std::sort(dom.begin(), dom.end());
    dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
    std::vector<Atom> out = db;
    uint32_t neq = Symbols::intern("neq");
    for (Term a : dom)
        for (Term b : dom)
            if (a != b) out.emplace_back(neq, std::vector<Term>{a, b});
    return out;
}

}  // namespace xr
