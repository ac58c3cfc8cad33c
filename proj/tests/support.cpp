#include "support.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "xrewrite/eliminate.hpp"

namespace xrt {

OntologyDocument doc(const std::string& text) { return parseOntology(text); }

NormalizedOntology onto(const std::string& text) { return normalizeTGDs(parseOntology(text)); }

Query cq(const std::string& text) { return parseQuery(text); }

Atom atom(const std::string& text) { return parseQuery("probe__() :- " + text + ".").body.front(); }

std::set<std::string> canonSet(const std::vector<Query>& ucq) {
    std::set<std::string> out;
    for (const auto& q : ucq) out.insert(canonicalString(q));
    return out;
}

std::string repoPath(const std::string& rel) { return std::string(XR_SOURCE_DIR) + "/" + rel; }

// --- oracles ---

bool bruteHomomorphism(const std::vector<Atom>& from, const std::vector<Atom>& to, const std::vector<Term>& headFrom,
                       const std::vector<Term>& headTo) {
    if (headFrom.size() != headTo.size()) return false;
    std::vector<Term> vars;
    auto addVar = [&](Term t) {
        if (t.isVariable() && std::find(vars.begin(), vars.end(), t) == vars.end()) vars.push_back(t);
    };
    for (const auto& a : from)
        for (Term t : a.args) addVar(t);
    for (Term t : headFrom) addVar(t);
    std::vector<Term> range;
    for (const auto& a : to) range.insert(range.end(), a.args.begin(), a.args.end());
    range.insert(range.end(), headTo.begin(), headTo.end());
    std::sort(range.begin(), range.end());
    range.erase(std::unique(range.begin(), range.end()), range.end());
    std::set<Atom> target(to.begin(), to.end());

    // an atom is checked as soon as its last variable is assigned
    std::vector<std::vector<size_t>> ready(vars.size() + 1);
    for (size_t i = 0; i < from.size(); ++i) {
        size_t last = 0;
        for (Term t : from[i].args)
            if (t.isVariable()) last = std::max(last, size_t(std::find(vars.begin(), vars.end(), t) - vars.begin()) + 1);
        ready[last].push_back(i);
    }
    std::map<Term, Term> h;
    auto img = [&](Term t) { return t.isVariable() ? h.at(t) : t; };
    auto holds = [&](size_t level) {
        for (size_t i : ready[level]) {
            Atom b = from[i];
            for (auto& t : b.args) t = img(t);
            if (!target.count(b)) return false;
        }
        return true;
    };
    std::function<bool(size_t)> go = [&](size_t k) {
        if (!holds(k)) return false;
        if (k == vars.size()) {
            for (size_t i = 0; i < headFrom.size(); ++i)
                if (img(headFrom[i]) != headTo[i]) return false;
            return true;
        }
        for (Term r : range) {
            h[vars[k]] = r;
            if (go(k + 1)) return true;
        }
        h.erase(vars[k]);
        return false;
    };
    if (vars.empty()) return go(0);
    if (range.empty()) return false;
    return go(0);
}

bool bruteSubsumes(const Query& q1, const Query& q2) { return bruteHomomorphism(q1.body, q2.body, q1.head, q2.head); }

AnswerSet bruteEval(const Query& q, const std::vector<Atom>& facts) {
    std::map<uint32_t, std::vector<const Atom*>> byPred;
    for (const auto& f : facts) byPred[f.pred].push_back(&f);
    AnswerSet out;
    std::map<Term, Term> h;
    std::function<void(size_t)> go = [&](size_t k) {
        if (k == q.body.size()) {
            Tuple t;
            for (Term x : q.head) {
                Term y = x.isVariable() ? h.at(x) : x;
                if (!y.isConstant()) return;
                t.push_back(y);
            }
            out.insert(t);
            return;
        }
        const Atom& a = q.body[k];
        auto it = byPred.find(a.pred);
        if (it == byPred.end()) return;
        for (const Atom* f : it->second) {
            if (f->arity() != a.arity()) continue;
            std::vector<Term> bound;
            bool ok = true;
            for (size_t i = 0; i < a.arity() && ok; ++i) {
                Term s = a.args[i], t = f->args[i];
                if (!s.isVariable()) {
                    ok = s == t;
                } else if (auto b = h.find(s); b != h.end()) {
                    ok = b->second == t;
                } else {
                    h[s] = t;
                    bound.push_back(s);
                }
            }
            if (ok) go(k + 1);
            for (Term s : bound) h.erase(s);
            if (q.head.empty() && !out.empty()) return;
        }
    };
    go(0);
    return out;
}

AnswerSet bruteEval(const std::vector<Query>& ucq, const std::vector<Atom>& facts) {
    AnswerSet out;
    for (const auto& q : ucq) {
        auto part = bruteEval(q, facts);
        out.insert(part.begin(), part.end());
    }
    return out;
}

size_t productCount(size_t m, size_t n) {
    size_t r = 1;
    for (size_t i = 0; i < n; ++i) r *= m + 1;
    return r;
}

size_t foldedMultisetCount(size_t m, size_t n) {
    // state: number of p0 atoms left and the sorted multiset of p_i atoms
    using State = std::pair<size_t, std::vector<size_t>>;
    std::set<State> seen{{n, {}}};
    std::vector<State> work{{n, {}}};
    while (!work.empty()) {
        State s = work.back();
        work.pop_back();
        for (size_t k = 1; k <= s.first; ++k)
            for (size_t i = 1; i <= m; ++i) {
                State t{s.first - k, s.second};
                t.second.push_back(i);
                std::sort(t.second.begin(), t.second.end());
                if (seen.insert(t).second) work.push_back(t);
            }
    }
    return seen.size();
}

std::string sizeLawOntology(size_t m) {
    std::string s;
    for (size_t i = 1; i <= m; ++i) s += "p" + std::to_string(i) + "(X) -> p0(X).\n";
    return s;
}

std::string sizeLawQuery(size_t n) {
    std::string s = "p() :- ";
    for (size_t i = 1; i <= n; ++i) s += (i > 1 ? ", " : "") + std::string("p0(A") + std::to_string(i) + ")";
    return s + ".";
}

// --- generators ---

namespace {

size_t pick(std::mt19937& rng, size_t lo, size_t hi) { return std::uniform_int_distribution<size_t>(lo, hi)(rng); }
bool coin(std::mt19937& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string constantName(size_t i) { return std::string(1, char('a' + i)); }

struct Schema {
    std::vector<std::string> preds;
    std::vector<size_t> arity;
};

Schema randomSchema(std::mt19937& rng, const GenParams& p) {
    Schema s;
    for (size_t i = 0; i < p.predicates; ++i) {
        s.preds.push_back("r" + std::to_string(i));
        s.arity.push_back(pick(rng, 1, p.maxArity));
    }
    return s;
}

std::string atomText(const std::string& pred, const std::vector<std::string>& args) {
    std::string s = pred + "(";
    for (size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i];
    return s + ")";
}

// One rule in normal form: a single head atom with at most one existential.
std::string randomRule(std::mt19937& rng, const Schema& s, size_t bodyAtoms) {
    std::vector<std::string> body, used;
    size_t pool = pick(rng, 1, 3);
    for (size_t b = 0; b < bodyAtoms; ++b) {
        size_t pi = pick(rng, 0, s.preds.size() - 1);
        std::vector<std::string> args;
        for (size_t k = 0; k < s.arity[pi]; ++k) {
            std::string v = "X" + std::to_string(pick(rng, 1, pool));
            args.push_back(v);
            if (std::find(used.begin(), used.end(), v) == used.end()) used.push_back(v);
        }
        body.push_back(atomText(s.preds[pi], args));
    }
    size_t hi = pick(rng, 0, s.preds.size() - 1);
    std::vector<std::string> head;
    long ex = coin(rng, 0.5) ? long(pick(rng, 0, s.arity[hi] - 1)) : -1;
    for (size_t k = 0; k < s.arity[hi]; ++k)
        head.push_back(long(k) == ex ? "Z" : used[pick(rng, 0, used.size() - 1)]);
    std::string out;
    for (size_t b = 0; b < body.size(); ++b) out += (b ? ", " : "") + body[b];
    return out + " -> " + atomText(s.preds[hi], head) + ".\n";
}

Instance finish(std::mt19937& rng, std::string text, const GenParams& p) {
    Instance inst;
    inst.text = std::move(text);
    OntologyDocument d = parseOntology(inst.text);
    inst.raw = d.tgds;
    inst.onto = normalizeTGDs(d);
    auto ar = aritiesOf(inst.raw);
    inst.query = randomQuery(rng, ar, p.maxQueryAtoms, 4, p.constants);
    inst.db = randomDatabase(rng, ar, p.maxFacts, p.constants);
    inst.sticky = isSticky(inst.raw);
    return inst;
}

}  // namespace

std::map<uint32_t, size_t> aritiesOf(const std::vector<RawTGD>& tgds) {
    std::map<uint32_t, size_t> out;
    for (const auto& t : tgds) {
        for (const auto& a : t.body) out[a.pred] = a.arity();
        for (const auto& a : t.head) out[a.pred] = a.arity();
    }
    return out;
}

Instance randomLinear(std::mt19937& rng, const GenParams& p) {
    Schema s = randomSchema(rng, p);
    std::string text;
    size_t n = pick(rng, 1, p.maxTgds);
    for (size_t i = 0; i < n; ++i) text += randomRule(rng, s, 1);
    return finish(rng, text, p);
}

Instance randomSticky(std::mt19937& rng, const GenParams& p) {
    Schema s = randomSchema(rng, p);
    for (int attempt = 0;; ++attempt) {
        std::string text;
        size_t n = pick(rng, 1, p.maxTgds);
        for (size_t i = 0; i < n; ++i) text += randomRule(rng, s, attempt < 200 ? pick(rng, 1, 2) : 1);
        if (isSticky(parseOntology(text).tgds)) return finish(rng, text, p);
    }
}

std::vector<Atom> randomDatabase(std::mt19937& rng, const std::map<uint32_t, size_t>& arities, size_t maxFacts,
                                 size_t constants) {
    std::vector<std::pair<uint32_t, size_t>> preds(arities.begin(), arities.end());
    std::vector<Atom> db;
    if (preds.empty()) return db;
    size_t n = pick(rng, 0, maxFacts);
    for (size_t i = 0; i < n; ++i) {
        auto [pred, ar] = preds[pick(rng, 0, preds.size() - 1)];
        Atom a(pred, {});
        for (size_t k = 0; k < ar; ++k) a.args.push_back(Term::constant(constantName(pick(rng, 0, constants - 1))));
        if (std::find(db.begin(), db.end(), a) == db.end()) db.push_back(a);
    }
    return db;
}

Query randomQuery(std::mt19937& rng, const std::map<uint32_t, size_t>& arities, size_t maxAtoms, size_t maxBodyVars,
                  size_t constants) {
    std::vector<std::pair<uint32_t, size_t>> preds(arities.begin(), arities.end());
    std::vector<Atom> body;
    size_t n = pick(rng, 1, maxAtoms);
    for (size_t i = 0; i < n; ++i) {
        auto [pred, ar] = preds[pick(rng, 0, preds.size() - 1)];
        Atom a(pred, {});
        for (size_t k = 0; k < ar; ++k) {
            if (coin(rng, 0.1)) a.args.push_back(Term::constant(constantName(pick(rng, 0, constants - 1))));
            else a.args.push_back(Term::variable(std::string(1, char('A' + pick(rng, 0, maxBodyVars - 1)))));
        }
        body.push_back(a);
    }
    std::vector<Term> head;
    for (Term v : variablesOf(body))
        if (coin(rng, 0.5)) head.push_back(v);
    return Query(Symbols::intern("q"), head, body);
}

// --- suites ---

namespace {

std::string show(const Instance& inst) {
    std::ostringstream s;
    s << inst.text << "? " << inst.query.str() << "\n% db:";
    for (const auto& a : inst.db) s << " " << a.str();
    return s.str();
}

std::string showTuples(const AnswerSet& a) {
    std::string s = "{";
    for (const auto& t : a) {
        s += "(";
        for (size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + t[i].name();
        s += ")";
    }
    return s + "}";
}

}  // namespace

CheckReport soundCompleteSuite(size_t count, unsigned seed, size_t chaseBudget, size_t stepBudget) {
    CheckReport rep;
    std::mt19937 rng(seed);
    for (size_t attempt = 0; rep.instances < count && attempt < 5 * count; ++attempt) {
        Instance inst = attempt % 2 ? randomSticky(rng) : randomLinear(rng);
        RewriteOptions seq;
        seq.elimination = false;
        seq.parallel = false;
        seq.budget = stepBudget;
        RewriteOptions full;
        full.budget = stepBudget;
        std::vector<Query> plain, piped;
        try {
            RewriteContext c1(inst.onto, seq);
            plain = xrewrite(inst.query, c1).ucq;
            RewriteContext c2(inst.onto, full);
            piped = rewriteQuery(inst.query, c2).ucq;
        } catch (const BudgetExhausted&) {
            ++rep.skipped;
            continue;
        }
        ++rep.instances;
        ChaseInstance chase = chaseUpTo(inst.db, inst.raw, chaseBudget);
        if (!chase.saturated) ++rep.unsaturated;
        AnswerSet oracle = bruteEval(inst.query, chase.atoms);
        for (const auto* ucq : {&plain, &piped}) {
            AnswerSet got = bruteEval(*ucq, inst.db);
            bool sound = std::includes(oracle.begin(), oracle.end(), got.begin(), got.end());
            bool complete = std::includes(got.begin(), got.end(), oracle.begin(), oracle.end());
            if (!sound || !complete) {
                ++rep.violations;
                rep.details.push_back(std::string(sound ? "incomplete" : "unsound") +
                                      (ucq == &plain ? " (xrewrite)" : " (pipeline)") + "\n" + show(inst) +
                                      "\n% rewriting " + showTuples(got) + " chase " + showTuples(oracle));
            }
        }
    }
    return rep;
}

InvariantReport rewritingInvariants(size_t count, unsigned seed, size_t stepBudget) {
    InvariantReport rep;
    std::mt19937 rng(seed);
    for (size_t i = 0; i < count; ++i) {
        Instance inst = i % 2 ? randomSticky(rng) : randomLinear(rng);
        bool linear = isLinear(inst.onto.tgds);
        bool sticky = isSticky(inst.onto.tgds);
        std::vector<Term> inputVars = variablesOf(inst.query);
        RewriteOptions opts;
        opts.elimination = false;
        opts.parallel = false;
        opts.budget = stepBudget;
        opts.observer = [&](const Query& q) {
            ++rep.queries;
            if (linear && q.body.size() > inst.query.body.size()) {
                ++rep.violations;
                rep.details.push_back("body grew: " + q.str() + "\n" + show(inst));
            }
            if (!sticky) return;
            for (Term v : variablesOf(q)) {
                if (std::find(inputVars.begin(), inputVars.end(), v) != inputVars.end()) continue;
                if (occurrences(q, v) != 1) {
                    ++rep.violations;
                    rep.details.push_back("fresh variable repeated: " + q.str() + "\n" + show(inst));
                    break;
                }
            }
        };
        try {
            RewriteContext ctx(inst.onto, opts);
            xrewrite(inst.query, ctx);
        } catch (const BudgetExhausted&) {
        }
    }
    return rep;
}

StrategyReport strategyInvariance(size_t count, unsigned seed) {
    StrategyReport rep;
    std::mt19937 rng(seed);
    GenParams p;
    p.maxQueryAtoms = 5;
    p.predicates = 3;
    for (size_t i = 0; i < count; ++i) {
        Instance inst = randomLinear(rng, p);
        Query q = randomQuery(rng, aritiesOf(inst.raw), 5, 3, p.constants);
        Eliminator e(inst.onto.tgds);
        std::vector<size_t> perm(q.body.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::set<size_t> sizes;
        do {
            sizes.insert(e.eliminate(q, perm).size());
        } while (std::next_permutation(perm.begin(), perm.end()));
        ++rep.queries;
        if (sizes.size() != 1) {
            ++rep.mismatches;
            rep.details.push_back(inst.text + "? " + q.str());
        }
    }
    return rep;
}

}  // namespace xrt
