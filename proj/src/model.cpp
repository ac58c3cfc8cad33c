#include "xrewrite/model.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

namespace xr {

namespace {

struct SymbolTable {
    std::shared_mutex mu;
    std::unordered_map<std::string, uint32_t> ids;
    std::deque<std::string> names;

    SymbolTable() {
        // id 0 is reserved for generated variables
        names.emplace_back("");
        ids.emplace("", 0);
    }
};

SymbolTable& table() {
    static SymbolTable t;
    return t;
}

bool plainIdentifier(const std::string& s) {
    if (s.empty()) return false;
    bool digits = std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (digits) return true;
    if (!(s[0] >= 'a' && s[0] <= 'z')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

std::string quoteConstant(const std::string& s) {
    if (plainIdentifier(s)) return s;
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "''";
        else out += c;
    }
    return out + "'";
}

std::string printTerm(Term t) {
    return t.isConstant() ? quoteConstant(t.name()) : t.name();
}

std::string printAtoms(const std::vector<Atom>& atoms) {
    std::string out;
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (i) out += ", ";
        out += atoms[i].str();
    }
    return out;
}

}  // namespace

uint32_t Symbols::intern(std::string_view name) {
    auto& t = table();
    {
        std::shared_lock lock(t.mu);
        auto it = t.ids.find(std::string(name));
        if (it != t.ids.end()) return it->second;
    }
    std::unique_lock lock(t.mu);
    auto [it, inserted] = t.ids.emplace(std::string(name), uint32_t(t.names.size()));
    if (inserted) t.names.emplace_back(name);
    return it->second;
}

std::string Symbols::name(uint32_t id) {
    auto& t = table();
    std::shared_lock lock(t.mu);
    return id < t.names.size() ? t.names[id] : std::string("?");
}

Term Term::constant(std::string_view name) { return make(TermKind::Constant, Symbols::intern(name), 0); }

Term Term::variable(std::string_view name, uint32_t tag) {
    return make(TermKind::Variable, Symbols::intern(name), tag);
}

std::string Term::name() const {
    switch (kind()) {
    case TermKind::Constant:
        return Symbols::name(sym());
    case TermKind::Null:
        return "z" + std::to_string(tag());
    case TermKind::Variable:
        if (sym() == 0) return "V" + std::to_string(tag());
        if (tag() == 0) return Symbols::name(sym());
        return Symbols::name(sym()) + "_" + std::to_string(tag());
    }
    return "?";
}

bool lexLess(Term a, Term b) {
    if (a.kind() != b.kind()) return a.kind() < b.kind();
    if (a.isNull()) return a.tag() < b.tag();
    if (a.sym() == b.sym()) return a.tag() < b.tag();
    return a.name() < b.name();
}

std::string Position::str() const { return Symbols::name(pred) + "[" + std::to_string(index + 1) + "]"; }

Atom::Atom(std::string_view p, std::vector<Term> a) : pred(Symbols::intern(p)), args(std::move(a)) {}

std::string Atom::str() const {
    std::string out = predName() + "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out += ",";
        out += printTerm(args[i]);
    }
    return out + ")";
}

Query::Query(uint32_t hp, std::vector<Term> h, std::vector<Atom> b)
    : headPred(hp), head(std::move(h)), body(std::move(b)) {
    normalize();
}

void Query::normalize() {
    std::sort(body.begin(), body.end());
    body.erase(std::unique(body.begin(), body.end()), body.end());
}

std::string Query::str() const {
    std::string out = Symbols::name(headPred) + "(";
    for (size_t i = 0; i < head.size(); ++i) {
        if (i) out += ",";
        out += printTerm(head[i]);
    }
    return out + ") :- " + printAtoms(body) + ".";
}

std::optional<Position> TGD::existentialPosition() const {
    if (existPos < 0) return std::nullopt;
    return Position{head.pred, uint32_t(existPos)};
}

std::string TGD::str() const { return printAtoms(body) + " -> " + head.str() + "."; }

std::vector<Term> RawTGD::existentials() const {
    auto bodyVars = variablesOf(body);
    std::vector<Term> out;
    for (const auto& v : variablesOf(head))
        if (std::find(bodyVars.begin(), bodyVars.end(), v) == bodyVars.end()) out.push_back(v);
    return out;
}

std::string RawTGD::str() const { return printAtoms(body) + " -> " + printAtoms(head) + "."; }

std::string NegativeConstraint::str() const { return printAtoms(body) + " -> !."; }

std::string FunctionalDependency::str() const {
    std::string out = "fd " + Symbols::name(pred) + ": ";
    for (size_t i = 0; i < lhs.size(); ++i) out += (i ? "," : "") + std::to_string(lhs[i] + 1);
    out += " -> ";
    for (size_t i = 0; i < rhs.size(); ++i) out += (i ? "," : "") + std::to_string(rhs[i] + 1);
    return out + ".";
}

size_t AtomHash::operator()(const Atom& a) const noexcept {
    size_t h = a.pred * 0x100000001b3ULL;
    for (Term t : a.args) h = (h ^ TermHash{}(t)) * 0x100000001b3ULL;
    return h;
}

size_t QueryHash::operator()(const Query& q) const noexcept {
    size_t h = q.headPred;
    for (Term t : q.head) h = (h ^ TermHash{}(t)) * 0x100000001b3ULL;
    for (const auto& a : q.body) h = (h ^ AtomHash{}(a)) * 0x9e3779b97f4a7c15ULL;
    return h;
}

std::vector<Term> variablesOf(const std::vector<Atom>& atoms) {
    std::vector<Term> out;
    for (const auto& a : atoms)
        for (Term t : a.args)
            if (t.isVariable() && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return out;
}

std::vector<Term> variablesOf(const Atom& a) { return variablesOf(std::vector<Atom>{a}); }

std::vector<Term> variablesOf(const Query& q) {
    std::vector<Term> out;
    for (Term t : q.head)
        if (t.isVariable() && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    for (Term t : variablesOf(q.body))
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return out;
}

bool containsTerm(const Atom& a, Term t) { return std::find(a.args.begin(), a.args.end(), t) != a.args.end(); }

size_t occurrences(const Query& q, Term v) {
    size_t n = std::count(q.head.begin(), q.head.end(), v);
    for (const auto& a : q.body) n += std::count(a.args.begin(), a.args.end(), v);
    return n;
}

bool isShared(const Query& q, Term v) {
    if (std::find(q.head.begin(), q.head.end(), v) != q.head.end()) return true;
    size_t n = 0;
    for (const auto& a : q.body) n += std::count(a.args.begin(), a.args.end(), v);
    return n >= 2;
}

// --- substitutions ---

Term Substitution::get(Term t) const {
    auto it = std::lower_bound(map_.begin(), map_.end(), t, [](const auto& e, Term k) { return e.first < k; });
    return (it != map_.end() && it->first == t) ? it->second : t;
}

bool Substitution::bound(Term t) const {
    auto it = std::lower_bound(map_.begin(), map_.end(), t, [](const auto& e, Term k) { return e.first < k; });
    return it != map_.end() && it->first == t;
}

void Substitution::set(Term from, Term to) {
    auto it = std::lower_bound(map_.begin(), map_.end(), from, [](const auto& e, Term k) { return e.first < k; });
    if (it != map_.end() && it->first == from) it->second = to;
    else map_.insert(it, {from, to});
}

Atom Substitution::apply(const Atom& a) const {
    Atom out = a;
    for (auto& t : out.args) t = get(t);
    return out;
}

std::vector<Atom> Substitution::apply(const std::vector<Atom>& atoms) const {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) out.push_back(apply(a));
    return out;
}

Query Substitution::apply(const Query& q) const {
    Query out;
    out.headPred = q.headPred;
    out.head.reserve(q.head.size());
    for (Term t : q.head) out.head.push_back(get(t));
    out.body = apply(q.body);
    out.normalize();
    return out;
}

Substitution Substitution::compose(const Substitution& s1, const Substitution& s2) {
    Substitution out;
    for (const auto& [k, v] : s1.map_) {
        Term w = s2.get(v);
        if (w != k) out.map_.emplace_back(k, w);
    }
    for (const auto& [k, v] : s2.map_)
        if (!s1.bound(k) && k != v) out.map_.emplace_back(k, v);
    std::sort(out.map_.begin(), out.map_.end());
    return out;
}

std::string Substitution::str() const {
    std::string out = "{";
    for (size_t i = 0; i < map_.size(); ++i) {
        if (i) out += ", ";
        out += printTerm(map_[i].first) + "->" + printTerm(map_[i].second);
    }
    return out + "}";
}

// --- unification ---

std::optional<Substitution> mgu(const std::vector<Atom>& atoms, const VarRank& rank) {
    Substitution out;
    if (atoms.empty()) return out;
    const Atom& first = atoms.front();
    for (const auto& a : atoms)
        if (a.pred != first.pred || a.arity() != first.arity()) return std::nullopt;

    std::vector<Term> terms;
    for (const auto& a : atoms) terms.insert(terms.end(), a.args.begin(), a.args.end());
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    auto slot = [&](Term t) { return size_t(std::lower_bound(terms.begin(), terms.end(), t) - terms.begin()); };

    std::vector<size_t> parent(terms.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (size_t k = 1; k < atoms.size(); ++k)
        for (size_t i = 0; i < first.arity(); ++i) {
            size_t a = find(slot(first.args[i])), b = find(slot(atoms[k].args[i]));
            if (a != b) parent[a] = b;
        }

    auto better = [&](Term a, Term b) {
        // constants and nulls first, then by rank, then by term order
        if (a.isGround() != b.isGround()) return a.isGround();
        if (!a.isGround() && rank) {
            int ra = rank(a), rb = rank(b);
            if (ra != rb) return ra < rb;
        }
        return a < b;
    };
    std::vector<size_t> rep(terms.size(), SIZE_MAX);
    for (size_t i = 0; i < terms.size(); ++i) {
        size_t r = find(i);
        if (rep[r] == SIZE_MAX) {
            rep[r] = i;
            continue;
        }
        Term cur = terms[rep[r]], t = terms[i];
        if (cur.isGround() && t.isGround()) return std::nullopt;
        if (better(t, cur)) rep[r] = i;
    }
    for (size_t i = 0; i < terms.size(); ++i) {
        Term r = terms[rep[find(i)]];
        if (r != terms[i]) out.set(terms[i], r);
    }
    return out;
}

std::optional<Substitution> mgu(const std::vector<Atom>& atoms, const std::vector<Term>& preferred) {
    return mgu(atoms, [&](Term v) {
        return std::find(preferred.begin(), preferred.end(), v) != preferred.end() ? 0 : 1;
    });
}

// --- homomorphisms ---

void AtomIndex::add(const Atom& a) {
    auto it = std::lower_bound(byPred_.begin(), byPred_.end(), a.pred,
                               [](const auto& e, uint32_t p) { return e.first < p; });
    if (it == byPred_.end() || it->first != a.pred) it = byPred_.insert(it, {a.pred, {}});
    it->second.push_back(a);
    ++count_;
}

const std::vector<Atom>& AtomIndex::with(uint32_t pred) const {
    static const std::vector<Atom> none;
    auto it = std::lower_bound(byPred_.begin(), byPred_.end(), pred,
                               [](const auto& e, uint32_t p) { return e.first < p; });
    return (it != byPred_.end() && it->first == pred) ? it->second : none;
}

namespace {

struct Matcher {
    const std::vector<Atom>& from;
    const AtomIndex& target;
    const Substitution& seed;
    const std::function<bool(const Substitution&)>& fn;

    std::vector<Term> vars;      // sorted variables of `from`
    std::vector<Term> binding;   // invalid term when unbound
    std::vector<size_t> order;

    size_t slot(Term t) const { return size_t(std::lower_bound(vars.begin(), vars.end(), t) - vars.begin()); }

    void plan() {
        std::vector<bool> used(from.size(), false), known(vars.size(), false);
        for (size_t i = 0; i < vars.size(); ++i) known[i] = binding[i].valid();
        for (size_t step = 0; step < from.size(); ++step) {
            size_t best = SIZE_MAX;
            long bestScore = 0;
            for (size_t k = 0; k < from.size(); ++k) {
                if (used[k]) continue;
                long fixed = 0;
                for (Term t : from[k].args)
                    if (t.isGround() || known[slot(t)]) ++fixed;
                long score = fixed * 100000 - long(target.with(from[k].pred).size());
                if (best == SIZE_MAX || score > bestScore) {
                    best = k;
                    bestScore = score;
                }
            }
            used[best] = true;
            order.push_back(best);
            for (Term t : from[best].args)
                if (t.isVariable()) known[slot(t)] = true;
        }
    }

    bool run(size_t depth) {
        if (depth == order.size()) {
            Substitution h = seed;
            for (size_t i = 0; i < vars.size(); ++i)
                if (binding[i].valid()) h.set(vars[i], binding[i]);
            return fn(h);
        }
        const Atom& pat = from[order[depth]];
        std::vector<size_t> fresh;
        for (const Atom& cand : target.with(pat.pred)) {
            if (cand.arity() != pat.arity()) continue;
            fresh.clear();
            bool ok = true;
            for (size_t i = 0; i < pat.arity() && ok; ++i) {
                Term p = pat.args[i];
                if (p.isGround()) {
                    ok = p == cand.args[i];
                    continue;
                }
                size_t s = slot(p);
                if (binding[s].valid()) ok = binding[s] == cand.args[i];
                else {
                    binding[s] = cand.args[i];
                    fresh.push_back(s);
                }
            }
            if (ok && !run(depth + 1)) return false;
            for (size_t s : fresh) binding[s] = Term();
        }
        return true;
    }
};

}  // namespace

bool forEachHomomorphism(const std::vector<Atom>& from, const AtomIndex& target, const Substitution& seed,
                         const std::function<bool(const Substitution&)>& fn) {
    Matcher m{from, target, seed, fn, {}, {}, {}};
    m.vars = variablesOf(from);
    std::sort(m.vars.begin(), m.vars.end());
    m.binding.assign(m.vars.size(), Term());
    for (size_t i = 0; i < m.vars.size(); ++i)
        if (seed.bound(m.vars[i])) m.binding[i] = seed.get(m.vars[i]);
    m.plan();
    return m.run(0);
}

std::optional<Substitution> findHomomorphism(const std::vector<Atom>& from, const std::vector<Atom>& to,
                                             const std::optional<std::pair<Atom, Atom>>& fixedHead) {
    Substitution seed;
    if (fixedHead) {
        const auto& [h1, h2] = *fixedHead;
        if (h1.pred != h2.pred || h1.arity() != h2.arity()) return std::nullopt;
        for (size_t i = 0; i < h1.arity(); ++i) {
            Term a = h1.args[i], b = h2.args[i];
            if (a.isGround()) {
                if (a != b) return std::nullopt;
            } else if (seed.bound(a)) {
                if (seed.get(a) != b) return std::nullopt;
            } else {
                seed.set(a, b);
            }
        }
    }
    std::optional<Substitution> found;
    AtomIndex index(to);
    forEachHomomorphism(from, index, seed, [&](const Substitution& h) {
        found = h;
        return false;
    });
    return found;
}

// --- canonical renaming ---

namespace {

constexpr uint64_t kVarMark = uint64_t(1) << 63;
constexpr uint64_t kHeadMark = ~uint64_t(0);

struct Canonizer {
    const Query& q;
    std::vector<Term> vars;
    // per variable: list of (atom index or SIZE_MAX for head, position)
    std::vector<std::vector<std::pair<size_t, size_t>>> occ;
    std::optional<Query> best;
    Substitution bestSubst;

    size_t slot(Term t) const { return size_t(std::lower_bound(vars.begin(), vars.end(), t) - vars.begin()); }

    uint64_t code(Term t, const std::vector<uint32_t>& color) const {
        return t.isVariable() ? (kVarMark | color[slot(t)]) : t.bits();
    }

    // colour refinement until the partition is stable
    void refine(std::vector<uint32_t>& color) const {
        size_t classes = std::set<uint32_t>(color.begin(), color.end()).size();
        while (true) {
            std::vector<std::vector<uint64_t>> sig(vars.size());
            for (size_t v = 0; v < vars.size(); ++v) {
                std::vector<std::vector<uint64_t>> items;
                for (auto [ai, pos] : occ[v]) {
                    std::vector<uint64_t> item;
                    if (ai == SIZE_MAX) {
                        item = {kHeadMark, pos};
                    } else {
                        const Atom& a = q.body[ai];
                        item = {a.pred, pos};
                        for (Term t : a.args) item.push_back(code(t, color));
                    }
                    items.push_back(std::move(item));
                }
                std::sort(items.begin(), items.end());
                sig[v].push_back(color[v]);
                for (auto& it : items) {
                    sig[v].push_back(it.size());
                    sig[v].insert(sig[v].end(), it.begin(), it.end());
                }
            }
            std::vector<std::vector<uint64_t>> distinct = sig;
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            for (size_t v = 0; v < vars.size(); ++v)
                color[v] = uint32_t(std::lower_bound(distinct.begin(), distinct.end(), sig[v]) - distinct.begin());
            if (distinct.size() == classes) return;
            classes = distinct.size();
        }
    }

    // swapping u and v maps the query onto itself
    bool twins(size_t u, size_t v) const {
        Substitution s;
        s.set(vars[u], vars[v]);
        s.set(vars[v], vars[u]);
        Query r = s.apply(q);
        return r.head == q.head && r.body == q.body;
    }

    void leaf(const std::vector<uint32_t>& color) {
        Substitution s;
        for (size_t v = 0; v < vars.size(); ++v) s.set(vars[v], Term::generated(color[v] + 1));
        Query cand = s.apply(q);
        if (!best || std::tie(cand.head, cand.body) < std::tie(best->head, best->body)) {
            best = std::move(cand);
            bestSubst = std::move(s);
        }
    }

    void search(std::vector<uint32_t> color) {
        refine(color);
        std::vector<size_t> count(vars.size() + 1, 0);
        for (uint32_t c : color) ++count[c];
        uint32_t cell = UINT32_MAX;
        for (uint32_t c = 0; c < count.size(); ++c)
            if (count[c] > 1) {
                cell = c;
                break;
            }
        if (cell == UINT32_MAX) {
            leaf(color);
            return;
        }
        std::vector<size_t> reps;
        for (size_t v = 0; v < vars.size(); ++v) {
            if (color[v] != cell) continue;
            if (std::any_of(reps.begin(), reps.end(), [&](size_t r) { return twins(r, v); })) continue;
            reps.push_back(v);
            std::vector<uint32_t> next(color.size());
            for (size_t u = 0; u < color.size(); ++u) next[u] = 2 * color[u] + ((color[u] == cell && u != v) ? 1 : 0);
            search(std::move(next));
        }
    }
};

}  // namespace

std::pair<Query, Substitution> canonicalRenaming(const Query& q0) {
    Query q = q0;
    q.normalize();
    Canonizer c{q, variablesOf(q), {}, std::nullopt, {}};
    if (c.vars.empty()) return {q, {}};
    std::sort(c.vars.begin(), c.vars.end());
    c.occ.resize(c.vars.size());
    for (size_t i = 0; i < q.head.size(); ++i)
        if (q.head[i].isVariable()) c.occ[c.slot(q.head[i])].push_back({SIZE_MAX, i});
    for (size_t a = 0; a < q.body.size(); ++a)
        for (size_t i = 0; i < q.body[a].arity(); ++i)
            if (q.body[a].args[i].isVariable()) c.occ[c.slot(q.body[a].args[i])].push_back({a, i});
    c.search(std::vector<uint32_t>(c.vars.size(), 0));
    return {*c.best, c.bestSubst};
}

Query canonicalRename(const Query& q) { return canonicalRenaming(q).first; }

std::string canonicalString(const Query& q) { return canonicalRename(q).str(); }

}  // namespace xr
