#include "xrewrite/normalize.hpp"

#include <algorithm>

namespace xr {

bool NormalizedOntology::mentionsAux(const Query& q) const {
    return std::any_of(q.body.begin(), q.body.end(), [&](const Atom& a) { return isAux(a.pred); });
}

bool isReservedPredicate(uint32_t pred) { return Symbols::name(pred).rfind(kAuxPrefix, 0) == 0; }

void checkReservedPredicates(const OntologyDocument& doc) {
    for (const auto& [pred, arity] : doc.arities)
        if (isReservedPredicate(pred))
            throw ParseError("predicate " + Symbols::name(pred) + " uses the reserved prefix " + kAuxPrefix, 0, 0);
}

TGD makeTGD(std::vector<Atom> body, Atom head, std::string label, int origin) {
    TGD t;
    t.body = std::move(body);
    t.head = std::move(head);
    t.label = std::move(label);
    t.origin = origin;
    auto bodyVars = variablesOf(t.body);
    for (size_t i = 0; i < t.head.arity(); ++i) {
        Term v = t.head.args[i];
        if (v.isVariable() && std::find(bodyVars.begin(), bodyVars.end(), v) == bodyVars.end()) {
            t.existPos = int(i);
            break;
        }
    }
    return t;
}

bool inNormalForm(const RawTGD& r) {
    if (r.head.size() != 1) return false;
    auto ex = r.existentials();
    if (ex.empty()) return true;
    if (ex.size() > 1) return false;
    const auto& args = r.head.front().args;
    return std::count(args.begin(), args.end(), ex.front()) == 1;
}

NormalizedOntology normalizeTGDs(const std::vector<RawTGD>& raw) {
    NormalizedOntology out;
    for (size_t k = 0; k < raw.size(); ++k) {
        const RawTGD& r = raw[k];
        std::string base = r.label.empty() ? "s" + std::to_string(k + 1) : r.label;
        auto emit = [&](std::vector<Atom> body, Atom head, std::string label) {
            out.tgds.push_back(makeTGD(std::move(body), std::move(head), std::move(label), int(k)));
            out.provenance.push_back(int(k));
        };
        if (inNormalForm(r)) {
            emit(r.body, r.head.front(), base);
            continue;
        }
        auto ex = r.existentials();
        size_t piece = 0;
        auto nextLabel = [&] { return base + "." + std::to_string(++piece); };
        if (ex.empty()) {
            // full rule with several head atoms: one rule per atom
            for (const auto& h : r.head) emit(r.body, h, nextLabel());
            continue;
        }
        std::vector<Term> frontier;
        auto headVars = variablesOf(r.head);
        for (Term v : variablesOf(r.body))
            if (std::find(headVars.begin(), headVars.end(), v) != headVars.end()) frontier.push_back(v);

        std::vector<Term> args = frontier;
        std::vector<Atom> body = r.body;
        for (size_t i = 0; i < ex.size(); ++i) {
            uint32_t aux = Symbols::intern(std::string(kAuxPrefix) + std::to_string(k + 1) + "_" + std::to_string(i + 1));
            out.auxPredicates.insert(aux);
            args.push_back(ex[i]);
            Atom head(aux, args);
            emit(body, head, nextLabel());
            body = {head};
        }
        for (const auto& h : r.head) emit(body, h, nextLabel());
    }
    return out;
}

NormalizedOntology normalizeTGDs(const OntologyDocument& doc) { return normalizeTGDs(doc.tgds); }

bool isLinear(const std::vector<TGD>& tgds) {
    return std::all_of(tgds.begin(), tgds.end(), [](const TGD& t) { return t.body.size() == 1; });
}

bool isLinear(const std::vector<RawTGD>& tgds) {
    return std::all_of(tgds.begin(), tgds.end(), [](const RawTGD& t) { return t.body.size() == 1; });
}

namespace {

bool multiLinearBody(const std::vector<Atom>& body) {
    auto all = variablesOf(body);
    for (const auto& a : body)
        for (Term v : all)
            if (!containsTerm(a, v)) return false;
    return true;
}

}  // namespace

bool isMultiLinear(const std::vector<TGD>& tgds) {
    return std::all_of(tgds.begin(), tgds.end(), [](const TGD& t) { return multiLinearBody(t.body); });
}

bool isMultiLinear(const std::vector<RawTGD>& tgds) {
    return std::all_of(tgds.begin(), tgds.end(), [](const RawTGD& t) { return multiLinearBody(t.body); });
}

std::vector<RawTGD> asRaw(const std::vector<TGD>& tgds) {
    std::vector<RawTGD> out;
    for (const auto& t : tgds) out.push_back(RawTGD{t.body, {t.head}, t.label});
    return out;
}

MarkedTGDSet smark(const std::vector<RawTGD>& tgds) {
    MarkedTGDSet m;
    m.tgds = tgds;
    m.markedVars.resize(tgds.size());
    // initial marking
    for (size_t s = 0; s < tgds.size(); ++s)
        for (Term v : variablesOf(tgds[s].body))
            for (const auto& a : tgds[s].head)
                if (!containsTerm(a, v)) {
                    m.markedVars[s].insert(v);
                    break;
                }
    // propagation to a fixpoint
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t s = 0; s < tgds.size(); ++s) {
            auto bodyVars = variablesOf(tgds[s].body);
            for (const auto& a : tgds[s].head)
                for (Term v : variablesOf(a)) {
                    if (std::find(bodyVars.begin(), bodyVars.end(), v) == bodyVars.end()) continue;
                    if (m.markedVars[s].count(v)) continue;
                    std::vector<size_t> where;
                    for (size_t i = 0; i < a.arity(); ++i)
                        if (a.args[i] == v) where.push_back(i);
                    bool hit = false;
                    for (size_t s2 = 0; s2 < tgds.size() && !hit; ++s2)
                        for (const auto& b : tgds[s2].body) {
                            if (b.pred != a.pred || b.arity() != a.arity()) continue;
                            bool all = std::all_of(where.begin(), where.end(), [&](size_t i) {
                                return b.args[i].isVariable() && m.markedVars[s2].count(b.args[i]);
                            });
                            if (all) {
                                hit = true;
                                break;
                            }
                        }
                    if (hit) {
                        m.markedVars[s].insert(v);
                        changed = true;
                    }
                }
        }
    }
    m.marks.resize(tgds.size());
    for (size_t s = 0; s < tgds.size(); ++s)
        for (size_t a = 0; a < tgds[s].body.size(); ++a)
            for (size_t i = 0; i < tgds[s].body[a].arity(); ++i)
                if (m.markedVars[s].count(tgds[s].body[a].args[i])) m.marks[s].push_back({a, i});
    return m;
}

MarkedTGDSet smark(const std::vector<TGD>& tgds) { return smark(asRaw(tgds)); }

bool isSticky(const MarkedTGDSet& m) {
    for (size_t s = 0; s < m.tgds.size(); ++s)
        for (Term v : m.markedVars[s]) {
            size_t n = 0;
            for (const auto& a : m.tgds[s].body) n += std::count(a.args.begin(), a.args.end(), v);
            if (n > 1) return false;
        }
    return true;
}

bool isSticky(const std::vector<TGD>& tgds) { return isSticky(smark(tgds)); }
bool isSticky(const std::vector<RawTGD>& tgds) { return isSticky(smark(tgds)); }

}  // namespace xr
