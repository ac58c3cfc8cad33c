#include "xrewrite/graphs.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace xr {

size_t PropagationGraph::nodeIndex(Position p) const {
    return size_t(std::lower_bound(nodes.begin(), nodes.end(), p) - nodes.begin());
}

bool PropagationGraph::hasNode(Position p) const {
    size_t i = nodeIndex(p);
    return i < nodes.size() && nodes[i] == p;
}

const std::vector<size_t>& PropagationGraph::outgoing(Position p) const {
    static const std::vector<size_t> none;
    return hasNode(p) ? out_[nodeIndex(p)] : none;
}

void PropagationGraph::finish() {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    out_.assign(nodes.size(), {});
    for (size_t e = 0; e < edges.size(); ++e) out_[nodeIndex(edges[e].from)].push_back(e);
}

PropagationGraph buildPropagationGraph(const std::vector<TGD>& tgds, const std::map<uint32_t, size_t>& arities) {
    PropagationGraph pg;
    auto addNodes = [&](const Atom& a) {
        for (uint32_t i = 0; i < a.arity(); ++i) pg.nodes.push_back({a.pred, i});
    };
    for (const auto& [pred, n] : arities)
        for (uint32_t i = 0; i < n; ++i) pg.nodes.push_back({pred, i});
    for (uint32_t s = 0; s < tgds.size(); ++s) {
        const TGD& t = tgds[s];
        addNodes(t.head);
        for (const auto& b : t.body) {
            addNodes(b);
            for (uint32_t i = 0; i < b.arity(); ++i) {
                if (!b.args[i].isVariable()) continue;
                for (uint32_t j = 0; j < t.head.arity(); ++j)
                    if (t.head.args[j] == b.args[i]) pg.edges.push_back({{b.pred, i}, {t.head.pred, j}, s});
            }
        }
    }
    pg.finish();
    return pg;
}

namespace {

// The segment ending at the newest vertex must not repeat the one before it.
bool extendsMinimally(const std::vector<Position>& v, const std::vector<uint32_t>& lab) {
    size_t L = v.size();   // 1-based index of the newest vertex
    for (size_t j = 1; 2 * j < L; ++j) {
        size_t i = L - j;  // 1-based
        if (i <= 1) break;
        bool same = true;
        for (size_t k = 0; k <= j && same; ++k) same = v[i - j + k - 1] == v[i + k - 1];
        for (size_t k = 0; k < j && same; ++k) same = lab[i - j + k - 1] == lab[i + k - 1];
        if (same) return false;
    }
    return true;
}

}  // namespace

bool isMinimalPath(const LabeledPath& p) {
    std::vector<Position> v;
    std::vector<uint32_t> lab;
    for (size_t k = 0; k < p.nodes.size(); ++k) {
        v.push_back(p.nodes[k]);
        if (k > 0) lab.push_back(p.labels[k - 1]);
        if (!extendsMinimally(v, lab)) return false;
    }
    return p.nodes.size() > 1;
}

std::vector<LabeledPath> minimalPaths(const PropagationGraph& pg, Position from, Position to, size_t maxEdges) {
    if (maxEdges == 0) maxEdges = 4 * pg.edges.size() + 4;
    std::vector<LabeledPath> out;
    LabeledPath cur;
    cur.nodes.push_back(from);
    auto dfs = [&](auto&& self) -> void {
        if (cur.labels.size() >= maxEdges) return;
        for (size_t e : pg.outgoing(cur.nodes.back())) {
            const auto& edge = pg.edges[e];
            cur.nodes.push_back(edge.to);
            cur.labels.push_back(edge.tgd);
            if (extendsMinimally(cur.nodes, cur.labels)) {
                if (edge.to == to) out.push_back(cur);
                self(self);
            }
            cur.nodes.pop_back();
            cur.labels.pop_back();
        }
    };
    dfs(dfs);
    return out;
}

bool tightPair(const TGD& first, const TGD& second) {
    if (second.body.size() != 1 || first.body.size() != 1)
        throw std::invalid_argument("tightness is defined for linear TGDs only");
    return findHomomorphism(second.body, {first.head}).has_value();
}

bool isTight(const std::vector<TGD>& seq) {
    for (const auto& t : seq)
        if (t.body.size() != 1) throw std::invalid_argument("tightness is defined for linear TGDs only");
    for (size_t i = 0; i + 1 < seq.size(); ++i)
        if (!tightPair(seq[i], seq[i + 1])) return false;
    return true;
}

bool isCompatible(const std::vector<TGD>& seq, const Atom& a) {
    if (seq.empty()) return false;
    if (seq.front().body.size() != 1) throw std::invalid_argument("compatibility is defined for linear TGDs only");
    return findHomomorphism(seq.front().body, {a}).has_value();
}

const std::vector<LabelSeq>& CoverGraph::sequences(Position from, Position to) const {
    static const std::vector<LabelSeq> none;
    auto it = reach.find({from, to});
    return it == reach.end() ? none : it->second;
}

size_t CoverGraph::edgeCount() const {
    size_t n = 0;
    for (const auto& [k, v] : reach) n += v.size();
    return n;
}

CoverGraph buildCoverGraph(const std::vector<TGD>& tgds, const PropagationGraph& pg, size_t maxLength) {
    CoverGraph cg;
    for (const auto& t : tgds)
        if (t.body.size() != 1) throw std::invalid_argument("the cover graph needs linear TGDs");
    size_t n = tgds.size();
    std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) tight[a][b] = tightPair(tgds[a], tgds[b]);

    std::vector<char> used(n, 0);
    LabelSeq labels;
    auto dfs = [&](auto&& self, Position start, Position at) -> void {
        for (size_t e : pg.outgoing(at)) {
            const auto& edge = pg.edges[e];
            if (used[edge.tgd]) continue;
            if (!labels.empty() && !tight[labels.back()][edge.tgd]) continue;
            if (maxLength && labels.size() >= maxLength) {
                cg.truncated = true;
                continue;
            }
            used[edge.tgd] = 1;
            labels.push_back(edge.tgd);
            cg.reach[{start, edge.to}].push_back(labels);
            self(self, start, edge.to);
            labels.pop_back();
            used[edge.tgd] = 0;
        }
    };
    for (Position p : pg.nodes) dfs(dfs, p, p);
    for (auto& [k, seqs] : cg.reach) {
        std::sort(seqs.begin(), seqs.end());
        seqs.erase(std::unique(seqs.begin(), seqs.end()), seqs.end());
    }
    return cg;
}

CoverGraph buildCoverGraph(const std::vector<TGD>& tgds, size_t maxLength) {
    return buildCoverGraph(tgds, buildPropagationGraph(tgds), maxLength);
}

std::vector<std::set<Position>> affectedPositions(const std::vector<TGD>& tgds) {
    std::vector<std::set<Position>> out(tgds.size());
    for (size_t s = 0; s < tgds.size(); ++s) {
        auto base = tgds[s].existentialPosition();
        if (!base) continue;
        auto& aff = out[s];
        aff.insert(*base);
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& t : tgds)
                for (uint32_t j = 0; j < t.head.arity(); ++j) {
                    Position p{t.head.pred, j};
                    if (aff.count(p)) continue;
                    Term v = t.head.args[j];
                    if (!v.isVariable()) continue;
                    bool seen = false, onlyAffected = true;
                    for (const auto& b : t.body)
                        for (uint32_t i = 0; i < b.arity(); ++i)
                            if (b.args[i] == v) {
                                seen = true;
                                if (!aff.count(Position{b.pred, i})) onlyAffected = false;
                            }
                    if (seen && onlyAffected) {
                        aff.insert(p);
                        changed = true;
                    }
                }
        }
    }
    return out;
}

std::string dumpPropagationGraph(const PropagationGraph& pg, const std::vector<TGD>& tgds) {
    std::ostringstream out;
    std::map<std::pair<Position, Position>, std::vector<uint32_t>> grouped;
    for (const auto& e : pg.edges) grouped[{e.from, e.to}].push_back(e.tgd);
    std::set<Position> touched;
    for (const auto& [k, labels] : grouped) {
        touched.insert(k.first);
        touched.insert(k.second);
        out << k.first.str() << " -> " << k.second.str() << " : ";
        for (size_t i = 0; i < labels.size(); ++i) out << (i ? "," : "") << tgds[labels[i]].label;
        out << "\n";
    }
    for (Position p : pg.nodes)
        if (!touched.count(p)) out << p.str() << " (isolated)\n";
    return out.str();
}

std::string dumpCoverGraph(const CoverGraph& cg, const std::vector<TGD>& tgds) {
    std::ostringstream out;
    for (const auto& [k, seqs] : cg.reach)
        for (const auto& seq : seqs) {
            out << k.first.str() << " -> " << k.second.str() << " : ";
            for (size_t i = 0; i < seq.size(); ++i) out << (i ? "," : "") << tgds[seq[i]].label;
            out << "\n";
        }
    return out.str();
}

}  // namespace xr
