#include "xrewrite/emit.hpp"

#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace xr {

SchemaMapping SchemaMapping::fromJson(const std::string& text) {
    SchemaMapping m;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw EmitError(std::string("bad schema mapping: ") + e.what());
    }
    if (!j.is_object()) throw EmitError("bad schema mapping: expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        TableBinding b;
        const auto& v = it.value();
        b.table = v.value("table", it.key());
        if (v.contains("columns"))
            for (const auto& c : v["columns"]) b.columns.push_back(c.get<std::string>());
        m.tables[it.key()] = b;
    }
    return m;
}

SchemaMapping SchemaMapping::defaultMapping() {
    SchemaMapping m;
    m.defaults = true;
    return m;
}

TableBinding SchemaMapping::lookup(const std::string& pred, size_t arity) const {
    auto it = tables.find(pred);
    if (it == tables.end()) {
        if (!defaults) throw EmitError("no table for predicate " + pred);
        TableBinding b{pred, {}};
        for (size_t i = 0; i < arity; ++i) b.columns.push_back("c" + std::to_string(i + 1));
        return b;
    }
    if (it->second.columns.size() != arity)
        throw EmitError("table for " + pred + " has " + std::to_string(it->second.columns.size()) +
                        " columns, expected " + std::to_string(arity));
    return it->second;
}

std::string sqlLiteral(Term c) {
    std::string s = c.name(), out = "'";
    for (char ch : s) {
        if (ch == '\'') out += '\'';
        out += ch;
    }
    return out + "'";
}

namespace {

std::string block(const Query& q, const SchemaMapping& mapping) {
    std::vector<std::string> from, where;
    std::vector<std::pair<Term, std::string>> first;   // variable -> column of first use
    auto lookupVar = [&](Term v) -> const std::string* {
        for (const auto& [t, col] : first)
            if (t == v) return &col;
        return nullptr;
    };
    for (size_t i = 0; i < q.body.size(); ++i) {
        const Atom& a = q.body[i];
        TableBinding b = mapping.lookup(a.predName(), a.arity());
        std::string alias = "t" + std::to_string(i + 1);
        from.push_back(b.table + " " + alias);
        for (size_t k = 0; k < a.arity(); ++k) {
            std::string col = alias + "." + b.columns[k];
            Term t = a.args[k];
            if (t.isVariable()) {
                if (const auto* prev = lookupVar(t)) where.push_back(*prev + " = " + col);
                else first.emplace_back(t, col);
            } else {
                where.push_back(col + " = " + sqlLiteral(t));
            }
        }
    }
    std::string select;
    if (q.head.empty()) select = "1";
    for (size_t i = 0; i < q.head.size(); ++i) {
        Term t = q.head[i];
        select += (i ? ", " : "");
        if (t.isVariable()) select += *lookupVar(t);
        else select += sqlLiteral(t);
    }
    std::string out = "SELECT " + select;
    if (!from.empty()) {
        out += " FROM ";
        for (size_t i = 0; i < from.size(); ++i) out += (i ? ", " : "") + from[i];
    }
    if (!where.empty()) {
        out += " WHERE ";
        for (size_t i = 0; i < where.size(); ++i) out += (i ? " AND " : "") + where[i];
    }
    return out;
}

}  // namespace

std::string toSQL(const Query& q, const SchemaMapping& mapping) { return toSQL(std::vector<Query>{q}, mapping); }

std::string toSQL(const std::vector<Query>& ucq, const SchemaMapping& mapping) {
    if (ucq.empty()) return "";
    std::string out;
    for (size_t i = 0; i < ucq.size(); ++i) out += (i ? "\nUNION\n" : "") + block(ucq[i], mapping);
    if (ucq.front().head.empty()) out += "\nLIMIT 1";
    return out;
}

std::string ucqText(const std::vector<Query>& ucq) {
    std::string out;
    for (const auto& q : ucq) out += prettify(q).str() + "\n";
    return out;
}

std::string toDatalog(const PipelineResult& r) {
    if (r.decomposition.size() <= 1) return ucqText(r.ucq);
    std::string out;
    for (const auto& part : r.componentUcqs) out += ucqText(part);
    out += prettify(r.decomposition.reconciliation).str() + "\n";
    return out;
}

namespace {

std::vector<std::pair<std::string, std::string>> rows(const RewriteMetrics& m) {
    auto ms = [](double v) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(3) << v;
        return s.str();
    };
    return {
        {"size", std::to_string(m.size)},
        {"atoms", std::to_string(m.atoms)},
        {"joins", std::to_string(m.joins)},
        {"explored", std::to_string(m.explored)},
        {"generated", std::to_string(m.generated)},
        {"factorizations", std::to_string(m.factorizations)},
        {"components", std::to_string(m.components)},
        {"mgu_cache_hits", std::to_string(m.mguHits)},
        {"mgu_cache_misses", std::to_string(m.mguMisses)},
        {"rename_cache_hits", std::to_string(m.renameHits)},
        {"rename_cache_misses", std::to_string(m.renameMisses)},
        {"elimination_cache_hits", std::to_string(m.eliminationHits)},
        {"elimination_cache_misses", std::to_string(m.eliminationMisses)},
        {"rewrite_ms", ms(m.rewriteMs)},
        {"split_ms", ms(m.splitMs)},
        {"unfold_ms", ms(m.unfoldMs)},
        {"total_ms", ms(m.totalMs)},
    };
}

}  // namespace

std::string statsText(const RewriteMetrics& m) {
    std::ostringstream out;
    for (const auto& [k, v] : rows(m)) out << std::left << std::setw(26) << k << std::right << std::setw(12) << v << "\n";
    return out.str();
}

std::string statsKeyValue(const RewriteMetrics& m) {
    std::string out;
    for (const auto& [k, v] : rows(m)) out += k + "=" + v + "\n";
    return out;
}

}  // namespace xr
