// Command-line front end: rewrite, classify, chase, graph, eval.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "xrewrite/chase.hpp"
#include "xrewrite/emit.hpp"
#include "xrewrite/graphs.hpp"
#include "xrewrite/normalize.hpp"
#include "xrewrite/parallel.hpp"
#include "xrewrite/parser.hpp"

namespace {

constexpr int kOk = 0, kViolation = 1, kInputError = 2, kBudget = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Inputs {
    std::string ontology, query, database, mapping;
};

xr::OntologyDocument loadOntology(const std::string& path) {
    auto doc = xr::parseOntology(xr::readFile(path));
    xr::checkReservedPredicates(doc);
    return doc;
}

xr::Query loadQuery(const Inputs& in, const xr::OntologyDocument& doc) {
    xr::Query q;
    if (!in.query.empty()) q = xr::parseQuery(xr::readFile(in.query));
    else if (!doc.queries.empty()) q = doc.queries.front();
    else throw InputError("no query: pass --query or embed one with '?'");
    xr::checkArities(doc, q);
    return q;
}

std::vector<xr::Atom> loadDatabase(const Inputs& in, const xr::OntologyDocument& doc) {
    std::vector<xr::Atom> db = doc.facts;
    if (!in.database.empty()) {
        auto more = xr::parseDatabase(xr::readFile(in.database));
        db.insert(db.end(), more.begin(), more.end());
    }
    xr::checkArities(doc, db);
    std::sort(db.begin(), db.end());
    db.erase(std::unique(db.begin(), db.end()), db.end());
    return db;
}

std::string tupleText(const xr::Tuple& t) {
    std::string out = "(";
    for (size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + t[i].name();
    return out + ")";
}

void printAnswers(std::ostream& os, const xr::AnswerSet& answers) {
    for (const auto& t : answers) os << tupleText(t) << "\n";
}

bool guaranteed(const xr::OntologyDocument& doc, const xr::NormalizedOntology& norm) {
    return xr::isLinear(doc.tgds) || xr::isMultiLinear(doc.tgds) || xr::isSticky(doc.tgds) ||
           xr::isLinear(norm.tgds) || xr::isMultiLinear(norm.tgds) || xr::isSticky(norm.tgds);
}

// FD checks run directly over D with neq; NC checks are rewritten first.
int checkConstraints(const xr::OntologyDocument& doc, const std::vector<xr::Atom>& db, const xr::RewriteContext& ctx,
                     std::ostream& err) {
    std::vector<std::string> violations;
    auto dbNeq = xr::withNeq(db);
    auto arities = doc.arities;
    for (const auto& f : db) arities.emplace(f.pred, f.arity());
    auto fdQueries = xr::fdCheckQueries(doc.fds, arities);
    size_t k = 0;
    for (const auto& fd : doc.fds) {
        std::vector<std::string> seen;
        for (; k < fdQueries.size() && fdQueries[k].body.front().pred == fd.pred; ++k) {
            auto w = xr::witness(fdQueries[k], dbNeq);
            if (w.empty()) continue;
            std::string line = "violated " + fd.str() + " by " + w[0].str() + ", " + w[1].str();
            if (std::find(seen.begin(), seen.end(), line) == seen.end()) seen.push_back(line);
        }
        violations.insert(violations.end(), seen.begin(), seen.end());
    }
    auto ncQueries = xr::ncCheckQueries(doc.ncs);
    for (size_t i = 0; i < ncQueries.size(); ++i) {
        auto rewritten = xr::rewriteQuery(ncQueries[i], ctx).ucq;
        for (const auto& d : rewritten) {
            auto w = xr::witness(d, db);
            if (w.empty()) continue;
            std::string line = "violated " + doc.ncs[i].str() + " by";
            for (size_t j = 0; j < w.size(); ++j) line += (j ? ", " : " ") + w[j].str();
            violations.push_back(line);
            break;
        }
    }
    for (const auto& v : violations) err << v << "\n";
    return violations.empty() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xrewrite: rewrite conjunctive queries over TGD ontologies into unions of CQs"};
    app.require_subcommand(1);
    Inputs in;

    xr::RewriteOptions opts;
    bool noElim = false, noParallel = false, stats = false, guarantee = false, defaultMapping = false;
    std::string mode = "none", output = "ucq";

    auto* rewrite = app.add_subcommand("rewrite", "rewrite a query; with a database, check constraints and answer it");
    rewrite->add_option("--ontology,-o", in.ontology, "ontology file (.dlog)")->required();
    rewrite->add_option("--query,-q", in.query, "query file; defaults to the first '?' query of the ontology");
    rewrite->add_option("--database,-d", in.database, "ground facts to check and evaluate against");
    rewrite->add_option("--mapping,-m", in.mapping, "JSON schema mapping for SQL output");
    rewrite->add_flag("--default-mapping", defaultMapping, "map predicate p/n to table p(c1..cn)");
    rewrite->add_flag("--no-elimination", noElim, "disable query elimination");
    rewrite->add_flag("--no-parallel", noParallel, "rewrite the query as a single component");
    rewrite->add_option("--subsumption", mode, "none, tail, idec or irew")
        ->check(CLI::IsMember({"none", "tail", "idec", "irew"}));
    rewrite->add_option("--budget", opts.budget, "maximum number of rewriting steps (0 = unbounded)");
    rewrite->add_option("--jobs,-j", opts.jobs, "worker cap for component rewriting (0 = one per component)");
    rewrite->add_flag("--stats", stats, "print metrics after the rewriting");
    rewrite->add_option("--output", output, "ucq, datalog or sql")->check(CLI::IsMember({"ucq", "datalog", "sql"}));
    rewrite->add_flag("--guarantee-termination", guarantee,
                      "refuse to run unless the TGDs are linear, multi-linear or sticky");
    rewrite->add_option("--mgu-cache", opts.mguCache, "MGU cache entries");
    rewrite->add_option("--rename-cache", opts.renameCache, "canonical renaming cache entries");
    rewrite->add_option("--elimination-cache", opts.eliminationCache, "query elimination cache entries");
    rewrite->add_option("--max-path-length", opts.maxPathLength, "cap on cover graph path length (0 = none)");

    auto* classify = app.add_subcommand("classify", "report linearity, multi-linearity, stickiness and the marking");
    classify->add_option("--ontology,-o", in.ontology, "ontology file")->required();

    size_t steps = 1000;
    auto* chase = app.add_subcommand("chase", "run the oblivious chase and print the instance");
    chase->add_option("--ontology,-o", in.ontology, "ontology file")->required();
    chase->add_option("--database,-d", in.database, "ground facts");
    chase->add_option("--steps", steps, "number of TGD applications");

    bool cover = false;
    size_t maxLen = 0;
    auto* graph = app.add_subcommand("graph", "print the propagation graph, or the cover graph with --cover");
    graph->add_option("--ontology,-o", in.ontology, "ontology file")->required();
    graph->add_flag("--cover", cover, "print the cover graph (linear TGDs only)");
    graph->add_option("--max-path-length", maxLen, "cap on cover graph path length (0 = none)");

    auto* eval = app.add_subcommand("eval", "certain answers through the chase");
    eval->add_option("--ontology,-o", in.ontology, "ontology file")->required();
    eval->add_option("--query,-q", in.query, "query file");
    eval->add_option("--database,-d", in.database, "ground facts");
    eval->add_option("--steps", steps, "chase budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        auto doc = loadOntology(in.ontology);

        if (*classify) {
            auto norm = xr::normalizeTGDs(doc);
            auto show = [](const char* title, const xr::MarkedTGDSet& m, bool linear, bool multi) {
                std::cout << title << ": linear=" << (linear ? "true" : "false")
                          << " multi-linear=" << (multi ? "true" : "false")
                          << " sticky=" << (xr::isSticky(m) ? "true" : "false") << "\n";
                for (size_t s = 0; s < m.tgds.size(); ++s) {
                    std::cout << "  " << m.tgds[s].label << ": " << m.tgds[s].str() << "  marked:";
                    if (m.markedVars[s].empty()) std::cout << " -";
                    for (auto v : m.markedVars[s]) std::cout << " " << v.name();
                    std::cout << "\n";
                }
            };
            show("input", xr::smark(doc.tgds), xr::isLinear(doc.tgds), xr::isMultiLinear(doc.tgds));
            show("normalized", xr::smark(norm.tgds), xr::isLinear(norm.tgds), xr::isMultiLinear(norm.tgds));
            return kOk;
        }

        if (*graph) {
            auto norm = xr::normalizeTGDs(doc);
            if (!cover) {
                std::cout << xr::dumpPropagationGraph(xr::buildPropagationGraph(norm.tgds, doc.arities), norm.tgds);
                return kOk;
            }
            if (!xr::isLinear(norm.tgds)) throw InputError("the cover graph needs linear TGDs");
            auto cg = xr::buildCoverGraph(norm.tgds, maxLen);
            if (cg.truncated) std::cerr << "warning: path length cap reached, elimination will be weaker\n";
            std::cout << xr::dumpCoverGraph(cg, norm.tgds);
            return kOk;
        }

        if (*chase) {
            auto db = loadDatabase(in, doc);
            auto inst = xr::chaseUpTo(db, doc.tgds, steps);
            for (const auto& a : inst.atoms) std::cout << a.str() << ".\n";
            std::cout << "% applications=" << inst.log.size() << " saturated=" << (inst.saturated ? "true" : "false")
                      << "\n";
            return kOk;
        }

        if (*eval) {
            auto q = loadQuery(in, doc);
            auto db = loadDatabase(in, doc);
            auto res = xr::certainAnswers(q, db, doc.tgds, steps);
            printAnswers(std::cout, res.answers);
            std::cout << "% saturated=" << (res.saturated ? "true" : "false") << "\n";
            return kOk;
        }

        // rewrite
        opts.elimination = !noElim;
        opts.parallel = !noParallel;
        opts.subsumption = xr::parseSubsumptionMode(mode);
        auto norm = xr::normalizeTGDs(doc);
        if (guarantee && !guaranteed(doc, norm))
            throw InputError("--guarantee-termination: the TGDs are neither linear, multi-linear nor sticky");
        xr::SchemaMapping mapping;
        if (output == "sql") {
            if (!in.mapping.empty()) mapping = xr::SchemaMapping::fromJson(xr::readFile(in.mapping));
            else if (defaultMapping) mapping = xr::SchemaMapping::defaultMapping();
            else throw InputError("--output=sql needs --mapping or --default-mapping");
        }
        auto q = loadQuery(in, doc);
        xr::RewriteContext ctx(norm, opts);
        if (ctx.options().maxPathLength && ctx.eliminator() && ctx.eliminator()->coverGraph().truncated)
            std::cerr << "warning: path length cap reached, elimination will be weaker\n";

        bool haveDb = !in.database.empty() || !doc.facts.empty();
        std::vector<xr::Atom> db;
        if (haveDb) {
            db = loadDatabase(in, doc);
            int rc = checkConstraints(doc, db, ctx, std::cerr);
            if (rc != kOk) return rc;
        }

        auto res = xr::rewriteQuery(q, ctx);
        if (output == "sql") std::cout << xr::toSQL(res.ucq, mapping) << "\n";
        else if (output == "datalog") std::cout << xr::toDatalog(res);
        else std::cout << xr::ucqText(res.ucq);
        if (haveDb) {
            std::cout << "% answers\n";
            printAnswers(std::cout, xr::evaluateUCQ(res.ucq, db));
        }
        if (stats) std::cerr << xr::statsText(res.metrics) << xr::statsKeyValue(res.metrics);
        return kOk;
    } catch (const xr::BudgetExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBudget;
    } catch (const xr::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
}
