#include "xrewrite/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace xr {

namespace {

enum class Tok { Lower, Upper, Number, String, Arrow, Neck, Bang, Dot, Comma, LParen, RParen, Colon, Question, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : src_(s) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", line_, col_});
                return out;
            }
            int l = line_, c = col_;
            char ch = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(ch))) {
                std::string id;
                while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    id += advance();
                out.push_back({std::isupper(static_cast<unsigned char>(id[0])) ? Tok::Upper : Tok::Lower, id, l, c});
            } else if (std::isdigit(static_cast<unsigned char>(ch))) {
                std::string num;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) num += advance();
                out.push_back({Tok::Number, num, l, c});
            } else if (ch == '\'') {
                advance();
                std::string s;
                while (true) {
                    if (pos_ >= src_.size()) throw ParseError("unterminated string", l, c);
                    char x = advance();
                    if (x == '\'') {
                        if (pos_ < src_.size() && src_[pos_] == '\'') {
                            advance();
                            s += '\'';
                            continue;
                        }
                        break;
                    }
                    s += x;
                }
                out.push_back({Tok::String, s, l, c});
            } else if (ch == '-' && peek(1) == '>') {
                advance(), advance();
                out.push_back({Tok::Arrow, "->", l, c});
            } else if (ch == ':' && peek(1) == '-') {
                advance(), advance();
                out.push_back({Tok::Neck, ":-", l, c});
            } else {
                Tok k;
                switch (ch) {
                case '!': k = Tok::Bang; break;
                case '.': k = Tok::Dot; break;
                case ',': k = Tok::Comma; break;
                case '(': k = Tok::LParen; break;
                case ')': k = Tok::RParen; break;
                case ':': k = Tok::Colon; break;
                case '?': k = Tok::Question; break;
                default: throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
                }
                advance();
                out.push_back({k, std::string(1, ch), l, c});
            }
        }
    }

private:
    char peek(size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

const char* describe(Tok k) {
    switch (k) {
    case Tok::Lower: return "identifier";
    case Tok::Upper: return "variable";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::Arrow: return "'->'";
    case Tok::Neck: return "':-'";
    case Tok::Bang: return "'!'";
    case Tok::Dot: return "'.'";
    case Tok::Comma: return "','";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Colon: return "':'";
    case Tok::Question: return "'?'";
    case Tok::End: return "end of input";
    }
    return "token";
}

struct Located {
    Atom atom;
    int line, col;
};

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

    OntologyDocument run() {
        while (cur().kind != Tok::End) statement();
        for (const auto& [fd, at] : fdSites_) {
            doc_.fds.push_back(fd);
            auto it = doc_.arities.find(fd.pred);
            if (it == doc_.arities.end()) continue;
            for (uint32_t i : fd.lhs)
                if (i >= it->second)
                    throw ParseError("functional dependency index " + std::to_string(i + 1) + " out of range for " +
                                         Symbols::name(fd.pred) + "/" + std::to_string(it->second),
                                     at.first, at.second);
            for (uint32_t i : fd.rhs)
                if (i >= it->second)
                    throw ParseError("functional dependency index " + std::to_string(i + 1) + " out of range for " +
                                         Symbols::name(fd.pred) + "/" + std::to_string(it->second),
                                     at.first, at.second);
        }
        return std::move(doc_);
    }

private:
    const Token& cur() const { return toks_[i_]; }
    const Token& next() const { return toks_[std::min(i_ + 1, toks_.size() - 1)]; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + ", found " + describe(cur().kind) +
                             (cur().text.empty() || cur().kind == Tok::End ? "" : " '" + cur().text + "'"),
                         cur().line, cur().col);
    }

    Token expect(Tok k) {
        if (cur().kind != k) fail(std::string("expected ") + describe(k));
        return toks_[i_++];
    }

    void noteArity(const Located& a) {
        auto [it, inserted] = doc_.arities.emplace(a.atom.pred, a.atom.arity());
        if (!inserted && it->second != a.atom.arity())
            throw ParseError("arity conflict for predicate " + a.atom.predName() + ": used with " +
                                 std::to_string(it->second) + " and " + std::to_string(a.atom.arity()) + " arguments",
                             a.line, a.col);
    }

    Term term() {
        const Token& t = cur();
        switch (t.kind) {
        case Tok::Upper: ++i_; return Term::variable(t.text);
        case Tok::Lower:
        case Tok::Number:
        case Tok::String: ++i_; return Term::constant(t.text);
        default: fail("expected a term");
        }
    }

    Located atom() {
        if (cur().kind != Tok::Lower) fail("expected a predicate name");
        Token name = expect(Tok::Lower);
        std::vector<Term> args;
        if (cur().kind == Tok::LParen) {
            ++i_;
            if (cur().kind != Tok::RParen) {
                args.push_back(term());
                while (cur().kind == Tok::Comma) {
                    ++i_;
                    args.push_back(term());
                }
            }
            expect(Tok::RParen);
        }
        Located out{Atom(name.text, std::move(args)), name.line, name.col};
        noteArity(out);
        return out;
    }

    std::vector<Located> atoms() {
        std::vector<Located> out{atom()};
        while (cur().kind == Tok::Comma) {
            ++i_;
            out.push_back(atom());
        }
        return out;
    }

    static std::vector<Atom> strip(const std::vector<Located>& xs) {
        std::vector<Atom> out;
        for (const auto& x : xs) out.push_back(x.atom);
        return out;
    }

    void query(const Located& head) {
        auto body = atoms();
        expect(Tok::Dot);
        for (Term t : head.atom.args) {
            if (!t.isVariable()) continue;
            bool found = std::any_of(body.begin(), body.end(), [&](const Located& a) { return containsTerm(a.atom, t); });
            if (!found)
                throw ParseError("unsafe query: distinguished variable " + t.name() + " does not occur in the body",
                                 head.line, head.col);
        }
        doc_.queries.emplace_back(head.atom.pred, head.atom.args, strip(body));
    }

    void functionalDependency() {
        Token kw = expect(Tok::Lower);
        Token pred = expect(Tok::Lower);
        expect(Tok::Colon);
        auto indices = [&] {
            std::vector<uint32_t> xs;
            do {
                if (!xs.empty()) ++i_;
                Token n = expect(Tok::Number);
                long v = std::stol(n.text);
                if (v < 1) throw ParseError("functional dependency indices are 1-based", n.line, n.col);
                xs.push_back(uint32_t(v - 1));
            } while (cur().kind == Tok::Comma);
            return xs;
        };
        FunctionalDependency fd;
        fd.pred = Symbols::intern(pred.text);
        fd.lhs = indices();
        expect(Tok::Arrow);
        fd.rhs = indices();
        expect(Tok::Dot);
        fdSites_.push_back({fd, {kw.line, kw.col}});
    }

    void statement() {
        if (cur().kind == Tok::Question) {
            ++i_;
            Located head = atom();
            expect(Tok::Neck);
            query(head);
            return;
        }
        if (cur().kind == Tok::Lower && cur().text == "fd" && next().kind == Tok::Lower) {
            functionalDependency();
            return;
        }
        auto lhs = atoms();
        if (cur().kind == Tok::Neck) {
            if (lhs.size() != 1) throw ParseError("a query has exactly one head atom", lhs[0].line, lhs[0].col);
            ++i_;
            query(lhs[0]);
        } else if (cur().kind == Tok::Arrow) {
            ++i_;
            if (cur().kind == Tok::Bang) {
                ++i_;
                expect(Tok::Dot);
                NegativeConstraint nc;
                nc.body = strip(lhs);
                nc.label = "n" + std::to_string(doc_.ncs.size() + 1);
                doc_.ncs.push_back(std::move(nc));
                return;
            }
            auto rhs = atoms();
            expect(Tok::Dot);
            RawTGD r;
            r.body = strip(lhs);
            r.head = strip(rhs);
            r.label = "s" + std::to_string(doc_.tgds.size() + 1);
            doc_.tgds.push_back(std::move(r));
        } else if (cur().kind == Tok::Dot) {
            ++i_;
            for (const auto& a : lhs) {
                for (Term t : a.atom.args)
                    if (t.isVariable()) throw ParseError("facts must be ground", a.line, a.col);
                doc_.facts.push_back(a.atom);
            }
        } else {
            fail("expected '->', ':-' or '.'");
        }
    }

    std::vector<Token> toks_;
    size_t i_ = 0;
    OntologyDocument doc_;
    std::vector<std::pair<FunctionalDependency, std::pair<int, int>>> fdSites_;
};

void checkAtomArities(const OntologyDocument& doc, const std::vector<Atom>& atoms) {
    for (const auto& a : atoms) {
        auto it = doc.arities.find(a.pred);
        if (it != doc.arities.end() && it->second != a.arity())
            throw ParseError("arity conflict for predicate " + a.predName() + ": used with " +
                                 std::to_string(it->second) + " and " + std::to_string(a.arity()) + " arguments",
                             0, 0);
    }
}

}  // namespace

OntologyDocument parseOntology(std::string_view text) { return Parser(text).run(); }

Query parseQuery(std::string_view text) {
    auto doc = parseOntology(text);
    if (doc.queries.size() != 1 || !doc.tgds.empty() || !doc.ncs.empty() || !doc.fds.empty() || !doc.facts.empty())
        throw ParseError("expected exactly one query", 0, 0);
    return doc.queries.front();
}

std::vector<Atom> parseDatabase(std::string_view text) {
    auto doc = parseOntology(text);
    if (!doc.tgds.empty() || !doc.ncs.empty() || !doc.fds.empty() || !doc.queries.empty())
        throw ParseError("a database holds ground facts only", 0, 0);
    return doc.facts;
}

void checkArities(const OntologyDocument& doc, const Query& q) { checkAtomArities(doc, q.body); }

void checkArities(const OntologyDocument& doc, const std::vector<Atom>& facts) { checkAtomArities(doc, facts); }

std::string serialize(const Query& q) { return q.str(); }

std::string serialize(const OntologyDocument& doc) {
    std::ostringstream out;
    for (const auto& r : doc.tgds) out << r.str() << "\n";
    for (const auto& n : doc.ncs) out << n.str() << "\n";
    for (const auto& f : doc.fds) out << f.str() << "\n";
    for (const auto& q : doc.queries) out << "? " << q.str() << "\n";
    for (const auto& a : doc.facts) out << a.str() << ".\n";
    return out.str();
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path, 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace xr
