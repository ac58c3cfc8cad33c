#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xr {

// Interned names for predicates, constants and variables.
class Symbols {
public:
    static uint32_t intern(std::string_view name);
    static std::string name(uint32_t id);
};

enum class TermKind : uint8_t { Constant = 0, Null = 1, Variable = 2 };

// Packed term: kind in the top bits, then a symbol id, then a tag.
// Variables use the tag for step renaming (X^i); symbol 0 is reserved
// for generated variables, nulls only use the tag.
class Term {
public:
    constexpr Term() : bits_(~uint64_t(0)) {}

    static Term constant(std::string_view name);
    static Term variable(std::string_view name, uint32_t tag = 0);
    static Term null(uint32_t n) { return make(TermKind::Null, 0, n); }
    static Term generated(uint32_t n) { return make(TermKind::Variable, 0, n); }
    static Term fromIds(TermKind k, uint32_t sym, uint32_t tag) { return make(k, sym, tag); }

    TermKind kind() const { return TermKind(bits_ >> 62); }
    uint32_t sym() const { return uint32_t((bits_ >> 32) & 0x3fffffff); }
    uint32_t tag() const { return uint32_t(bits_); }
    uint64_t bits() const { return bits_; }
    bool valid() const { return bits_ != ~uint64_t(0); }

    bool isConstant() const { return kind() == TermKind::Constant; }
    bool isNull() const { return kind() == TermKind::Null; }
    bool isVariable() const { return kind() == TermKind::Variable; }
    // constants and nulls are both fixed under homomorphisms
    bool isGround() const { return kind() != TermKind::Variable; }

    Term withTag(uint32_t t) const { return make(kind(), sym(), t); }

    std::string name() const;

    friend bool operator==(Term a, Term b) { return a.bits_ == b.bits_; }
    friend auto operator<=>(Term a, Term b) { return a.bits_ <=> b.bits_; }

private:
    static Term make(TermKind k, uint32_t sym, uint32_t tag) {
        Term t;
        t.bits_ = (uint64_t(k) << 62) | (uint64_t(sym & 0x3fffffff) << 32) | tag;
        return t;
    }
    uint64_t bits_;
};

// Lexicographic order on names with every null after every constant.
bool lexLess(Term a, Term b);

struct Position {
    uint32_t pred = 0;
    uint32_t index = 0;   // 0-based; printed 1-based

    friend bool operator==(const Position&, const Position&) = default;
    friend auto operator<=>(const Position&, const Position&) = default;
    std::string str() const;
};

struct Atom {
    uint32_t pred = 0;
    std::vector<Term> args;

    Atom() = default;
    Atom(uint32_t p, std::vector<Term> a) : pred(p), args(std::move(a)) {}
    Atom(std::string_view p, std::vector<Term> a);

    size_t arity() const { return args.size(); }
    std::string predName() const { return Symbols::name(pred); }
    std::string str() const;

    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Query {
    uint32_t headPred = 0;
    std::vector<Term> head;   // distinguished terms, constants allowed after unification
    std::vector<Atom> body;   // sorted, duplicate free

    Query() = default;
    Query(uint32_t hp, std::vector<Term> h, std::vector<Atom> b);

    bool isBoolean() const { return head.empty(); }
    // restore set semantics after edits
    void normalize();
    std::string str() const;

    friend bool operator==(const Query&, const Query&) = default;
};

struct TGD {
    std::vector<Atom> body;
    Atom head;
    int existPos = -1;   // index in head of the existential variable, -1 for none
    std::string label;
    int origin = -1;     // index of the source rule before normalization

    bool isLinear() const { return body.size() == 1; }
    std::optional<Position> existentialPosition() const;
    std::string str() const;
};

// Rule with several head atoms and any number of existentials, as parsed.
struct RawTGD {
    std::vector<Atom> body;
    std::vector<Atom> head;
    std::string label;

    std::vector<Term> existentials() const;
    std::string str() const;
};

struct NegativeConstraint {
    std::vector<Atom> body;
    std::string label;
    std::string str() const;
};

struct FunctionalDependency {
    uint32_t pred = 0;
    std::vector<uint32_t> lhs;   // 0-based attribute indices
    std::vector<uint32_t> rhs;
    std::string str() const;
};

struct TermHash {
    size_t operator()(Term t) const noexcept { return std::hash<uint64_t>{}(t.bits() * 0x9e3779b97f4a7c15ULL); }
};
struct AtomHash {
    size_t operator()(const Atom& a) const noexcept;
};
struct QueryHash {
    size_t operator()(const Query& q) const noexcept;
};

// Variables of atoms in first-occurrence order.
std::vector<Term> variablesOf(const std::vector<Atom>& atoms);
std::vector<Term> variablesOf(const Atom& a);
std::vector<Term> variablesOf(const Query& q);
bool containsTerm(const Atom& a, Term t);
// occurrences in head plus body
size_t occurrences(const Query& q, Term v);
// distinguished variables are always shared
bool isShared(const Query& q, Term v);

class Substitution {
public:
    Substitution() = default;

    Term get(Term t) const;
    bool bound(Term t) const;
    void set(Term from, Term to);
    bool empty() const { return map_.empty(); }
    size_t size() const { return map_.size(); }
    const std::vector<std::pair<Term, Term>>& entries() const { return map_; }

    Term apply(Term t) const { return get(t); }
    Atom apply(const Atom& a) const;
    std::vector<Atom> apply(const std::vector<Atom>& atoms) const;
    Query apply(const Query& q) const;

    // compose(s1, s2) applies s1 first, then s2
    static Substitution compose(const Substitution& s1, const Substitution& s2);
    std::string str() const;

    friend bool operator==(const Substitution&, const Substitution&) = default;

private:
    std::vector<std::pair<Term, Term>> map_;   // sorted by key
};

// Ranking used to pick class representatives: lower wins.
using VarRank = std::function<int(Term)>;

// Most general unifier in idempotent form. Constants (and nulls) rank
// first, then variables by `rank`, then by term order.
std::optional<Substitution> mgu(const std::vector<Atom>& atoms, const VarRank& rank = {});
std::optional<Substitution> mgu(const std::vector<Atom>& atoms, const std::vector<Term>& preferred);

// Atoms grouped by predicate for matching.
class AtomIndex {
public:
    AtomIndex() = default;
    explicit AtomIndex(const std::vector<Atom>& atoms) { for (const auto& a : atoms) add(a); }
    void add(const Atom& a);
    const std::vector<Atom>& with(uint32_t pred) const;
    size_t size() const { return count_; }

private:
    std::vector<std::pair<uint32_t, std::vector<Atom>>> byPred_;
    size_t count_ = 0;
};

// Enumerates homomorphisms h with h(from) ⊆ target extending seed.
// The callback returns false to stop; returns false if stopped early.
bool forEachHomomorphism(const std::vector<Atom>& from, const AtomIndex& target, const Substitution& seed,
                         const std::function<bool(const Substitution&)>& fn);

std::optional<Substitution> findHomomorphism(const std::vector<Atom>& from, const std::vector<Atom>& to,
                                             const std::optional<std::pair<Atom, Atom>>& fixedHead = std::nullopt);

// Canonical representative modulo bijective variable renaming.
Query canonicalRename(const Query& q);
// The canonical form together with the renaming that produces it.
std::pair<Query, Substitution> canonicalRenaming(const Query& q);
std::string canonicalString(const Query& q);

}  // namespace xr
