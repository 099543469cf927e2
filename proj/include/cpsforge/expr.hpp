#pragma once

#include "cpsforge/error.hpp"
#include "cpsforge/rational.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cpsforge {

// Coordinate index on a chart, zero based (x^1 of the literature is index 0).
using Index = std::uint8_t;

// Sorted multiset of coordinate indices; u^a_J with J = {0,0,1} is u_{ttx} on (t,x).
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> idx);
    explicit MultiIndex(std::vector<Index> idx);

    [[nodiscard]] std::size_t order() const { return idx_.size(); }
    [[nodiscard]] bool empty() const { return idx_.empty(); }
    [[nodiscard]] const std::vector<Index>& indices() const { return idx_; }
    [[nodiscard]] int count(int i) const;
    [[nodiscard]] bool contains(int i) const { return count(i) > 0; }
    [[nodiscard]] MultiIndex plus(int i) const;
    [[nodiscard]] MultiIndex plus(const MultiIndex& other) const;
    // Removes one copy of i; i must be present.
    [[nodiscard]] MultiIndex minus(int i) const;
    // True if this is a sub-multiset of other.
    [[nodiscard]] bool divides(const MultiIndex& other) const;
    // other minus this; requires divides(other).
    [[nodiscard]] MultiIndex complement_in(const MultiIndex& other) const;

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
    // Plain lexicographic order of the sorted index sequences.
    friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b)
    {
        return a.idx_ <=> b.idx_;
    }

private:
    std::vector<Index> idx_;
};

using AtomId = std::uint32_t;

enum class AtomKind : std::uint8_t { Coord, Param, Jet, Func };

class Expr;

// Interned leaf of the polynomial ring. Func atoms are applications of a
// formal function symbol with a derivative multi-order, e.g. V''(u) is
// Func{name=V, derivs={2}, args={u}}.
struct Atom {
    AtomKind kind = AtomKind::Param;
    int coord = -1;               // Coord
    std::string name;             // Param name, Func name, or Jet field label
    MultiIndex J;                 // Jet
    std::vector<int> derivs;      // Func
    std::vector<Expr> args;       // Func
    std::string key;              // canonical interning key
};

[[nodiscard]] const Atom& atom(AtomId id);
[[nodiscard]] AtomId intern_coord(int i);
[[nodiscard]] AtomId intern_param(const std::string& name);
[[nodiscard]] AtomId intern_jet(const std::string& label, const MultiIndex& J);
[[nodiscard]] AtomId intern_func(const std::string& name, std::vector<int> derivs, std::vector<Expr> args);
// Structural total order (independent of interning order).
[[nodiscard]] int compare_atoms(AtomId a, AtomId b);

// Monomial: atoms with nonzero integer exponents, sorted by AtomId.
using Monomial = std::vector<std::pair<AtomId, int>>;

// Names used when printing; coordinate i prints as names[i] (default x1, x2, ...).
struct NameTable {
    std::vector<std::string> coords;
    [[nodiscard]] std::string coord(int i) const;
    [[nodiscard]] std::string jet(const std::string& label, const MultiIndex& J) const;
};

// Expanded polynomial (Laurent in atoms) with rational coefficients.
class Expr {
public:
    using Terms = std::map<Monomial, Rational>;

    Expr() = default;
    Expr(Rational c); // NOLINT(google-explicit-constructor)
    Expr(std::int64_t c) : Expr(Rational(c)) {} // NOLINT(google-explicit-constructor)
    Expr(int c) : Expr(Rational(c)) {}          // NOLINT(google-explicit-constructor)

    static Expr from_atom(AtomId a, int power = 1);
    static Expr coord(int i) { return from_atom(intern_coord(i)); }
    static Expr param(const std::string& n) { return from_atom(intern_param(n)); }
    static Expr jet(const std::string& label, const MultiIndex& J = {}) { return from_atom(intern_jet(label, J)); }
    static Expr func(const std::string& name, std::vector<Expr> args, std::vector<int> derivs = {});

    [[nodiscard]] const Terms& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] bool is_constant() const;
    [[nodiscard]] Rational constant_value() const; // requires is_constant()
    [[nodiscard]] std::size_t size() const { return terms_.size(); }

    Expr operator-() const;
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Rational& c);
    friend Expr operator*(const Rational& c, const Expr& a) { return a * c; }
    // Division is supported only by single-term (monomial) divisors.
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr& operator+=(const Expr& o);
    Expr& operator-=(const Expr& o);
    Expr& operator*=(const Expr& o) { return *this = *this * o; }

    [[nodiscard]] Expr pow(int e) const;

    friend bool operator==(const Expr&, const Expr&) = default;

    // Partial derivative with respect to an atom (chain rule through Func args).
    [[nodiscard]] Expr diff(AtomId v) const;
    // Simultaneous substitution of atoms (also inside Func arguments).
    [[nodiscard]] Expr substitute(const std::map<AtomId, Expr>& rules) const;
    // Every atom occurring, including nested ones inside Func arguments.
    [[nodiscard]] std::set<AtomId> atoms() const;
    // Highest |J| of any jet atom; -1 when no jet occurs.
    [[nodiscard]] int jet_order() const;
    [[nodiscard]] bool depends_on_jets() const { return jet_order() >= 0; }

    [[nodiscard]] std::string str(const NameTable& names = {}) const;

    void add_term(const Monomial& m, const Rational& c);

private:
    Terms terms_;
};

[[nodiscard]] Monomial monomial_mul(const Monomial& a, const Monomial& b);

// Applies the derivation that sends every non-Func atom a to leaf(a); Func
// atoms follow by the chain rule through their arguments.
[[nodiscard]] Expr apply_derivation(const Expr& e, const std::function<Expr(AtomId)>& leaf);
[[nodiscard]] std::string atom_str(AtomId a, const NameTable& names);

// Numeric evaluation: the callback supplies values of leaf atoms (Func atoms included).
using AtomValue = std::function<double(AtomId)>;
[[nodiscard]] double evaluate(const Expr& e, const AtomValue& value);

} // namespace cpsforge
