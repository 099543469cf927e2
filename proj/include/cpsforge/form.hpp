#pragma once

#include "cpsforge/chart.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

// Bigraded forms on a chart of the jet bundle.
//
// Sign conventions. The wedge product is bigraded commutative,
//   a ^ b = (-1)^{|a||b| + ||a|| ||b||} b ^ a,
// with |.| the horizontal and ||.|| the vertical degree, so dx^i and theta
// commute with each other. On top of that product the library offers two
// families of vertical operators, related by the factor (-1)^r on forms of
// horizontal degree r:
//
//   operator        anticommuting (internal)      commuting (field-space)
//   horizontal d    d_H                           d_H
//   vertical d      d_V  = (-1)^r dd              dd
//   contraction     iota_vertical = (-1)^r ii     ii_vertical
//   Lie derivative  lie_vertical                  lie_vertical (identical)
//
// Identities: d_H d_V + d_V d_H = 0, iota_vertical d_H + d_H iota_vertical = 0,
// while dd and ii_vertical commute with d_H. lie_vertical = d_V iota + iota d_V
// = dd ii + ii dd. The pipeline works with dd and ii_vertical.

namespace cpsforge {

// Basis one-form: horizontal dx^i, or the contact form theta^a_J identified by
// the jet atom u^a_J.
using BasisId = std::uint32_t;
constexpr BasisId kVerticalBit = 0x80000000u;

[[nodiscard]] inline BasisId basis_dx(int i) { return static_cast<BasisId>(i); }
[[nodiscard]] inline BasisId basis_theta(AtomId jet) { return kVerticalBit | jet; }
[[nodiscard]] inline BasisId basis_theta(const std::string& label, const MultiIndex& J)
{
    return basis_theta(intern_jet(label, J));
}
[[nodiscard]] inline bool is_vertical(BasisId b) { return (b & kVerticalBit) != 0; }
[[nodiscard]] inline int basis_coord(BasisId b) { return static_cast<int>(b); }
[[nodiscard]] inline AtomId basis_jet(BasisId b) { return b & ~kVerticalBit; }
// Global basis order: dx^1 < ... < dx^n < theta, thetas by (label, J lexicographic).
[[nodiscard]] int compare_basis(BasisId a, BasisId b);

// Canonical wedge word: horizontal factors sorted, then vertical factors sorted.
using Word = std::vector<BasisId>;

struct WordLess {
    bool operator()(const Word& a, const Word& b) const;
};

[[nodiscard]] std::pair<int, int> word_bidegree(const Word& w);

// Unnormalized input: arbitrary factor order, repeated factors allowed.
struct RawTerm {
    Expr coeff;
    std::vector<BasisId> factors;
};
struct RawForm {
    std::vector<RawTerm> terms;
};

class Form {
public:
    using Terms = std::map<Word, Expr, WordLess>;

    Form() = default;
    static Form scalar(const Expr& e);
    static Form dx(int i);
    static Form theta(const std::string& label, const MultiIndex& J = {});
    static Form basis(BasisId b);
    // dx^{i_1} ^ ... ^ dx^{i_k} for the given coordinates in the given order.
    static Form dx_word(const std::vector<int>& coords);
    // dx^1 ^ ... ^ dx^n.
    static Form volume(int n);

    [[nodiscard]] const Terms& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    // (-1,-1) for the zero form.
    [[nodiscard]] std::pair<int, int> bidegree() const;
    [[nodiscard]] int horizontal_degree() const { return bidegree().first; }
    [[nodiscard]] int vertical_degree() const { return bidegree().second; }
    [[nodiscard]] Expr coefficient(const Word& w) const;
    [[nodiscard]] std::size_t size() const { return terms_.size(); }

    // Adds c * w for a canonical word w. Mixed bidegrees are rejected.
    void add_term(const Word& w, const Expr& c);

    Form operator-() const;
    friend Form operator+(const Form& a, const Form& b);
    friend Form operator-(const Form& a, const Form& b);
    Form& operator+=(const Form& o);
    Form& operator-=(const Form& o);
    friend Form operator*(const Expr& c, const Form& f);
    friend Form operator*(const Form& f, const Expr& c) { return c * f; }
    friend bool operator==(const Form&, const Form&) = default;

    template <class Fn>
    [[nodiscard]] Form map_coefficients(Fn fn) const
    {
        Form out;
        for (const auto& [w, c] : terms_) out.add_term(w, fn(c));
        return out;
    }

    [[nodiscard]] std::string str(const NameTable& names = {}) const;

private:
    Terms terms_;
};

// Forms of several bidegrees, keyed by (r, s).
using MixedForm = std::map<std::pair<int, int>, Form>;

// Label -> W^a for an evolutionary vector field W^a d/du^a.
using EvolutionaryField = std::map<std::string, Expr>;

[[nodiscard]] std::string basis_str(BasisId b, const NameTable& names);

// Sort the factors of a raw word with the bigraded sign; returns 0 when a
// factor repeats.
[[nodiscard]] int canonicalize_word(std::vector<BasisId>& factors);

[[nodiscard]] Form normalize(const RawForm& raw);
[[nodiscard]] Form normalize(const Form& f);

[[nodiscard]] Form wedge(const Form& a, const Form& b);

// Horizontal Lie derivative along the total derivative D_i: acts on
// coefficients by D_i and on contact forms by theta_J -> theta_{J+i}.
[[nodiscard]] Form total_lie(const Chart& chart, int i, const Form& f);

[[nodiscard]] Form d_H(const Chart& chart, const Form& f);
// Horizontal differential restricted to the listed coordinates.
[[nodiscard]] Form d_H_on(const Chart& chart, const std::vector<int>& coords, const Form& f);
[[nodiscard]] Form dd(const Chart& chart, const Form& f);
[[nodiscard]] Form d_V(const Chart& chart, const Form& f);

// Contraction with the total lift xi^i D_i of a vector field on the base
// (components depend on x only): iota dx^i = xi^i, iota theta = 0.
[[nodiscard]] Form iota_horizontal(const Chart& chart, const std::vector<Expr>& xi, const Form& f);
// Contraction with the coordinate lift xi^i d/dx^i in the total-degree graded
// algebra, expanding theta_J = du_J - u_{J+m} dx^m: iota theta_J = -u_{J+m} xi^m.
[[nodiscard]] MixedForm iota_coordinate_lift(const Chart& chart, const std::vector<Expr>& xi, const Form& f);
[[nodiscard]] Form lie_horizontal(const Chart& chart, const std::vector<Expr>& xi, const Form& f);

[[nodiscard]] Form ii_vertical(const Chart& chart, const EvolutionaryField& W, const Form& f);
[[nodiscard]] Form iota_vertical(const Chart& chart, const EvolutionaryField& W, const Form& f);
[[nodiscard]] Form lie_vertical(const Chart& chart, const EvolutionaryField& W, const Form& f);

// (-1)^r applied term by term: converts between dd/d_V and ii/iota_vertical.
[[nodiscard]] Form horizontal_parity(const Form& f);

// Substitutes atoms in every coefficient.
[[nodiscard]] Form substitute(const Form& f, const std::map<AtomId, Expr>& rules);

// Replaces u^a_J by D_J phi^a for the given section and every contact form by
// zero's pullback (theta restricted to a section vanishes).
[[nodiscard]] Form pullback_to_section(const Chart& chart, const Form& f, const std::map<std::string, Expr>& section);

// Highest jet order among coefficients and contact factors; -1 if none.
[[nodiscard]] int jet_order(const Form& f);

// Drops all terms containing dx^i and substitutes x^i = value.
[[nodiscard]] Form restrict_to_hyperplane(const Form& f, int i, const Expr& value);

// The coefficient c of f = c * vol for a top-degree horizontal form on the
// listed coordinates (vertical factors kept): returns a form of bidegree (0, s).
[[nodiscard]] Form strip_volume(const Form& f, const std::vector<int>& coords);

} // namespace cpsforge
