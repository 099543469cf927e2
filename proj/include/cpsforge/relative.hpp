#pragma once

#include "cpsforge/jet.hpp"

namespace cpsforge {

// Pair (bulk, boundary) over (M, dM) with dM = {x^n = 0}. The boundary part is
// a form on the boundary chart: no dx^n factor and no explicit x^n dependence.
// Transversal jets such as u_x stay as independent boundary symbols.
struct RelForm {
    Form bulk;
    Form boundary;

    friend bool operator==(const RelForm&, const RelForm&) = default;
    [[nodiscard]] bool is_zero() const { return bulk.is_zero() && boundary.is_zero(); }
    // Horizontal relative degree (the bulk degree); -1 for the zero pair.
    [[nodiscard]] int degree() const;
    [[nodiscard]] int vertical_degree() const;

    friend RelForm operator+(const RelForm& a, const RelForm& b) { return {a.bulk + b.bulk, a.boundary + b.boundary}; }
    friend RelForm operator-(const RelForm& a, const RelForm& b) { return {a.bulk - b.bulk, a.boundary - b.boundary}; }
    RelForm operator-() const { return {-bulk, -boundary}; }
};

// j*: drop dx^n, set x^n = 0.
[[nodiscard]] Form pullback_boundary(const Chart& chart, const Form& f);

// (d a, j*a - d b)
[[nodiscard]] RelForm rel_d(const Chart& chart, const RelForm& p);
// (dd a, dd b)
[[nodiscard]] RelForm rel_dd(const Chart& chart, const RelForm& p);
// (a ^ c, (-1)^{|a|}/2 j*a ^ e + 1/2 b ^ j*c) for p = (a, b), q = (c, e)
[[nodiscard]] RelForm rel_wedge(const Chart& chart, const RelForm& p, const RelForm& q);

// Throws NonTangent unless xi^n vanishes on the boundary.
void require_tangent(const Chart& chart, const std::vector<Expr>& xi);
// xi with x^n = 0 substituted, as a vector field on the boundary chart.
[[nodiscard]] std::vector<Expr> boundary_vector(const Chart& chart, const std::vector<Expr>& xi);

// (iota a, -iota b)
[[nodiscard]] RelForm rel_iota(const Chart& chart, const std::vector<Expr>& xi, const RelForm& p);
// (L a, L b) with the boundary Lie derivative taken on the boundary chart
[[nodiscard]] RelForm rel_lie(const Chart& chart, const std::vector<Expr>& xi, const RelForm& p);
// Componentwise field-space contraction and Lie derivative (commuting convention).
[[nodiscard]] RelForm rel_iota_vertical(const Chart& chart, const EvolutionaryField& W, const RelForm& p);
[[nodiscard]] RelForm rel_lie_vertical(const Chart& chart, const EvolutionaryField& W, const RelForm& p);

// Lie derivative of a boundary form along a tangent vector field.
[[nodiscard]] Form lie_boundary(const Chart& chart, const std::vector<Expr>& xi, const Form& f);

} // namespace cpsforge
