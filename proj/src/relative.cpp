#include "cpsforge/relative.hpp"

#include <algorithm>

namespace cpsforge {

int RelForm::degree() const
{
    if (!bulk.is_zero()) return bulk.horizontal_degree();
    if (!boundary.is_zero()) return boundary.horizontal_degree() + 1;
    return -1;
}

int RelForm::vertical_degree() const
{
    if (!bulk.is_zero()) return bulk.vertical_degree();
    if (!boundary.is_zero()) return boundary.vertical_degree();
    return -1;
}

Form pullback_boundary(const Chart& chart, const Form& f) { return restrict_to_hyperplane(f, chart.transversal(), Expr(0)); }

RelForm rel_d(const Chart& chart, const RelForm& p)
{
    return {d_H(chart, p.bulk), pullback_boundary(chart, p.bulk) - d_H_boundary(chart, p.boundary)};
}

RelForm rel_dd(const Chart& chart, const RelForm& p) { return {dd(chart, p.bulk), dd(chart, p.boundary)}; }

RelForm rel_wedge(const Chart& chart, const RelForm& p, const RelForm& q)
{
    RelForm out;
    out.bulk = wedge(p.bulk, q.bulk);
    const Rational half(1, 2);
    const int a = std::max(p.degree(), 0);
    Form left = wedge(pullback_boundary(chart, p.bulk), q.boundary);
    if (a % 2) left = -left;
    out.boundary = Expr(half) * (left + wedge(p.boundary, pullback_boundary(chart, q.bulk)));
    return out;
}

void require_tangent(const Chart& chart, const std::vector<Expr>& xi)
{
    if (static_cast<int>(xi.size()) != chart.n)
        throw Error(ErrorCode::ComponentCount, "vector field needs " + std::to_string(chart.n) + " components");
    const Expr normal = xi.back().substitute({{intern_coord(chart.transversal()), Expr(0)}});
    if (!normal.is_zero())
        throw Error(ErrorCode::NonTangent, "vector field is not tangent to the boundary", normal.str(chart.names()));
}

std::vector<Expr> boundary_vector(const Chart& chart, const std::vector<Expr>& xi)
{
    const std::map<AtomId, Expr> rule{{intern_coord(chart.transversal()), Expr(0)}};
    std::vector<Expr> out;
    for (const Expr& c : xi) out.push_back(c.substitute(rule));
    return out;
}

Form lie_boundary(const Chart& chart, const std::vector<Expr>& xi, const Form& f)
{
    const std::vector<Expr> xb = boundary_vector(chart, xi);
    return iota_horizontal(chart, xb, d_H_boundary(chart, f)) + d_H_boundary(chart, iota_horizontal(chart, xb, f));
}

RelForm rel_iota(const Chart& chart, const std::vector<Expr>& xi, const RelForm& p)
{
    require_tangent(chart, xi);
    return {iota_horizontal(chart, xi, p.bulk), -iota_horizontal(chart, boundary_vector(chart, xi), p.boundary)};
}

RelForm rel_lie(const Chart& chart, const std::vector<Expr>& xi, const RelForm& p)
{
    require_tangent(chart, xi);
    return {lie_horizontal(chart, xi, p.bulk), lie_boundary(chart, xi, p.boundary)};
}

RelForm rel_iota_vertical(const Chart& chart, const EvolutionaryField& W, const RelForm& p)
{
    return {ii_vertical(chart, W, p.bulk), pullback_boundary(chart, ii_vertical(chart, W, p.boundary))};
}

RelForm rel_lie_vertical(const Chart& chart, const EvolutionaryField& W, const RelForm& p)
{
    return {lie_vertical(chart, W, p.bulk), pullback_boundary(chart, lie_vertical(chart, W, p.boundary))};
}

} // namespace cpsforge
