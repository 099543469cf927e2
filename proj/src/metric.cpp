#include "cpsforge/metric.hpp"

#include <algorithm>
#include <cmath>

namespace cpsforge {

namespace {

std::optional<std::int64_t> isqrt(std::int64_t v)
{
    if (v < 0) return std::nullopt;
    auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
    for (std::int64_t c = std::max<std::int64_t>(0, r - 2); c <= r + 2; ++c)
        if (c * c == v) return c;
    return std::nullopt;
}

Rational abs(const Rational& q) { return q < Rational(0) ? -q : q; }

} // namespace

std::optional<Rational> rational_sqrt(const Rational& q)
{
    auto n = isqrt(q.num());
    auto d = isqrt(q.den());
    if (!n || !d) return std::nullopt;
    return Rational(*n, *d);
}

Rational sqrt_abs_det(const std::vector<Rational>& g, const std::vector<int>& coords)
{
    Rational det(1);
    for (int i : coords) {
        if (i < 0 || i >= static_cast<int>(g.size()))
            throw Error(ErrorCode::UnsupportedMetric, "metric has fewer entries than the chart dimension");
        if (g[static_cast<std::size_t>(i)].is_zero())
            throw Error(ErrorCode::UnsupportedMetric, "degenerate metric");
        det *= g[static_cast<std::size_t>(i)];
    }
    auto r = rational_sqrt(abs(det));
    if (!r) throw Error(ErrorCode::UnsupportedMetric, "|det g| is not the square of a rational", abs(det).str());
    return *r;
}

Form metric_volume(const std::vector<Rational>& g)
{
    const int n = static_cast<int>(g.size());
    std::vector<int> all;
    for (int i = 0; i < n; ++i) all.push_back(i);
    return Expr(sqrt_abs_det(g, all)) * Form::volume(n);
}

Form boundary_volume(const std::vector<Rational>& g)
{
    const int n = static_cast<int>(g.size());
    std::vector<int> tang;
    for (int i = 0; i + 1 < n; ++i) tang.push_back(i);
    Rational c = sqrt_abs_det(g, tang);
    if (n % 2) c = -c;
    return Expr(c) * Form::dx_word(tang);
}

Form hodge(const std::vector<Rational>& g, const std::vector<int>& coords, const Form& f)
{
    const Rational s = sqrt_abs_det(g, coords);
    Form out;
    for (const auto& [w, c] : f.terms()) {
        std::vector<int> I;
        std::vector<BasisId> vert;
        for (BasisId b : w) {
            if (is_vertical(b))
                vert.push_back(b);
            else
                I.push_back(basis_coord(b));
        }
        Rational factor = s;
        bool inside = true;
        for (int i : I) {
            if (std::find(coords.begin(), coords.end(), i) == coords.end()) inside = false;
            else factor /= g[static_cast<std::size_t>(i)];
        }
        if (!inside)
            throw Error(ErrorCode::DegreeMismatch, "hodge star applied to a form with a direction outside its chart");
        std::vector<int> comp;
        for (int i : coords)
            if (std::find(I.begin(), I.end(), i) == I.end()) comp.push_back(i);
        // sign(I, I^c): dx^I ^ dx^{I^c} = sign * (coordinate volume)
        std::vector<BasisId> full;
        for (int i : I) full.push_back(basis_dx(i));
        for (int i : comp) full.push_back(basis_dx(i));
        const int sign = canonicalize_word(full);
        RawForm raw;
        std::vector<BasisId> word;
        for (int i : comp) word.push_back(basis_dx(i));
        word.insert(word.end(), vert.begin(), vert.end());
        raw.terms.push_back({c * Expr(factor * Rational(sign)), word});
        out += normalize(raw);
    }
    return out;
}

Expr box(const Chart& chart, const std::vector<Rational>& g, const Expr& e)
{
    Expr out;
    for (int i = 0; i < chart.n; ++i)
        out += Expr(Rational(1) / g[static_cast<std::size_t>(i)]) *
               total_derivative(chart, i, total_derivative(chart, i, e));
    return out;
}

Expr normal_derivative(const Chart& chart, const std::vector<Rational>& g, const Expr& e)
{
    const int tr = chart.transversal();
    auto s = rational_sqrt(abs(g[static_cast<std::size_t>(tr)]));
    if (!s) throw Error(ErrorCode::UnsupportedMetric, "|g_nn| is not the square of a rational");
    return Expr(-(Rational(1) / *s)) * total_derivative(chart, tr, e);
}

} // namespace cpsforge
