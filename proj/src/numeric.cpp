#include "cpsforge/numeric.hpp"

#include "cpsforge/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cpsforge::numeric {

// ---------------------------------------------------------------------------
// Grid

double Grid::h(int axis) const
{
    const auto a = static_cast<std::size_t>(axis);
    return (hi[a] - lo[a]) / cells[a];
}

int Grid::points(int axis) const
{
    const auto a = static_cast<std::size_t>(axis);
    return periodic[a] ? cells[a] : cells[a] + 1;
}

double Grid::coord(int axis, int k) const { return lo[static_cast<std::size_t>(axis)] + k * h(axis); }

std::size_t Grid::size() const
{
    std::size_t s = 1;
    for (int a = 0; a < dim(); ++a) s *= static_cast<std::size_t>(points(a));
    return s;
}

std::size_t Grid::flat(const std::vector<int>& node) const
{
    std::size_t idx = 0;
    for (int a = 0; a < dim(); ++a) idx = idx * static_cast<std::size_t>(points(a)) + static_cast<std::size_t>(node[static_cast<std::size_t>(a)]);
    return idx;
}

int Grid::node_at(int axis, double v) const
{
    const double hh = h(axis);
    const double k = (v - lo[static_cast<std::size_t>(axis)]) / hh;
    const double r = std::round(k);
    if (r < 0 || r > cells[static_cast<std::size_t>(axis)] || std::abs(k - r) > 1e-8)
        throw Error(ErrorCode::SliceOutsideGrid, "coordinate value is not a grid node", std::to_string(v));
    return static_cast<int>(r);
}

void Grid::validate() const
{
    const std::size_t n = cells.size();
    if (n < 1 || n > 2) throw Error(ErrorCode::ShapeMismatch, "grids have dimension 1 or 2");
    if (lo.size() != n || hi.size() != n || periodic.size() != n || lo_tag.size() != n || hi_tag.size() != n)
        throw Error(ErrorCode::ShapeMismatch, "grid axis data has inconsistent lengths");
    for (std::size_t a = 0; a < n; ++a) {
        if (cells[a] < 2 || !(hi[a] > lo[a])) throw Error(ErrorCode::ShapeMismatch, "grid spacing must be positive");
        if (periodic[a] && (lo_tag[a] != FaceTag::None || hi_tag[a] != FaceTag::None))
            throw Error(ErrorCode::ShapeMismatch, "a periodic axis has no faces");
    }
}

Grid Grid::interval(double a, double b, int cells)
{
    Grid g{{a}, {b}, {cells}, {false}, {FaceTag::Lateral}, {FaceTag::Lateral}};
    g.validate();
    return g;
}

Grid Grid::spacetime(double t0, double t1, int nt, double x0, double x1, int nx, bool lateral, bool periodic_x)
{
    Grid g{{t0, x0},
           {t1, x1},
           {nt, nx},
           {false, periodic_x},
           {FaceTag::Lid, lateral ? FaceTag::Lateral : FaceTag::None},
           {FaceTag::Lid, FaceTag::None}};
    g.validate();
    return g;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// Coefficients of (1 - s^2)^8 in powers of s.
const std::vector<double>& bump_coefficients()
{
    static const std::vector<double> c = [] {
        std::vector<double> out(17, 0.0);
        double binom = 1;
        for (int k = 0; k <= 8; ++k) {
            out[static_cast<std::size_t>(2 * k)] = (k % 2 ? -1 : 1) * binom;
            binom = binom * (8 - k) / (k + 1);
        }
        return out;
    }();
    return c;
}

double bump_derivative(int order, double s)
{
    if (std::abs(s) >= 1) return 0;
    std::vector<double> c = bump_coefficients();
    for (int d = 0; d < order; ++d) {
        std::vector<double> next(c.size() > 1 ? c.size() - 1 : 1, 0.0);
        for (std::size_t k = 1; k < c.size(); ++k) next[k - 1] = c[k] * static_cast<double>(k);
        c = std::move(next);
    }
    double v = 0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * s + c[k];
    return v;
}

double builtin(const std::string& name, int order, double a)
{
    constexpr double half_pi = std::numbers::pi / 2;
    if (name == "sin") return std::sin(a + order * half_pi);
    if (name == "cos") return std::cos(a + order * half_pi);
    if (name == "exp") return std::exp(a);
    if (name == "bump") return bump_derivative(order, a);
    throw Error(ErrorCode::Numeric, "no numeric realization for function " + name, name);
}

double to_double(const Rational& r) { return static_cast<double>(r.num()) / static_cast<double>(r.den()); }

} // namespace

NumericContext NumericContext::from_model(const Model& model)
{
    NumericContext ctx;
    ctx.functions = model.functions;
    return ctx;
}

Evaluator::Evaluator(const NumericContext& ctx, const JetSource* fields) : ctx_(ctx), fields_(fields) {}

double Evaluator::operator()(const Expr& e, const Point& p) const
{
    std::map<AtomId, double> memo;
    double total = 0;
    for (const auto& [m, c] : e.terms()) {
        double term = to_double(c);
        for (const auto& [a, q] : m) {
            auto it = memo.find(a);
            if (it == memo.end()) it = memo.emplace(a, atom_value(a, p)).first;
            term *= std::pow(it->second, q);
        }
        total += term;
    }
    return total;
}

double Evaluator::atom_value(AtomId a, const Point& p) const
{
    const Atom& at = atom(a);
    switch (at.kind) {
    case AtomKind::Coord:
        if (at.coord < 0 || at.coord >= static_cast<int>(p.x.size()))
            throw Error(ErrorCode::ShapeMismatch, "coordinate outside the grid dimension");
        return p.x[static_cast<std::size_t>(at.coord)];
    case AtomKind::Param: {
        if (locals_) {
            auto l = locals_->find(at.name);
            if (l != locals_->end()) return l->second;
        }
        auto it = ctx_.constants.find(at.name);
        if (it == ctx_.constants.end()) throw Error(ErrorCode::Numeric, "no numeric value for " + at.name, at.name);
        return it->second;
    }
    case AtomKind::Jet:
        if (!fields_) throw Error(ErrorCode::Numeric, "jet variable without a field source", at.name);
        return fields_->jet(at.name, at.J, p);
    case AtomKind::Func:
        return func_value(at, p);
    }
    return 0;
}

double Evaluator::func_value(const Atom& f, const Point& p) const
{
    auto decl = ctx_.functions.find(f.name);
    if (decl == ctx_.functions.end() || !decl->second.realization) {
        if (f.args.size() != 1) throw Error(ErrorCode::Numeric, "no numeric realization for function " + f.name, f.name);
        return builtin(f.name, f.derivs.empty() ? 0 : f.derivs[0], (*this)(f.args[0], p));
    }
    const FunctionDecl& fd = decl->second;
    if (fd.params.size() != f.args.size())
        throw Error(ErrorCode::Numeric, "function applied with the wrong number of arguments", f.name);
    const auto key = std::make_pair(f.name, f.derivs);
    auto it = derivative_cache_.find(key);
    if (it == derivative_cache_.end()) {
        Expr r = *fd.realization;
        for (std::size_t k = 0; k < f.derivs.size(); ++k)
            for (int d = 0; d < f.derivs[k]; ++d) r = r.diff(intern_param(fd.params[k]));
        it = derivative_cache_.emplace(key, std::move(r)).first;
    }
    std::map<std::string, double> args;
    for (std::size_t k = 0; k < fd.params.size(); ++k) args[fd.params[k]] = (*this)(f.args[k], p);
    Evaluator inner(ctx_, fields_);
    inner.locals_ = &args;
    return inner(it->second, p);
}

// ---------------------------------------------------------------------------
// Field sources

AnalyticField::AnalyticField(std::map<std::string, Expr> components, NumericContext ctx)
    : components_(std::move(components)), ctx_(std::move(ctx))
{
}

double AnalyticField::jet(const std::string& label, const MultiIndex& J, const Point& p) const
{
    const auto key = std::make_pair(label, J);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        auto c = components_.find(label);
        if (c == components_.end()) throw Error(ErrorCode::UnknownSymbol, "field source has no component " + label, label);
        Expr e = c->second;
        for (Index i : J.indices()) e = e.diff(intern_coord(i));
        it = cache_.emplace(key, std::move(e)).first;
    }
    return Evaluator(ctx_, nullptr)(it->second, p);
}

double SumField::jet(const std::string& label, const MultiIndex& J, const Point& p) const
{
    double v = 0;
    for (const auto& [c, src] : parts_)
        if (c != 0) v += c * src->jet(label, J, p);
    return v;
}

GridField::GridField(Grid grid, std::map<std::string, std::vector<double>> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    grid_.validate();
    for (const auto& [l, v] : values_)
        if (v.size() != grid_.size()) throw Error(ErrorCode::ShapeMismatch, "field values do not match the grid", l);
}

const std::vector<double>& GridField::values(const std::string& label) const
{
    auto it = values_.find(label);
    if (it == values_.end()) throw Error(ErrorCode::UnknownSymbol, "grid field has no component " + label, label);
    return it->second;
}

namespace {

// Derivative of order 1 or 2 along one axis, second-order accurate.
std::vector<double> axis_derivative(const Grid& g, const std::vector<double>& f, int axis, int order)
{
    std::vector<double> out(f.size(), 0.0);
    const int n = g.points(axis);
    const bool per = g.periodic[static_cast<std::size_t>(axis)];
    const double h = g.h(axis);
    std::vector<int> node(static_cast<std::size_t>(g.dim()), 0);
    auto at = [&](int k) {
        node[static_cast<std::size_t>(axis)] = per ? ((k % n) + n) % n : k;
        return f[g.flat(node)];
    };
    std::function<void(int)> loop = [&](int a) {
        if (a == g.dim()) {
            const int k = node[static_cast<std::size_t>(axis)];
            double v;
            if (order == 1) {
                if (per || (k > 0 && k < n - 1))
                    v = (at(k + 1) - at(k - 1)) / (2 * h);
                else if (k == 0)
                    v = (-3 * at(0) + 4 * at(1) - at(2)) / (2 * h);
                else
                    v = (3 * at(n - 1) - 4 * at(n - 2) + at(n - 3)) / (2 * h);
            } else {
                if (per || (k > 0 && k < n - 1))
                    v = (at(k + 1) - 2 * at(k) + at(k - 1)) / (h * h);
                else if (k == 0)
                    v = (2 * at(0) - 5 * at(1) + 4 * at(2) - at(3)) / (h * h);
                else
                    v = (2 * at(n - 1) - 5 * at(n - 2) + 4 * at(n - 3) - at(n - 4)) / (h * h);
            }
            node[static_cast<std::size_t>(axis)] = k;
            out[g.flat(node)] = v;
            return;
        }
        for (int k = 0; k < g.points(a); ++k) {
            node[static_cast<std::size_t>(a)] = k;
            loop(a + 1);
        }
    };
    loop(0);
    return out;
}

} // namespace

const std::vector<double>& GridField::derivative(const std::string& label, const MultiIndex& J) const
{
    if (J.empty()) return values(label);
    const auto key = std::make_pair(label, J);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<double> f = values(label);
    for (int a = 0; a < grid_.dim(); ++a) {
        int c = J.count(a);
        while (c > 0) {
            const int step = std::min(c, 2);
            f = axis_derivative(grid_, f, a, step);
            c -= step;
        }
    }
    for (Index i : J.indices())
        if (i >= grid_.dim()) throw Error(ErrorCode::ShapeMismatch, "jet index outside the grid dimension");
    return cache_.emplace(key, std::move(f)).first->second;
}

double GridField::jet(const std::string& label, const MultiIndex& J, const Point& p) const
{
    if (p.node.size() != static_cast<std::size_t>(grid_.dim()))
        throw Error(ErrorCode::ShapeMismatch, "grid fields are only defined at grid nodes", label);
    return derivative(label, J)[grid_.flat(p.node)];
}

// ---------------------------------------------------------------------------
// Quadrature

std::vector<double> quadrature_weights(int cells, double h, bool periodic, Quadrature q)
{
    if (periodic) return std::vector<double>(static_cast<std::size_t>(cells), h);
    std::vector<double> w(static_cast<std::size_t>(cells) + 1, 0.0);
    if (q == Quadrature::Auto) q = cells % 4 == 0 ? Quadrature::Boole : Quadrature::Trapezoid;
    if (q == Quadrature::Boole) {
        if (cells % 4 != 0) throw Error(ErrorCode::ShapeMismatch, "Boole's rule needs a multiple of four cells");
        const double s = 2 * h / 45;
        const double pattern[5] = {7, 32, 12, 32, 7};
        for (int b = 0; b < cells; b += 4)
            for (int k = 0; k < 5; ++k) w[static_cast<std::size_t>(b + k)] += s * pattern[k];
        return w;
    }
    for (int k = 0; k <= cells; ++k) w[static_cast<std::size_t>(k)] = (k == 0 || k == cells) ? h / 2 : h;
    return w;
}

namespace {

Point make_point(const Grid& g, const std::vector<int>& node)
{
    Point p;
    p.node = node;
    for (int a = 0; a < g.dim(); ++a) p.x.push_back(g.coord(a, node[static_cast<std::size_t>(a)]));
    return p;
}

// Sum over the free axes with the rule's weights, other axes fixed at `node`.
double quad(const Grid& g, const std::vector<int>& free_axes, std::vector<int> node, Quadrature q,
            const std::function<double(const Point&)>& f)
{
    std::vector<std::vector<double>> weights;
    for (int a : free_axes)
        weights.push_back(quadrature_weights(g.cells[static_cast<std::size_t>(a)], g.h(a), g.periodic[static_cast<std::size_t>(a)], q));
    double total = 0;
    std::function<void(std::size_t, double)> loop = [&](std::size_t k, double w) {
        if (k == free_axes.size()) {
            total += w * f(make_point(g, node));
            return;
        }
        const auto& wk = weights[k];
        for (std::size_t j = 0; j < wk.size(); ++j) {
            node[static_cast<std::size_t>(free_axes[k])] = static_cast<int>(j);
            loop(k + 1, w * wk[j]);
        }
    };
    loop(0, 1.0);
    return total;
}

// Value of the vertical factors of a word on the tangents: det[theta_k(X_l)].
double vertical_value(const Word& w, std::size_t first_vertical, const std::vector<const JetSource*>& tangents,
                      const Point& p)
{
    const std::size_t k = w.size() - first_vertical;
    if (k != tangents.size()) throw Error(ErrorCode::DegreeMismatch, "vertical degree does not match the number of tangents");
    if (k == 0) return 1;
    std::vector<std::vector<double>> m(k, std::vector<double>(k));
    for (std::size_t r = 0; r < k; ++r) {
        const Atom& a = atom(basis_jet(w[first_vertical + r]));
        for (std::size_t c = 0; c < k; ++c) m[r][c] = tangents[c]->jet(a.name, a.J, p);
    }
    if (k == 1) return m[0][0];
    if (k == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    throw Error(ErrorCode::DegreeMismatch, "at most two tangents are supported");
}

// Density of f against the horizontal word `hw` at p.
double density(const Form& f, const std::vector<int>& hw, const Evaluator& ev,
               const std::vector<const JetSource*>& tangents, const Point& p)
{
    double total = 0;
    for (const auto& [w, c] : f.terms()) {
        std::size_t nh = 0;
        while (nh < w.size() && !is_vertical(w[nh])) ++nh;
        if (nh != hw.size()) continue;
        bool match = true;
        for (std::size_t k = 0; k < nh; ++k)
            if (basis_coord(w[k]) != hw[k]) match = false;
        if (!match) continue;
        const double vv = vertical_value(w, nh, tangents, p);
        if (vv != 0) total += ev(c, p) * vv;
    }
    return total;
}

std::vector<int> axes(int from, int to)
{
    std::vector<int> out;
    for (int i = from; i < to; ++i) out.push_back(i);
    return out;
}

void check_horizontal(const Form& f, int degree, const char* what)
{
    if (!f.is_zero() && f.horizontal_degree() != degree) throw Error(ErrorCode::DegreeMismatch, what);
}

} // namespace

double integrate_bulk(const Form& f, const Grid& grid, const Evaluator& ev, Quadrature q,
                      const std::vector<const JetSource*>& tangents)
{
    if (f.is_zero()) return 0;
    check_horizontal(f, grid.dim(), "bulk integrand must have top horizontal degree");
    const std::vector<int> all = axes(0, grid.dim());
    return quad(grid, all, std::vector<int>(static_cast<std::size_t>(grid.dim()), 0), q,
                [&](const Point& p) { return density(f, all, ev, tangents, p); });
}

double integrate_lateral(const Form& f, const Grid& grid, const Evaluator& ev, Quadrature q,
                         const std::vector<const JetSource*>& tangents)
{
    if (f.is_zero()) return 0;
    const int n = grid.dim();
    check_horizontal(f, n - 1, "lateral integrand must have degree n-1");
    const int ax = n - 1;
    const std::vector<int> tang = axes(0, n - 1);
    double total = 0;
    for (int side = 0; side < 2; ++side) {
        const FaceTag tag = side == 0 ? grid.lo_tag[static_cast<std::size_t>(ax)] : grid.hi_tag[static_cast<std::size_t>(ax)];
        if (tag != FaceTag::Lateral) continue;
        // Stokes orientation of {x^n = const} with the outward normal.
        const double sign = (side == 0) == (n % 2 == 0) ? 1.0 : -1.0;
        std::vector<int> node(static_cast<std::size_t>(n), 0);
        node[static_cast<std::size_t>(ax)] = side == 0 ? 0 : grid.cells[static_cast<std::size_t>(ax)];
        total += sign * quad(grid, tang, node, q, [&](const Point& p) { return density(f, tang, ev, tangents, p); });
    }
    return total;
}

double rel_integrate_numeric(const RelForm& p, const Grid& grid, const NumericContext& ctx, const JetSource* fields,
                             Quadrature q)
{
    grid.validate();
    const Evaluator ev(ctx, fields);
    return integrate_bulk(p.bulk, grid, ev, q) - integrate_lateral(p.boundary, grid, ev, q);
}

double action_value(const LagrangianPair& lp, const Grid& grid, const NumericContext& ctx, const JetSource& phi,
                    Quadrature q)
{
    return rel_integrate_numeric({lp.L, lp.ell}, grid, ctx, &phi, q);
}

FdResult fd_variation_check(const LagrangianPair& lp, const VariationDecomposition& v, const Grid& grid,
                            const NumericContext& ctx, const JetSource& phi, const JetSource& perturbation, double eps,
                            bool include_boundary, Quadrature q)
{
    FdResult r;
    struct Borrowed : JetSource {
        const JetSource& s;
        explicit Borrowed(const JetSource& src) : s(src) {}
        double jet(const std::string& l, const MultiIndex& J, const Point& p) const override { return s.jet(l, J, p); }
    };
    const auto base = std::make_shared<Borrowed>(phi);
    const auto dir = std::make_shared<Borrowed>(perturbation);
    const SumField plus({{1.0, base}, {eps, dir}});
    const SumField minus({{1.0, base}, {-eps, dir}});
    r.fd = (action_value(lp, grid, ctx, plus, q) - action_value(lp, grid, ctx, minus, q)) / (2 * eps);

    const Evaluator ev(ctx, &phi);
    Form E;
    for (const auto& [label, e] : v.E) E += wedge(e, Form::theta(label));
    r.bulk_pairing = integrate_bulk(E, grid, ev, q, {&perturbation});
    if (include_boundary) {
        Form b;
        for (const auto& [label, f] : v.b_bar) b += wedge(f, Form::theta(label));
        r.boundary_pairing = integrate_lateral(b, grid, ev, q, {&perturbation});
    }
    r.residual = std::abs(r.fd - (r.bulk_pairing - r.boundary_pairing));
    return r;
}

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& residual)
{
    if (eps.size() != residual.size() || eps.size() < 2) throw Error(ErrorCode::ShapeMismatch, "slope needs two or more samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(eps.size());
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const double x = std::log(eps[k]);
        const double y = std::log(std::max(residual[k], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// The slice {t = t_slice} as a grid of its own (axes 1..n-1), with the
// corresponding face tags; node[0] is fixed at the slice.
struct Slice {
    Grid grid;
    int time_node = -1;
};

Slice make_slice(const Grid& g, double t)
{
    if (g.dim() != 2) throw Error(ErrorCode::ShapeMismatch, "slices are taken on two-dimensional space-time grids");
    if (t < g.lo[0] - 1e-12 || t > g.hi[0] + 1e-12) throw Error(ErrorCode::SliceOutsideGrid, "slice outside the grid", std::to_string(t));
    Slice s;
    s.grid = Grid{{g.lo[1]}, {g.hi[1]}, {g.cells[1]}, {g.periodic[1]}, {g.lo_tag[1]}, {g.hi_tag[1]}};
    const double k = (t - g.lo[0]) / g.h(0);
    if (std::abs(k - std::round(k)) < 1e-8) s.time_node = static_cast<int>(std::round(k));
    return s;
}

// Adds the time coordinate (and node) of the slice to a point of the slice grid.
class SliceLift : public JetSource {
public:
    SliceLift(const JetSource& src, double t, int node) : src_(src), t_(t), node_(node) {}
    double jet(const std::string& l, const MultiIndex& J, const Point& p) const override { return src_.jet(l, J, lift(p)); }
    [[nodiscard]] Point lift(const Point& p) const
    {
        Point q;
        q.x = {t_, p.x[0]};
        if (node_ >= 0 && !p.node.empty()) q.node = {node_, p.node[0]};
        return q;
    }

private:
    const JetSource& src_;
    double t_;
    int node_;
};

// Coordinate-aware evaluator for slice points: Coord 0 is the slice time.
double slice_integral(const Form& bulk, const Form& corner, const Slice& s, double t, const NumericContext& ctx,
                      const JetSource& phi, const std::vector<const JetSource*>& tangents, Quadrature q)
{
    const SliceLift lphi(phi, t, s.time_node);
    std::vector<SliceLift> lt;
    lt.reserve(tangents.size());
    for (const JetSource* tg : tangents) lt.emplace_back(*tg, t, s.time_node);
    std::vector<const JetSource*> tp;
    for (const auto& x : lt) tp.push_back(&x);
    const Evaluator ev(ctx, &phi);

    auto dens = [&](const Form& f, const std::vector<int>& hw, const Point& p) {
        double total = 0;
        const Point full = lphi.lift(p);
        for (const auto& [w, c] : f.terms()) {
            std::size_t nh = 0;
            while (nh < w.size() && !is_vertical(w[nh])) ++nh;
            if (nh != hw.size()) continue;
            bool match = true;
            for (std::size_t k = 0; k < nh; ++k)
                if (basis_coord(w[k]) != hw[k]) match = false;
            if (!match) continue;
            const double vv = vertical_value(w, nh, tp, p);
            if (vv != 0) total += ev(c, full) * vv;
        }
        return total;
    };
    double total = 0;
    if (!bulk.is_zero()) {
        check_horizontal(bulk, 1, "slice integrand must have degree n-1");
        total += quad(s.grid, {0}, {0}, q, [&](const Point& p) { return dens(bulk, {1}, p); });
    }
    if (!corner.is_zero()) {
        check_horizontal(corner, 0, "corner integrand must have degree n-2");
        // Points of dSigma = {x = x0} carry the orientation of the boundary of Sigma.
        if (s.grid.lo_tag[0] == FaceTag::Lateral) total -= -1.0 * dens(corner, {}, make_point(s.grid, {0}));
        if (s.grid.hi_tag[0] == FaceTag::Lateral) total -= dens(corner, {}, make_point(s.grid, {s.grid.cells[0]}));
    }
    return total;
}

} // namespace

double symplectic_eval(const PresymplecticCurrent& omega, const Grid& grid, const NumericContext& ctx,
                       const JetSource& phi, const JetSource& d1, const JetSource& d2, double t_slice, Quadrature q)
{
    const Slice s = make_slice(grid, t_slice);
    return slice_integral(omega.slice_bulk, omega.slice_boundary, s, t_slice, ctx, phi, {&d1, &d2}, q);
}

double canonical_pairing(const std::vector<Rational>& metric, const std::string& label, const Grid& grid,
                         const JetSource& d1, const JetSource& d2, double t_slice, Quadrature q)
{
    const Slice s = make_slice(grid, t_slice);
    if (metric.size() != 2) throw Error(ErrorCode::ShapeMismatch, "canonical pairing needs a two-dimensional metric");
    const double lapse = std::sqrt(std::abs(to_double(metric[0])));
    const double sqrt_gamma = std::sqrt(std::abs(to_double(metric[1])));
    const MultiIndex none;
    const MultiIndex dt{0};
    const SliceLift l1(d1, t_slice, s.time_node);
    const SliceLift l2(d2, t_slice, s.time_node);
    return quad(s.grid, {0}, {0}, q, [&](const Point& p) {
        const double p1 = l1.jet(label, dt, p) / lapse;
        const double p2 = l2.jet(label, dt, p) / lapse;
        return (l1.jet(label, none, p) * p2 - l2.jet(label, none, p) * p1) * sqrt_gamma;
    });
}

double charge(const NoetherData& nd, const Grid& grid, const NumericContext& ctx, const JetSource& phi, double t_slice,
              Quadrature q)
{
    const Slice s = make_slice(grid, t_slice);
    return slice_integral(nd.slice_current, nd.slice_boundary_current, s, t_slice, ctx, phi, {}, q);
}

FluxReport flux_check(const NoetherData& nd, const Grid& grid, const NumericContext& ctx, const JetSource& phi,
                      double t1, double t2, Quadrature q)
{
    FluxReport r;
    r.q1 = charge(nd, grid, ctx, phi, t1, q);
    r.q2 = charge(nd, grid, ctx, phi, t2, q);
    r.delta_q = r.q2 - r.q1;
    // The slab between the slices, with the spacing of the original grid.
    Grid slab = grid;
    const int k1 = grid.node_at(0, t1);
    const int k2 = grid.node_at(0, t2);
    slab.lo[0] = grid.coord(0, std::min(k1, k2));
    slab.hi[0] = grid.coord(0, std::max(k1, k2));
    slab.cells[0] = std::abs(k2 - k1);
    if (slab.cells[0] == 0) return r;
    struct Shifted : JetSource {
        const JetSource& s;
        int offset;
        Shifted(const JetSource& src, int off) : s(src), offset(off) {}
        double jet(const std::string& l, const MultiIndex& J, const Point& p) const override
        {
            if (p.node.empty()) return s.jet(l, J, p);
            Point qn = p;
            qn.node[0] += offset;
            return s.jet(l, J, qn);
        }
    };
    const Shifted shifted(phi, std::min(k1, k2));
    r.rhs = rel_integrate_numeric(nd.lie_tilde, slab, ctx, &shifted, q) * (t2 >= t1 ? 1 : -1);
    r.residual = std::abs(r.delta_q - r.rhs);
    return r;
}

// ---------------------------------------------------------------------------
// Leapfrog

namespace {

struct ScalarEquation {
    std::string label;
    Expr rest;         // e with u_tt = 0
    double a = 1;      // coefficient of u_tt
    double c2 = 1;     // -(coefficient of u_xx) / a
    Expr b_rest;       // lateral equation with u_x = 0
    Expr b_slope;      // its coefficient of u_x
    bool dirichlet = false;
    bool has_boundary = false;
};

Rational constant_coefficient(const Expr& e, AtomId v, const char* what)
{
    const Expr d = e.diff(v);
    if (!d.is_constant() || !d.diff(v).is_zero()) throw Error(ErrorCode::Numeric, what, e.str());
    return d.constant_value();
}

ScalarEquation prepare(const Expr& e, const std::string& label, const Expr& b, bool dirichlet, bool has_boundary)
{
    ScalarEquation s;
    s.label = label;
    const AtomId utt = intern_jet(label, MultiIndex{0, 0});
    const AtomId uxx = intern_jet(label, MultiIndex{1, 1});
    const AtomId ux = intern_jet(label, MultiIndex{1});
    for (AtomId a : e.atoms()) {
        const Atom& at = atom(a);
        if (at.kind == AtomKind::Jet && at.name == label && at.J.contains(0) && a != utt)
            throw Error(ErrorCode::Numeric, "the explicit scheme needs an equation free of u_t and mixed time derivatives", e.str());
    }
    const Rational a = constant_coefficient(e, utt, "equation must be linear in u_tt with constant coefficient");
    if (a.is_zero()) throw Error(ErrorCode::Numeric, "equation has no u_tt term", e.str());
    s.a = to_double(a);
    s.rest = e.substitute({{utt, Expr()}});
    const Expr dxx = e.diff(uxx);
    s.c2 = dxx.is_constant() ? -to_double(dxx.constant_value()) / s.a : 1.0;
    s.dirichlet = dirichlet;
    s.has_boundary = has_boundary;
    if (has_boundary && !dirichlet) {
        for (AtomId x : b.atoms()) {
            const Atom& at = atom(x);
            if (at.kind == AtomKind::Jet && at.name == label && (at.J.contains(0) || at.J.order() > 1))
                throw Error(ErrorCode::Numeric, "lateral equation must involve u and u_x only", b.str());
        }
        s.b_slope = b.diff(ux);
        if (s.b_slope.diff(ux) != Expr()) throw Error(ErrorCode::Numeric, "lateral equation must be linear in u_x", b.str());
        s.b_rest = b.substitute({{ux, Expr()}});
    }
    return s;
}

// Jets of the unknown on the current time level; everything else from `other`.
class LevelSource : public JetSource {
public:
    LevelSource(const std::string& label, const JetSource* other) : label_(label), other_(other) {}
    std::vector<double> u, ux, uxx;
    double jet(const std::string& l, const MultiIndex& J, const Point& p) const override
    {
        if (l == label_) {
            const std::size_t i = static_cast<std::size_t>(p.node[1]);
            if (J.empty()) return u[i];
            if (J == MultiIndex{1}) return ux[i];
            if (J == MultiIndex{1, 1}) return uxx[i];
            throw Error(ErrorCode::Numeric, "jet not available on a single time level", l);
        }
        if (!other_) throw Error(ErrorCode::UnknownSymbol, "no source for " + l, l);
        return other_->jet(l, J, p);
    }

private:
    std::string label_;
    const JetSource* other_;
};

GridField leapfrog(const ScalarEquation& eq, const Grid& grid, const NumericContext& ctx, const JetSource* background,
                   const JetSource& initial, const std::string& initial_label)
{
    grid.validate();
    if (grid.dim() != 2) throw Error(ErrorCode::ShapeMismatch, "the wave solver runs on (t, x) grids");
    const bool per = grid.periodic[1];
    if (!per && !eq.has_boundary)
        throw Error(ErrorCode::ShapeMismatch, "a chart without boundary needs a periodic x axis");
    const double dt = grid.h(0);
    const double hx = grid.h(1);
    if (eq.c2 < 0) throw Error(ErrorCode::Numeric, "equation is not hyperbolic");
    if (std::sqrt(eq.c2) * dt > hx * (1 + 1e-12))
        throw Error(ErrorCode::CflViolation, "time step violates the CFL condition",
                    "dt=" + std::to_string(dt) + " h=" + std::to_string(hx));
    const int nt = grid.points(0);
    const int nx = grid.points(1);
    LevelSource level(eq.label, background);
    const Evaluator ev(ctx, &level);

    auto point = [&](int k, int i) { return make_point(grid, {k, i}); };

    // Fills u_x and u_xx on level k from level.u, using ghost values at faces.
    auto spatial = [&](int k) {
        const auto n = static_cast<std::size_t>(nx);
        level.ux.assign(n, 0.0);
        level.uxx.assign(n, 0.0);
        std::vector<double>& u = level.u;
        auto interior = [&](std::size_t i, double left, double right) {
            level.ux[i] = (right - left) / (2 * hx);
            level.uxx[i] = (right - 2 * u[i] + left) / (hx * hx);
        };
        if (per) {
            for (std::size_t i = 0; i < n; ++i) interior(i, u[(i + n - 1) % n], u[(i + 1) % n]);
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) interior(i, u[i - 1], u[i + 1]);
        if (eq.dirichlet) return;
        // Lateral equation b = slope * u_x + rest = 0; the far face mirrors it.
        for (int side = 0; side < 2; ++side) {
            const std::size_t i = side == 0 ? 0 : n - 1;
            level.ux[i] = 0;
            const Point p = point(k, static_cast<int>(i));
            const double slope = ev(eq.b_slope, p);
            const double rest = ev(eq.b_rest, p);
            if (slope == 0) throw Error(ErrorCode::Numeric, "lateral equation does not determine u_x");
            const double g = side == 0 ? -rest / slope : rest / slope;
            const double ghost = side == 0 ? u[1] - 2 * hx * g : u[n - 2] + 2 * hx * g;
            level.ux[i] = g;
            level.uxx[i] = side == 0 ? (u[1] - 2 * u[i] + ghost) / (hx * hx) : (ghost - 2 * u[i] + u[n - 2]) / (hx * hx);
        }
    };
    auto accel = [&](int k) {
        spatial(k);
        std::vector<double> acc(static_cast<std::size_t>(nx), 0.0);
        for (int i = 0; i < nx; ++i) acc[static_cast<std::size_t>(i)] = -ev(eq.rest, point(k, i)) / eq.a;
        return acc;
    };
    auto pin = [&](std::vector<double>& u) {
        if (eq.dirichlet && !per) u.front() = u.back() = 0;
    };

    std::vector<double> out(grid.size(), 0.0);
    std::vector<double> prev(static_cast<std::size_t>(nx)), cur(static_cast<std::size_t>(nx));
    std::vector<double> vel(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) {
        const Point p = point(0, i);
        prev[static_cast<std::size_t>(i)] = initial.jet(initial_label, {}, p);
        vel[static_cast<std::size_t>(i)] = initial.jet(initial_label, MultiIndex{0}, p);
    }
    pin(prev);
    level.u = prev;
    const std::vector<double> a0 = accel(0);
    for (int i = 0; i < nx; ++i) {
        const auto s = static_cast<std::size_t>(i);
        cur[s] = prev[s] + dt * vel[s] + 0.5 * dt * dt * a0[s];
    }
    pin(cur);
    std::copy(prev.begin(), prev.end(), out.begin());
    if (nt > 1) std::copy(cur.begin(), cur.end(), out.begin() + nx);
    for (int k = 1; k + 1 < nt; ++k) {
        level.u = cur;
        const std::vector<double> acc = accel(k);
        std::vector<double> next(static_cast<std::size_t>(nx));
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = 2 * cur[i] - prev[i] + dt * dt * acc[i];
        pin(next);
        prev = std::move(cur);
        cur = std::move(next);
        std::copy(cur.begin(), cur.end(), out.begin() + static_cast<std::ptrdiff_t>(k + 1) * nx);
    }
    return GridField(grid, {{eq.label, std::move(out)}});
}

struct ScalarModelData {
    std::string label;
    Expr e;
    Expr b;
    bool dirichlet = false;
};

ScalarModelData scalar_data(const Model& model, const VariationDecomposition& v)
{
    const auto labels = model.labels();
    if (labels.size() != 1 || model.fields.front().kind != FieldKind::Scalar)
        throw Error(ErrorCode::Numeric, "the wave solver handles models with one scalar field");
    if (model.chart.n != 2) throw Error(ErrorCode::Numeric, "the wave solver handles two-dimensional charts");
    ScalarModelData d;
    d.label = labels.front();
    d.e = strip_volume(v.E.at(d.label), all_coords(model.chart)).coefficient({});
    d.dirichlet = model.chart.has_boundary && model.is_dirichlet_label(d.label);
    if (model.chart.has_boundary && !d.dirichlet) {
        auto it = v.b_bar.find(d.label);
        if (it != v.b_bar.end()) d.b = strip_volume(it->second, tangential_coords(model.chart)).coefficient({});
    }
    return d;
}

Expr linearize(const Expr& e, const std::string& label, const std::string& tangent)
{
    Expr out;
    for (AtomId a : e.atoms()) {
        const Atom& at = atom(a);
        if (at.kind == AtomKind::Jet && at.name == label) out += e.diff(a) * Expr::jet(tangent, at.J);
    }
    return out;
}

} // namespace

GridField wave_solver(const Model& model, const VariationDecomposition& v, const Grid& grid, const NumericContext& ctx,
                      const JetSource& initial)
{
    const ScalarModelData d = scalar_data(model, v);
    const ScalarEquation eq = prepare(d.e, d.label, d.b, d.dirichlet, model.chart.has_boundary);
    return leapfrog(eq, grid, ctx, nullptr, initial, d.label);
}

GridField linearized_wave_solver(const Model& model, const VariationDecomposition& v, const Grid& grid,
                                 const NumericContext& ctx, const GridField& background, const JetSource& initial)
{
    const ScalarModelData d = scalar_data(model, v);
    const std::string tangent = d.label + "~";
    const ScalarEquation eq = prepare(linearize(d.e, d.label, tangent), tangent, linearize(d.b, d.label, tangent),
                                      d.dirichlet, model.chart.has_boundary);
    struct Relabel : JetSource {
        const JetSource& s;
        std::string from, to;
        Relabel(const JetSource& src, std::string f, std::string t) : s(src), from(std::move(f)), to(std::move(t)) {}
        double jet(const std::string& l, const MultiIndex& J, const Point& p) const override
        {
            return s.jet(l == from ? to : l, J, p);
        }
    };
    const Relabel init(initial, tangent, d.label);
    GridField solved = leapfrog(eq, grid, ctx, &background, init, tangent);
    return GridField(grid, {{d.label, solved.values(tangent)}});
}

} // namespace cpsforge::numeric
