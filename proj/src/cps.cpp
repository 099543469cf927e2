#include "cpsforge/cps.hpp"

#include "cpsforge/metric.hpp"

#include <algorithm>

namespace cpsforge {

namespace {

std::vector<int> range_coords(int from, int to)
{
    std::vector<int> out;
    for (int i = from; i < to; ++i) out.push_back(i);
    return out;
}

Form pair_sources(const SourceForm& S, const EvolutionaryField& W, const Chart* boundary_chart)
{
    Form out;
    for (const auto& [label, f] : S) {
        auto it = W.find(label);
        if (it == W.end() || f.is_zero()) continue;
        Expr w = it->second;
        if (boundary_chart) w = w.substitute({{intern_coord(boundary_chart->transversal()), Expr()}});
        out += w * f;
    }
    return out;
}

Form dd_sources_wedge_theta(const Chart& chart, const SourceForm& S)
{
    Form out;
    for (const auto& [label, f] : S) out += wedge(dd(chart, f), Form::theta(label));
    return out;
}

// Multiplies every monomial by 1/(number of jet factors); nullopt when a
// function symbol has jet arguments or a monomial has no jet factor.
std::optional<Expr> homotopy_scale(const Expr& e)
{
    Expr out;
    for (const auto& [m, c] : e.terms()) {
        int deg = 0;
        for (const auto& [a, p] : m) {
            const Atom& at = atom(a);
            if (at.kind == AtomKind::Jet) deg += p;
            if (at.kind == AtomKind::Func) {
                for (const Expr& arg : at.args)
                    if (arg.depends_on_jets()) return std::nullopt;
            }
        }
        if (deg <= 0) return std::nullopt;
        out.add_term(m, c / Rational(deg));
    }
    return out;
}

// Antiderivative in coordinate i of an expression polynomial in the coordinates.
std::optional<Expr> integrate_coord(const Expr& e, int i)
{
    const AtomId x = intern_coord(i);
    Expr out;
    for (const auto& [m, c] : e.terms()) {
        Monomial mm;
        int p = 0;
        int func_slot = -1;
        for (const auto& [a, q] : m) {
            const Atom& at = atom(a);
            if (at.kind == AtomKind::Jet) return std::nullopt;
            if (at.kind == AtomKind::Func) {
                bool depends = false;
                for (const Expr& arg : at.args)
                    if (arg.atoms().count(x)) depends = true;
                if (depends) {
                    if (func_slot >= 0 || q != 1) return std::nullopt;
                    func_slot = static_cast<int>(mm.size());
                }
            }
            if (a == x)
                p = q;
            else
                mm.emplace_back(a, q);
        }
        if (func_slot >= 0) {
            // f^(alpha)(.., x, ..) times factors constant in x: lower alpha in the x slot.
            if (p != 0) return std::nullopt;
            const Atom& f = atom(mm[static_cast<std::size_t>(func_slot)].first);
            std::vector<int> derivs = f.derivs;
            derivs.resize(f.args.size(), 0);
            int slot = -1;
            for (std::size_t k = 0; k < f.args.size(); ++k)
                if (f.args[k] == Expr::coord(i)) slot = static_cast<int>(k);
            if (slot < 0 || derivs[static_cast<std::size_t>(slot)] == 0) return std::nullopt;
            for (std::size_t k = 0; k < f.args.size(); ++k)
                if (static_cast<int>(k) != slot && f.args[k].atoms().count(x)) return std::nullopt;
            --derivs[static_cast<std::size_t>(slot)];
            Expr lowered = Expr::func(f.name, f.args, derivs) * Expr(c);
            for (std::size_t k = 0; k < mm.size(); ++k)
                if (static_cast<int>(k) != func_slot) lowered *= Expr::from_atom(mm[k].first, mm[k].second);
            out += lowered;
            continue;
        }
        if (p == -1) return std::nullopt;
        mm.emplace_back(x, p + 1);
        std::sort(mm.begin(), mm.end());
        out.add_term(mm, c / Rational(p + 1));
    }
    return out;
}

struct SliceSweep {
    Form remainder;
    Form potential;
};

// Alternates reduction modulo the ideal with integration by parts along `active`.
SliceSweep reduce_and_sweep(const Chart& chart, const OnShellIdeal* ideal, const std::vector<int>& active,
                            const Form& density)
{
    constexpr int kMaxRounds = 16;
    SliceSweep out;
    Form cur = density;
    for (int round = 0; round < kMaxRounds; ++round) {
        const Form red = ideal ? ideal->reduce(cur) : cur;
        if (red.is_zero()) {
            cur = red;
            break;
        }
        SweepResult s = ibp_sweep(chart, active, red);
        out.potential += s.potential;
        const bool stable = !ideal || ideal->reduce(s.remainder) == s.remainder;
        cur = std::move(s.remainder);
        if (stable) break;
    }
    out.remainder = std::move(cur);
    return out;
}

int coordinate_degree(const Expr& e)
{
    int best = 0;
    for (const auto& [m, c] : e.terms()) {
        int d = 0;
        for (const auto& [a, q] : m)
            if (atom(a).kind == AtomKind::Coord) d += q;
        best = std::max(best, d);
    }
    return best;
}

std::optional<Expr> antiderivative(const Chart& chart, const Expr& c, int i);

// Moves total derivatives off the coefficients onto the contact forms,
// c theta_J = D_i(g theta_J) - g theta_{J+i} whenever c = D_i g, so that the
// linearised equations in the ideal can act on the contact forms.
SliceSweep reverse_sweep(const Chart& chart, const OnShellIdeal* ideal, const std::vector<int>& active,
                         const Form& density)
{
    constexpr int kMaxRounds = 8;
    SliceSweep out;
    Form cur = ideal ? ideal->reduce(density) : density;
    for (int round = 0; round < kMaxRounds && !cur.is_zero(); ++round) {
        Form next;
        bool moved = false;
        for (const auto& [w, c] : cur.terms()) {
            const Atom& a = atom(basis_jet(w[0]));
            bool found = false;
            for (int i : active) {
                auto g = antiderivative(chart, c, i);
                if (!g) continue;
                out.potential += wedge(*g * Form::theta(a.name, a.J), volume_contract(active, i));
                next -= *g * Form::theta(a.name, a.J.plus(i));
                found = moved = true;
                break;
            }
            if (!found) next.add_term(w, c);
        }
        cur = ideal ? ideal->reduce(next) : next;
        if (!moved) break;
    }
    out.remainder = std::move(cur);
    return out;
}

Form with_volume(const Form& density, const std::vector<int>& coords)
{
    if (density.is_zero()) return {};
    return wedge(Form::dx_word(coords), density);
}

} // namespace

LagrangianPair lagrangian_pair(const Model& model)
{
    LagrangianPair lp{model.L, model.ell, {}};
    for (const auto& label : model.labels())
        if (model.chart.has_boundary && model.is_dirichlet_label(label)) lp.dirichlet.insert(label);
    for (const auto& f : model.fields) {
        auto it = model.bc.find(f.name);
        if (it == model.bc.end() || it->second.kind != BcKind::Robin) continue;
        if (f.kind != FieldKind::Scalar)
            throw Error(ErrorCode::UnsupportedTensorRank, "robin boundary conditions are available for scalar fields only",
                        f.name);
        const Expr u = Expr::jet(f.name);
        lp.ell += (Expr(Rational(1, 2)) * it->second.robin * u * u) * boundary_volume(model.metric);
    }
    return lp;
}

Form apply_dirichlet(const Chart& chart, const std::set<std::string>& labels, const Form& f)
{
    if (labels.empty()) return f;
    const int tr = chart.transversal();
    auto fixed = [&](AtomId a) {
        const Atom& at = atom(a);
        return labels.count(at.name) != 0 && !at.J.contains(tr);
    };
    Form out;
    for (const auto& [w, c] : f.terms()) {
        bool drop = false;
        for (BasisId b : w)
            if (is_vertical(b) && fixed(basis_jet(b))) drop = true;
        if (drop) continue;
        std::map<AtomId, Expr> sub;
        for (AtomId a : c.atoms())
            if (atom(a).kind == AtomKind::Jet && fixed(a)) sub.emplace(a, Expr());
        out.add_term(w, sub.empty() ? c : c.substitute(sub));
    }
    return out;
}

VariationDecomposition decompose(const Chart& chart, const LagrangianPair& lp, const std::vector<std::string>& labels)
{
    VariationDecomposition v;
    IbpResult ibp = integrate_by_parts(chart, lp.L, labels);
    v.E = std::move(ibp.E);
    v.Theta = std::move(ibp.Theta);
    v.canonical = ibp.canonical;
    v.bulk_residual = bulk_residual(chart, lp.L, v.E, v.Theta);
    if (!chart.has_boundary) return v;

    const Form pulled = pullback_boundary(chart, v.Theta);
    const Form rho = apply_dirichlet(chart, lp.dirichlet, dd(chart, lp.ell) - pulled);
    BoundaryDecomposition b = decompose_boundary(chart, rho, labels);
    v.b_bar = std::move(b.b_bar);
    v.theta_bar = std::move(b.theta_bar);
    for (const auto& l : lp.dirichlet) v.b_bar[l] = Form();
    v.boundary_residual = apply_dirichlet(chart, lp.dirichlet, dd(chart, lp.ell) - pulled) -
                          source_pairing(v.b_bar) + d_H_boundary(chart, v.theta_bar);
    return v;
}

Form slice_pullback(const Form& f) { return restrict_to_hyperplane(f, 0, Expr::coord(0)); }

PresymplecticCurrent presymplectic_current(const Chart& chart, const LagrangianPair& lp,
                                           const VariationDecomposition& v)
{
    PresymplecticCurrent out;
    out.Omega = dd(chart, v.Theta);
    out.omega_bar = dd(chart, v.theta_bar);
    out.slice_bulk = slice_pullback(out.Omega);
    out.slice_boundary = slice_pullback(out.omega_bar);
    out.closed = dd(chart, out.Omega).is_zero() && dd(chart, out.omega_bar).is_zero();
    out.identity_residual.bulk = d_H(chart, out.Omega) + dd_sources_wedge_theta(chart, v.E);
    if (chart.has_boundary) {
        out.identity_residual.boundary =
            apply_dirichlet(chart, lp.dirichlet, pullback_boundary(chart, out.Omega)) -
            d_H_boundary(chart, out.omega_bar) + dd_sources_wedge_theta(chart, v.b_bar);
    }
    return out;
}

EvolutionaryField lift_vector_field(const Model& model, const std::vector<Expr>& xi)
{
    const Chart& chart = model.chart;
    if (static_cast<int>(xi.size()) != chart.n)
        throw Error(ErrorCode::ComponentCount, "vector field needs " + std::to_string(chart.n) + " components");
    if (chart.has_boundary) require_tangent(chart, xi);
    EvolutionaryField W;
    for (const auto& [label, info] : model.components()) {
        Expr w;
        for (int m = 0; m < chart.n; ++m) w += xi[static_cast<std::size_t>(m)] * Expr::jet(label, MultiIndex{m});
        if (info.kind != FieldKind::Scalar) {
            const FieldDecl* decl = nullptr;
            for (const auto& f : model.fields)
                if (f.name == info.field) decl = &f;
            for (int m = 0; m < chart.n; ++m) {
                const Expr dxi = total_derivative(chart, info.mu, xi[static_cast<std::size_t>(m)]);
                if (!dxi.is_zero()) w += dxi * Expr::jet(decl->label(chart, m, info.lie));
            }
        }
        W[label] = w;
    }
    return W;
}

RelForm xi_invariance_residual(const Chart& chart, const LagrangianPair& lp, const std::vector<Expr>& xi,
                               const EvolutionaryField& W)
{
    const RelForm p{lp.L, chart.has_boundary ? lp.ell : Form()};
    RelForm r;
    if (chart.has_boundary) {
        r = rel_lie(chart, xi, p) - rel_lie_vertical(chart, W, p);
        r.boundary = apply_dirichlet(chart, lp.dirichlet, r.boundary);
    } else {
        r.bulk = lie_horizontal(chart, xi, lp.L) - lie_vertical(chart, W, lp.L);
    }
    return r;
}

NoetherData noether_current_xi(const Chart& chart, const LagrangianPair& lp, const VariationDecomposition& v,
                               const std::vector<Expr>& xi, const EvolutionaryField& W)
{
    NoetherData out;
    if (chart.has_boundary) {
        out.current = rel_iota(chart, xi, {lp.L, lp.ell}) - rel_iota_vertical(chart, W, {v.Theta, v.theta_bar});
        out.current.boundary = apply_dirichlet(chart, lp.dirichlet, out.current.boundary);
    } else {
        out.current.bulk = iota_horizontal(chart, xi, lp.L) - ii_vertical(chart, W, v.Theta);
    }
    out.lie_tilde = xi_invariance_residual(chart, lp, xi, W);
    if (chart.has_boundary) {
        out.flux_residual = rel_d(chart, out.current) - out.lie_tilde;
        out.flux_residual.bulk -= pair_sources(v.E, W, nullptr);
        out.flux_residual.boundary = apply_dirichlet(
            chart, lp.dirichlet, out.flux_residual.boundary - pair_sources(v.b_bar, W, &chart));
    } else {
        out.flux_residual.bulk = d_H(chart, out.current.bulk) - out.lie_tilde.bulk - pair_sources(v.E, W, nullptr);
    }
    out.slice_current = slice_pullback(out.current.bulk);
    out.slice_boundary_current = slice_pullback(out.current.boundary);
    return out;
}

std::optional<Form> horizontal_potential(const Chart& chart, const std::vector<int>& active, const Form& F)
{
    if (F.is_zero()) return Form();
    if (F.vertical_degree() != 0 || F.horizontal_degree() != static_cast<int>(active.size())) return std::nullopt;
    if (active.empty()) return std::nullopt;

    // Vertical part: dd F = d_H P when F is variationally trivial.
    const SweepResult s = ibp_sweep(chart, active, strip_volume(dd(chart, F), active));
    if (!s.remainder.is_zero()) return std::nullopt;

    // Jet homotopy along u -> lambda u: S = int_0^1 (1/lambda) sigma_lambda(ii_u P).
    EvolutionaryField identity;
    for (const auto& [w, c] : s.potential.terms())
        for (BasisId b : w)
            if (is_vertical(b)) identity[atom(basis_jet(b)).name] = Expr::jet(atom(basis_jet(b)).name);
    Form S;
    const Form contracted = ii_vertical(chart, identity, s.potential);
    for (const auto& [w, c] : contracted.terms()) {
        auto scaled = homotopy_scale(c);
        if (!scaled) return std::nullopt;
        S.add_term(w, *scaled);
    }

    // Jet-free rest: integrate along the first active coordinate.
    const Form rest = F - d_H_on(chart, active, S);
    if (!rest.is_zero()) {
        const Expr g = strip_volume(rest, active).coefficient({});
        if (g.depends_on_jets()) return std::nullopt;
        auto G = integrate_coord(g, active.front());
        if (!G) return std::nullopt;
        S += *G * volume_contract(active, active.front());
    }
    if (!(d_H_on(chart, active, S) == F)) return std::nullopt;
    return S;
}

namespace {

std::optional<Expr> antiderivative(const Chart& chart, const Expr& c, int i)
{
    if (c.is_zero()) return std::nullopt;
    const auto S = horizontal_potential(chart, {i}, c * Form::dx(i));
    if (!S || S->is_zero()) return std::nullopt;
    const Expr g = S->coefficient({});
    if (coordinate_degree(g) > coordinate_degree(c)) return std::nullopt;
    return g;
}

} // namespace

DSymmetryResult d_symmetry_check(const Chart& chart, const LagrangianPair& lp, const EvolutionaryField& W,
                                 const std::vector<Expr>* xi)
{
    DSymmetryResult out;
    const RelForm p{lp.L, chart.has_boundary ? lp.ell : Form()};
    RelForm target = chart.has_boundary ? rel_lie_vertical(chart, W, p) : RelForm{lie_vertical(chart, W, lp.L), {}};
    target.boundary = apply_dirichlet(chart, lp.dirichlet, target.boundary);

    auto certify = [&](const RelForm& pot) {
        RelForm c = chart.has_boundary ? rel_d(chart, pot) : RelForm{d_H(chart, pot.bulk), {}};
        c.boundary = apply_dirichlet(chart, lp.dirichlet, c.boundary);
        return c - target;
    };

    if (xi && xi_invariance_residual(chart, lp, *xi, W).is_zero()) {
        out.potential = chart.has_boundary ? rel_iota(chart, *xi, p) : RelForm{iota_horizontal(chart, *xi, lp.L), {}};
        out.potential.boundary = apply_dirichlet(chart, lp.dirichlet, out.potential.boundary);
        out.certificate = certify(out.potential);
        out.is_symmetry = out.certificate.is_zero();
        out.method = "iota_xi";
        if (out.is_symmetry) return out;
    }

    const SourceForm E = euler_operator(chart, target.bulk);
    out.obstruction = source_pairing(E);
    if (!out.obstruction.is_zero()) {
        out.method = "bulk Euler image of LL_W L is nonzero";
        return out;
    }
    auto S = horizontal_potential(chart, all_coords(chart), target.bulk);
    if (!S) {
        out.method = "potential not constructible by the jet homotopy";
        return out;
    }
    out.potential.bulk = *S;
    if (chart.has_boundary) {
        const std::vector<int> tang = tangential_coords(chart);
        // LL_W ell = j*S - d s_bar, so d s_bar = j*S - LL_W ell.
        const Form G = apply_dirichlet(chart, lp.dirichlet, pullback_boundary(chart, *S)) - target.boundary;
        if (!G.is_zero()) {
            const SweepResult s = ibp_sweep(chart, tang, strip_volume(dd(chart, G), tang));
            out.obstruction = apply_dirichlet(chart, lp.dirichlet, wedge(Form::dx_word(tang), s.remainder));
            if (!out.obstruction.is_zero()) {
                out.method = "boundary source of LL_W ell - j*S is nonzero";
                return out;
            }
            auto sb = horizontal_potential(chart, tang, G);
            if (!sb) {
                out.method = "boundary potential not constructible by the jet homotopy";
                return out;
            }
            out.potential.boundary = *sb;
        }
    }
    out.certificate = certify(out.potential);
    out.is_symmetry = out.certificate.is_zero();
    out.method = out.is_symmetry ? "homotopy" : "certificate failed";
    return out;
}

OnShellIdeals build_ideals(const Chart& chart, const LagrangianPair& lp, const VariationDecomposition& v,
                           const std::vector<Expr>& constraints)
{
    OnShellIdeals out{OnShellIdeal(chart, false), OnShellIdeal(chart, true)};
    const std::vector<int> all = all_coords(chart);
    const std::vector<int> tang = tangential_coords(chart);
    std::vector<Expr> bulk_eqs = constraints;
    for (const auto& [label, e] : v.E)
        if (!e.is_zero()) bulk_eqs.push_back(strip_volume(e, all).coefficient({}));
    for (const Expr& e : bulk_eqs) (void)out.bulk.add(e, all);
    if (!chart.has_boundary) return out;
    for (const auto& label : lp.dirichlet) (void)out.boundary.add(Expr::jet(label), tang);
    for (const auto& [label, b] : v.b_bar)
        if (!b.is_zero()) (void)out.boundary.add(strip_volume(b, tang).coefficient({}), tang);
    for (const Expr& e : bulk_eqs) (void)out.boundary.add(e, all);
    return out;
}

GaugeResidual gauge_residual(const Chart& chart, const LagrangianPair& lp, const VariationDecomposition& v,
                             const EvolutionaryField& W, const OnShellIdeals& ideals)
{
    GaugeResidual out;
    const std::vector<int> sigma = range_coords(1, chart.n);
    const Form bulk_density = strip_volume(slice_pullback(ii_vertical(chart, W, dd(chart, v.Theta))), sigma);
    SliceSweep raw = reduce_and_sweep(chart, nullptr, sigma, bulk_density);
    SliceSweep red = reduce_and_sweep(chart, &ideals.bulk, sigma, bulk_density);
    if (!red.remainder.is_zero()) {
        // Residuals of the form lambda * (linearised equation) only vanish once the
        // derivatives sit on the contact forms.
        SliceSweep rev = reverse_sweep(chart, &ideals.bulk, sigma, bulk_density);
        if (rev.remainder.is_zero()) {
            red = std::move(rev);
            raw = reverse_sweep(chart, nullptr, sigma, bulk_density);
        }
    }
    out.bulk_raw = with_volume(raw.remainder, sigma);
    out.bulk_reduced = with_volume(red.remainder, sigma);
    if (!chart.has_boundary || chart.n < 2) return out;

    const std::vector<int> corner = range_coords(1, chart.n - 1);
    const Form rho = slice_pullback(apply_dirichlet(
        chart, lp.dirichlet, pullback_boundary(chart, ii_vertical(chart, W, dd(chart, v.theta_bar)))));
    auto boundary_part = [&](const SliceSweep& s, const OnShellIdeal* ideal) {
        const Form eta = apply_dirichlet(chart, lp.dirichlet, pullback_boundary(chart, s.potential));
        const Form sigma_form = eta - rho;
        if (sigma_form.is_zero()) return Form();
        const Form density = strip_volume(sigma_form, corner);
        SliceSweep b = reduce_and_sweep(chart, ideal, corner, density);
        if (ideal && !b.remainder.is_zero() && !corner.empty()) {
            SliceSweep rev = reverse_sweep(chart, ideal, corner, density);
            if (rev.remainder.is_zero()) b = std::move(rev);
        }
        return with_volume(apply_dirichlet(chart, lp.dirichlet, b.remainder), corner);
    };
    out.boundary_raw = boundary_part(raw, nullptr);
    out.boundary_reduced = boundary_part(red, &ideals.boundary);
    return out;
}

bool PipelineReport::certificates_zero() const
{
    if (!v.residuals_zero() || !omega.identity_residual.is_zero() || !omega.closed) return false;
    for (const auto& vr : vectors) {
        if (vr.noether && !vr.noether->flux_residual.is_zero()) return false;
        if (vr.dsym.is_symmetry && !vr.dsym.certificate.is_zero()) return false;
    }
    return true;
}

VectorReport analyse_vector(const Model& model, const LagrangianPair& lp, const VariationDecomposition& v,
                            const OnShellIdeals& ideals, const VectorDecl& decl)
{
    const Chart& chart = model.chart;
    VectorReport r;
    r.name = decl.name;
    r.evolutionary = decl.evolutionary;
    if (decl.evolutionary) {
        r.W = decl.W;
        r.dsym = d_symmetry_check(chart, lp, r.W);
    } else {
        r.xi = decl.xi;
        r.W = lift_vector_field(model, r.xi);
        r.invariance_residual = xi_invariance_residual(chart, lp, r.xi, r.W);
        r.noether = noether_current_xi(chart, lp, v, r.xi, r.W);
        r.dsym = d_symmetry_check(chart, lp, r.W, &r.xi);
    }
    r.gauge = gauge_residual(chart, lp, v, r.W, ideals);
    return r;
}

PipelineReport run_cps(const Model& model, const CpsOptions& options)
{
    PipelineReport rep;
    rep.model = model.name;
    rep.chart = model.chart;
    rep.metric = model.metric;
    rep.labels = model.labels();
    rep.lp = lagrangian_pair(model);
    rep.v = decompose(model.chart, rep.lp, rep.labels);
    rep.omega = presymplectic_current(model.chart, rep.lp, rep.v);

    const std::vector<int> all = all_coords(model.chart);
    const std::vector<int> tang = tangential_coords(model.chart);
    for (const auto& [label, e] : rep.v.E) rep.sol.bulk.emplace_back(label, strip_volume(e, all).coefficient({}));
    if (model.chart.has_boundary)
        for (const auto& [label, b] : rep.v.b_bar)
            if (!rep.lp.dirichlet.count(label))
                rep.sol.boundary.emplace_back(label, strip_volume(b, tang).coefficient({}));
    rep.sol.dirichlet.assign(rep.lp.dirichlet.begin(), rep.lp.dirichlet.end());
    rep.sol.constraints = model.constraints;
    {
        OnShellIdeal c(model.chart);
        for (const Expr& e : model.constraints) (void)c.add(e, all);
        bool all_zero = true;
        for (const auto& [label, e] : rep.sol.bulk)
            if (!c.reduce(e).is_zero()) all_zero = false;
        for (const auto& [label, b] : rep.sol.boundary)
            if (!b.is_zero()) all_zero = false;
        rep.sol.equals_field_space = all_zero;
    }

    if (!rep.v.canonical)
        rep.caveats.push_back("Lagrangian of jet order >= 3: Theta depends on the integration-by-parts order");
    if (rep.sol.equals_field_space && !rep.omega.slice_bulk.is_zero())
        rep.caveats.push_back("every equation holds on the whole field space, yet the presymplectic current is nonzero");

    if (options.symmetries && !model.vectors.empty()) {
        const OnShellIdeals ideals = build_ideals(model.chart, rep.lp, rep.v, model.constraints);
        for (const auto& decl : model.vectors) rep.vectors.push_back(analyse_vector(model, rep.lp, rep.v, ideals, decl));
        rep.caveats.push_back("the converse statements relating gauge directions and symmetries are not checked");
    }
    return rep;
}

} // namespace cpsforge
