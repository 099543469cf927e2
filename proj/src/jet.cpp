#include "cpsforge/jet.hpp"

#include <algorithm>
#include <set>

namespace cpsforge {

std::vector<int> all_coords(const Chart& chart)
{
    std::vector<int> c;
    for (int i = 0; i < chart.n; ++i) c.push_back(i);
    return c;
}

std::vector<int> tangential_coords(const Chart& chart)
{
    std::vector<int> c;
    for (int i = 0; i + 1 < chart.n; ++i) c.push_back(i);
    return c;
}

Form volume_contract(const std::vector<int>& coords, int i)
{
    std::vector<int> sorted = coords;
    std::sort(sorted.begin(), sorted.end());
    auto it = std::find(sorted.begin(), sorted.end(), i);
    if (it == sorted.end()) return {};
    const auto pos = it - sorted.begin();
    sorted.erase(it);
    Form w = Form::dx_word(sorted);
    return pos % 2 ? -w : w;
}

namespace {

int active_order(const MultiIndex& J, const std::vector<int>& active)
{
    int k = 0;
    for (Index i : J.indices())
        if (std::find(active.begin(), active.end(), i) != active.end()) ++k;
    return k;
}

} // namespace

SweepResult ibp_sweep(const Chart& chart, const std::vector<int>& active, const Form& density)
{
    SweepResult out;
    if (density.is_zero()) return out;
    if (density.bidegree() != std::make_pair(0, 1))
        throw Error(ErrorCode::DegreeMismatch, "integration by parts expects a (0,1) density", density.str());

    // Bucket contact terms by active order so the highest one is always at hand.
    std::map<int, Form, std::greater<>> buckets;
    for (const auto& [w, c] : density.terms()) {
        Form t;
        t.add_term(w, c);
        buckets[active_order(atom(basis_jet(w[0])).J, active)] += t;
    }
    while (!buckets.empty()) {
        auto top = buckets.begin();
        if (top->first == 0) break;
        if (top->second.is_zero()) {
            buckets.erase(top);
            continue;
        }
        const auto [w, c] = *top->second.terms().begin();
        const Atom& a = atom(basis_jet(w[0]));
        int i = -1;
        for (Index k : a.J.indices())
            if (std::find(active.begin(), active.end(), k) != active.end()) {
                i = k;
                break;
            }
        const MultiIndex K = a.J.minus(i);
        const Form low = c * Form::theta(a.name, K);
        out.potential += wedge(low, volume_contract(active, i));
        // density -= D_i c theta_K + c theta_J
        Form term;
        term.add_term(w, c);
        top->second -= term;
        const Expr Dc = total_derivative(chart, i, c);
        if (!Dc.is_zero()) buckets[top->first - 1] -= Dc * Form::theta(a.name, K);
    }
    for (auto& [k, f] : buckets) out.remainder += f;
    return out;
}

namespace {

std::vector<std::string> labels_of(const Form& L, const std::vector<std::string>& fields)
{
    std::set<std::string> s(fields.begin(), fields.end());
    for (const auto& [w, c] : L.terms())
        for (AtomId a : jet_atoms(c)) s.insert(atom(a).name);
    return {s.begin(), s.end()};
}

} // namespace

SourceForm euler_operator(const Chart& chart, const Form& L, const std::vector<std::string>& fields)
{
    SourceForm E;
    for (const auto& f : labels_of(L, fields)) E[f] = Form();
    if (L.is_zero()) return E;
    const Form vol = Form::volume(chart.n);
    const Expr density = strip_volume(L, all_coords(chart)).coefficient({});
    for (AtomId a : jet_atoms(density)) {
        const Atom& at = atom(a);
        Expr term = total_derivative_multi(chart, at.J, density.diff(a));
        if (at.J.order() % 2) term = -term;
        E[at.name] += term * vol;
    }
    return E;
}

IbpResult integrate_by_parts(const Chart& chart, const Form& L, const std::vector<std::string>& fields)
{
    IbpResult out;
    for (const auto& f : labels_of(L, fields)) out.E[f] = Form();
    if (L.is_zero()) return out;
    out.canonical = jet_order(L) <= 2;
    const std::vector<int> coords = all_coords(chart);
    const Form density = strip_volume(dd(chart, L), coords);
    SweepResult s = ibp_sweep(chart, coords, density);
    const Form vol = Form::volume(chart.n);
    for (const auto& [w, c] : s.remainder.terms()) out.E[atom(basis_jet(w[0])).name] += c * vol;
    out.Theta = std::move(s.potential);
    return out;
}

Form source_pairing(const SourceForm& E)
{
    Form out;
    for (const auto& [label, e] : E) out += wedge(e, Form::theta(label));
    return out;
}

Form bulk_residual(const Chart& chart, const Form& L, const SourceForm& E, const Form& Theta)
{
    return dd(chart, L) - source_pairing(E) - d_H(chart, Theta);
}

Form d_H_boundary(const Chart& chart, const Form& f) { return d_H_on(chart, tangential_coords(chart), f); }

BoundaryDecomposition decompose_boundary(const Chart& chart, const Form& rho, const std::vector<std::string>& fields)
{
    BoundaryDecomposition out;
    std::vector<std::string> labels = labels_of(rho, fields);
    for (const auto& [w, c] : rho.terms())
        for (BasisId b : w)
            if (is_vertical(b)) labels.push_back(atom(basis_jet(b)).name);
    for (const auto& f : labels) out.b_bar[f] = Form();
    if (rho.is_zero()) return out;

    // Contact forms with transversal indices stay inert in the tangential
    // sweep; any that survive in the remainder cannot be integrated away.
    const int tr = chart.transversal();
    const std::vector<int> tang = tangential_coords(chart);
    SweepResult s = ibp_sweep(chart, tang, strip_volume(rho, tang));
    for (const auto& [w, c] : s.remainder.terms()) {
        const Atom& a = atom(basis_jet(w[0]));
        if (a.J.contains(tr)) {
            const NameTable names = chart.names();
            throw Error(ErrorCode::NonDecomposable,
                        "boundary variation contains a transversal contact form and cannot be integrated by parts",
                        "(" + c.str(names) + ") " + basis_str(w[0], names));
        }
    }
    const Form bvol = Form::dx_word(tang);
    for (const auto& [w, c] : s.remainder.terms()) out.b_bar[atom(basis_jet(w[0])).name] += c * bvol;
    out.theta_bar = -s.potential;
    return out;
}

BoundaryDecomposition boundary_euler_operator(const Chart& chart, const Form& ell_bar, const Form& pulled_theta,
                                              const std::vector<std::string>& fields)
{
    std::vector<std::string> labels = labels_of(ell_bar, fields);
    return decompose_boundary(chart, dd(chart, ell_bar) - pulled_theta, labels);
}

Form boundary_residual(const Chart& chart, const Form& ell_bar, const Form& pulled_theta,
                       const BoundaryDecomposition& b)
{
    return dd(chart, ell_bar) - source_pairing(b.b_bar) - pulled_theta + d_H_boundary(chart, b.theta_bar);
}

} // namespace cpsforge
