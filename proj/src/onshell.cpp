#include "cpsforge/onshell.hpp"

#include <algorithm>

namespace cpsforge {

namespace {

constexpr int kMaxPasses = 64;

bool only_in(const MultiIndex& J, const std::vector<int>& dirs)
{
    return std::all_of(J.indices().begin(), J.indices().end(), [&](Index i) {
        return std::find(dirs.begin(), dirs.end(), static_cast<int>(i)) != dirs.end();
    });
}

Form total_lie_multi(const Chart& chart, const MultiIndex& J, Form f)
{
    for (Index i : J.indices()) f = total_lie(chart, i, f);
    return f;
}

} // namespace

int compare_rank(AtomId a, AtomId b)
{
    const Atom& x = atom(a);
    const Atom& y = atom(b);
    if (x.J.order() != y.J.order()) return x.J.order() < y.J.order() ? -1 : 1;
    const int top = std::max(x.J.empty() ? 0 : x.J.indices().back(), y.J.empty() ? 0 : y.J.indices().back());
    for (int i = 0; i <= top; ++i) {
        const int cx = x.J.count(i);
        const int cy = y.J.count(i);
        if (cx != cy) return cx < cy ? -1 : 1;
    }
    if (x.name != y.name) return x.name < y.name ? -1 : 1;
    return 0;
}

OnShellIdeal::OnShellIdeal(Chart chart, bool on_boundary) : chart_(std::move(chart)), on_boundary_(on_boundary) {}

Expr OnShellIdeal::finish(const Expr& e) const
{
    if (!on_boundary_) return e;
    return e.substitute({{intern_coord(chart_.transversal()), Expr()}});
}

bool OnShellIdeal::add(const Expr& eq, std::vector<int> directions)
{
    const Expr e = reduce(eq);
    if (e.is_zero()) return true;
    std::vector<AtomId> jets;
    for (AtomId a : e.atoms())
        if (atom(a).kind == AtomKind::Jet) jets.push_back(a);
    if (jets.empty()) {
        unsolved_.push_back(e);
        return false;
    }
    const AtomId lead = *std::max_element(jets.begin(), jets.end(),
                                          [](AtomId a, AtomId b) { return compare_rank(a, b) < 0; });
    const Expr c = e.diff(lead);
    if (!c.is_constant() || c.is_zero()) {
        unsolved_.push_back(e);
        return false;
    }
    const Expr rest = e - c * Expr::from_atom(lead);
    if (rest.atoms().count(lead) != 0) {
        unsolved_.push_back(e);
        return false;
    }
    const Atom& la = atom(lead);
    rules_.push_back({la.name, la.J, c.constant_value(), rest, dd(chart_, Form::scalar(rest)), std::move(directions)});
    jet_cache_.clear();
    theta_cache_.clear();
    return true;
}

std::optional<Expr> OnShellIdeal::jet_replacement(AtomId jet) const
{
    if (auto it = jet_cache_.find(jet); it != jet_cache_.end()) return it->second;
    std::optional<Expr> out;
    const Atom& a = atom(jet);
    for (const Rule& r : rules_) {
        if (r.label != a.name || !r.lead.divides(a.J)) continue;
        const MultiIndex K = r.lead.complement_in(a.J);
        if (!only_in(K, r.directions)) continue;
        try {
            out = finish(-(total_derivative_multi(chart_, K, r.rest) * (Rational(1) / r.c)));
            break;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::JetOrderExceeded) throw;
        }
    }
    jet_cache_[jet] = out;
    return out;
}

std::optional<Form> OnShellIdeal::theta_replacement(AtomId jet) const
{
    if (auto it = theta_cache_.find(jet); it != theta_cache_.end()) return it->second;
    std::optional<Form> out;
    const Atom& a = atom(jet);
    for (const Rule& r : rules_) {
        if (r.label != a.name || !r.lead.divides(a.J)) continue;
        const MultiIndex K = r.lead.complement_in(a.J);
        if (!only_in(K, r.directions)) continue;
        try {
            const Form f = total_lie_multi(chart_, K, r.theta_rest);
            out = f.map_coefficients([&](const Expr& c) { return finish(-(c * (Rational(1) / r.c))); });
            break;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::JetOrderExceeded) throw;
        }
    }
    theta_cache_[jet] = out;
    return out;
}

Expr OnShellIdeal::reduce(const Expr& e) const
{
    Expr cur = finish(e);
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        std::map<AtomId, Expr> sub;
        for (AtomId a : cur.atoms()) {
            if (atom(a).kind != AtomKind::Jet) continue;
            if (auto r = jet_replacement(a)) sub.emplace(a, *r);
        }
        if (sub.empty()) break;
        cur = cur.substitute(sub);
    }
    return cur;
}

Form OnShellIdeal::reduce(const Form& f) const
{
    Form cur = f;
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        bool changed = false;
        Form next;
        for (const auto& [w, c] : cur.terms()) {
            bool hit = false;
            for (BasisId b : w)
                if (is_vertical(b) && theta_replacement(basis_jet(b))) hit = true;
            if (!hit) {
                next.add_term(w, c);
                continue;
            }
            changed = true;
            Form acc = Form::scalar(c);
            for (BasisId b : w) {
                if (is_vertical(b)) {
                    if (auto r = theta_replacement(basis_jet(b))) {
                        acc = wedge(acc, *r);
                        continue;
                    }
                }
                acc = wedge(acc, Form::basis(b));
            }
            next += acc;
        }
        cur = std::move(next);
        if (!changed) break;
    }
    return cur.map_coefficients([&](const Expr& c) { return reduce(c); });
}

std::vector<std::pair<Expr, Expr>> OnShellIdeal::rules() const
{
    std::vector<std::pair<Expr, Expr>> out;
    for (const Rule& r : rules_) out.emplace_back(Expr::jet(r.label, r.lead), -(r.rest * (Rational(1) / r.c)));
    return out;
}

} // namespace cpsforge
