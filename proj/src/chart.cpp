#include "cpsforge/chart.hpp"

#include <algorithm>

namespace cpsforge {

Expr total_derivative(const Chart& chart, int i, const Expr& e)
{
    return apply_derivation(e, [&](AtomId a) -> Expr {
        const Atom& at = atom(a);
        switch (at.kind) {
        case AtomKind::Coord: return at.coord == i ? Expr(1) : Expr();
        case AtomKind::Jet: {
            MultiIndex K = at.J.plus(i);
            if (static_cast<int>(K.order()) > chart.max_jet_order)
                throw Error(ErrorCode::JetOrderExceeded,
                            "total derivative exceeds jet order " + std::to_string(chart.max_jet_order),
                            chart.names().jet(at.name, K));
            return Expr::jet(at.name, K);
        }
        default: return {};
        }
    });
}

Expr total_derivative_multi(const Chart& chart, const MultiIndex& J, const Expr& e)
{
    Expr out = e;
    for (Index i : J.indices()) {
        if (out.is_zero()) break;
        out = total_derivative(chart, i, out);
    }
    return out;
}

Expr jet_partial(const Expr& e, const std::string& label, const MultiIndex& J)
{
    return e.diff(intern_jet(label, J));
}

std::vector<AtomId> jet_atoms(const Expr& e)
{
    std::vector<AtomId> out;
    for (AtomId a : e.atoms())
        if (atom(a).kind == AtomKind::Jet) out.push_back(a);
    std::sort(out.begin(), out.end(), [](AtomId x, AtomId y) { return compare_atoms(x, y) < 0; });
    return out;
}

} // namespace cpsforge
