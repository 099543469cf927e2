#pragma once

#include "cpsforge/expr.hpp"

#include <string>
#include <vector>

namespace cpsforge {

// A single coordinate chart. When has_boundary is set the boundary is the
// hypersurface {x^n = 0}, i.e. the last coordinate is transversal.
struct Chart {
    int n = 0;
    std::vector<std::string> coords;
    bool has_boundary = false;
    int max_jet_order = 4;

    Chart() = default;
    Chart(std::vector<std::string> names, bool boundary = false, int cap = 4)
        : n(static_cast<int>(names.size())), coords(std::move(names)), has_boundary(boundary), max_jet_order(cap)
    {
    }

    [[nodiscard]] NameTable names() const { return NameTable{coords}; }
    [[nodiscard]] int transversal() const { return n - 1; }
};

// Total derivative D_i = d/dx^i + u^a_{J+i} d/du^a_J. Throws JetOrderExceeded
// when a produced jet would exceed chart.max_jet_order.
[[nodiscard]] Expr total_derivative(const Chart& chart, int i, const Expr& e);
[[nodiscard]] Expr total_derivative_multi(const Chart& chart, const MultiIndex& J, const Expr& e);

// Partial derivative with respect to the jet variable u^a_J.
[[nodiscard]] Expr jet_partial(const Expr& e, const std::string& label, const MultiIndex& J);

// Jet atoms (label, J) occurring in e, including inside function arguments.
[[nodiscard]] std::vector<AtomId> jet_atoms(const Expr& e);

} // namespace cpsforge
