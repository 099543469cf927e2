#pragma once

#include "cpsforge/jet.hpp"

#include <optional>
#include <vector>

namespace cpsforge {

// Constant diagonal metric g = diag(g_1, ..., g_n) with rational entries.
// Volume factors need |det g| to be a perfect square; otherwise
// UnsupportedMetric is raised.

[[nodiscard]] std::optional<Rational> rational_sqrt(const Rational& q);

// sqrt|prod g_ii| over the listed coordinates.
[[nodiscard]] Rational sqrt_abs_det(const std::vector<Rational>& g, const std::vector<int>& coords);

// sqrt|g| dx^1 ^ ... ^ dx^n
[[nodiscard]] Form metric_volume(const std::vector<Rational>& g);

// Volume of the boundary {x^n = 0} oriented by the outward normal -d/dx^n:
// iota_nu vol = (-1)^n sqrt|g_bar| dx^1 ^ ... ^ dx^{n-1}.
[[nodiscard]] Form boundary_volume(const std::vector<Rational>& g);

// Hodge star on the listed coordinates: *dx^I = prod_{i in I} g^{ii} sqrt|g|
// sign(I, I^c) dx^{I^c}. Vertical factors ride along on the right.
[[nodiscard]] Form hodge(const std::vector<Rational>& g, const std::vector<int>& coords, const Form& f);

// Box operator g^{ii} D_i D_i applied to a function on the jet bundle.
[[nodiscard]] Expr box(const Chart& chart, const std::vector<Rational>& g, const Expr& e);

// Derivative along the outward unit normal at {x^n = 0}: -D_n / sqrt|g_nn|.
[[nodiscard]] Expr normal_derivative(const Chart& chart, const std::vector<Rational>& g, const Expr& e);

} // namespace cpsforge
