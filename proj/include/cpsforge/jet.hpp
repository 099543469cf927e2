#pragma once

#include "cpsforge/form.hpp"

#include <map>
#include <string>
#include <vector>

namespace cpsforge {

// Field label -> E_a as a top horizontal form (coefficient times the volume word).
using SourceForm = std::map<std::string, Form>;

// Coordinates 0..n-1 and the tangential ones 0..n-2.
[[nodiscard]] std::vector<int> all_coords(const Chart& chart);
[[nodiscard]] std::vector<int> tangential_coords(const Chart& chart);

// Interior product of the coordinate volume dx^{a_1}^...^dx^{a_k} with d/dx^i.
[[nodiscard]] Form volume_contract(const std::vector<int>& coords, int i);

struct SweepResult {
    // sum r_{a,K} theta^a_K, every K free of active indices
    Form remainder;
    // (k-1, 1) form with density * vol = remainder * vol + d_H(potential) along the active coordinates
    Form potential;
};

// Integration by parts of a density sum c theta^a_J (a (0,1) form standing
// for density ^ vol_active). Highest active contact order goes first; J sheds
// its smallest active index at each step.
[[nodiscard]] SweepResult ibp_sweep(const Chart& chart, const std::vector<int>& active, const Form& density);

// E_a = sum_J (-D)_J dL/du^a_J. Labels in `fields` are always present in the result.
[[nodiscard]] SourceForm euler_operator(const Chart& chart, const Form& L, const std::vector<std::string>& fields = {});

struct IbpResult {
    SourceForm E;
    Form Theta;
    // false for Lagrangians of jet order >= 3, where Theta depends on the sweep order
    bool canonical = true;
};

[[nodiscard]] IbpResult integrate_by_parts(const Chart& chart, const Form& L, const std::vector<std::string>& fields = {});

// dd L - sum_a E_a ^ theta^a - d_H Theta.
[[nodiscard]] Form bulk_residual(const Chart& chart, const Form& L, const SourceForm& E, const Form& Theta);

// sum_a E_a ^ theta^a.
[[nodiscard]] Form source_pairing(const SourceForm& E);

struct BoundaryDecomposition {
    SourceForm b_bar; // (n-1, 0) forms on the boundary
    Form theta_bar;   // (n-2, 1)
};

// Splits dd(ell_bar) - pulled_theta = sum b_a ^ theta^a - d_H theta_bar on the
// boundary {x^n = 0}. Contact forms with a transversal derivative raise NonDecomposable.
[[nodiscard]] BoundaryDecomposition boundary_euler_operator(const Chart& chart, const Form& ell_bar,
                                                            const Form& pulled_theta,
                                                            const std::vector<std::string>& fields = {});

// Same split for a precomputed rho = dd(ell_bar) - pulled_theta.
[[nodiscard]] BoundaryDecomposition decompose_boundary(const Chart& chart, const Form& rho,
                                                       const std::vector<std::string>& fields = {});

// dd(ell_bar) - sum b_a ^ theta^a - pulled_theta + d_H theta_bar on the boundary.
[[nodiscard]] Form boundary_residual(const Chart& chart, const Form& ell_bar, const Form& pulled_theta,
                                     const BoundaryDecomposition& b);

// Horizontal differential of the boundary chart (tangential directions only).
[[nodiscard]] Form d_H_boundary(const Chart& chart, const Form& f);

} // namespace cpsforge
