#pragma once

#include "cpsforge/model.hpp"
#include "cpsforge/onshell.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cpsforge {

// (L, ell_bar) with the component labels whose boundary values are fixed.
struct LagrangianPair {
    Form L;
    Form ell;
    std::set<std::string> dirichlet;
};

// Builds the pair from a model, adding 1/2 f u^2 vol_bar to ell_bar for every
// scalar field declared robin(f).
[[nodiscard]] LagrangianPair lagrangian_pair(const Model& model);

// Boundary forms on a field space with fixed values of the Dirichlet labels:
// tangential contact forms of those labels vanish, and so do their tangential jets.
[[nodiscard]] Form apply_dirichlet(const Chart& chart, const std::set<std::string>& labels, const Form& f);

struct VariationDecomposition {
    SourceForm E;
    Form Theta;
    SourceForm b_bar;
    Form theta_bar;
    bool canonical = true;
    Form bulk_residual;     // dd L - E ^ theta - d_H Theta
    Form boundary_residual; // dd ell - b ^ theta - j*Theta + d theta_bar (Dirichlet-reduced)

    [[nodiscard]] bool residuals_zero() const { return bulk_residual.is_zero() && boundary_residual.is_zero(); }
};

// Steps one and two. Throws NonDecomposable when the boundary variation keeps a
// transversal contact form.
[[nodiscard]] VariationDecomposition decompose(const Chart& chart, const LagrangianPair& lp,
                                               const std::vector<std::string>& labels);

// Drops every term with a dx^1 factor (restriction to a slice {x^1 = const}).
[[nodiscard]] Form slice_pullback(const Form& f);

struct PresymplecticCurrent {
    Form Omega;      // dd Theta
    Form omega_bar;  // dd theta_bar
    Form slice_bulk; // iota* Omega on {x^1 = const}
    Form slice_boundary;
    // d(Omega, omega_bar) + (dd E ^ theta, dd b ^ theta); zero when the decomposition is consistent
    RelForm identity_residual;
    bool closed = true; // dd Omega = 0 and dd omega_bar = 0
};

[[nodiscard]] PresymplecticCurrent presymplectic_current(const Chart& chart, const LagrangianPair& lp,
                                                         const VariationDecomposition& v);

// W^a = L_xi phi^a for the declared field types.
[[nodiscard]] EvolutionaryField lift_vector_field(const Model& model, const std::vector<Expr>& xi);

// (L_xi L - LL_W L, L_xi ell - LL_W ell), Dirichlet-reduced on the boundary.
[[nodiscard]] RelForm xi_invariance_residual(const Chart& chart, const LagrangianPair& lp, const std::vector<Expr>& xi,
                                             const EvolutionaryField& W);

struct NoetherData {
    RelForm current;         // (J, j_bar) = iota_xi(L, ell) - ii_W(Theta, theta_bar)
    RelForm lie_tilde;       // right-hand side of the flux law
    RelForm flux_residual;   // d(J, j_bar) - lie_tilde - (E_a W^a, b_a W^a)
    Form slice_current;      // J on {x^1 = const}
    Form slice_boundary_current;
};

[[nodiscard]] NoetherData noether_current_xi(const Chart& chart, const LagrangianPair& lp,
                                             const VariationDecomposition& v, const std::vector<Expr>& xi,
                                             const EvolutionaryField& W);

// Potential S with d_H S = F along the active coordinates, for a top-degree
// horizontal form F whose Euler image vanishes. Built from the jet homotopy
// (polynomial jet dependence) plus integration along the first active
// coordinate for the jet-free rest; nullopt when that construction does not
// apply or F is not exact.
[[nodiscard]] std::optional<Form> horizontal_potential(const Chart& chart, const std::vector<int>& active,
                                                       const Form& F);

struct DSymmetryResult {
    bool is_symmetry = false;
    RelForm potential;    // (S, s_bar)
    RelForm certificate;  // d(S, s_bar) - LL_W(L, ell); zero when accepted
    Form obstruction;     // Euler image of LL_W L, or the boundary source
    std::string method;   // "iota_xi", "homotopy", or the reason for rejection
};

[[nodiscard]] DSymmetryResult d_symmetry_check(const Chart& chart, const LagrangianPair& lp,
                                               const EvolutionaryField& W,
                                               const std::vector<Expr>* xi = nullptr);

struct OnShellIdeals {
    OnShellIdeal bulk;
    OnShellIdeal boundary;
};

// Bulk: constraints and E_a. Boundary: Dirichlet values, b_a, then the bulk equations at x^n = 0.
[[nodiscard]] OnShellIdeals build_ideals(const Chart& chart, const LagrangianPair& lp,
                                         const VariationDecomposition& v, const std::vector<Expr>& constraints);

struct GaugeResidual {
    Form bulk_raw;          // slice remainder of ii_W Omega after integration by parts, no reduction
    Form bulk_reduced;      // the same modulo the bulk on-shell ideal
    Form boundary_raw;      // boundary obstruction on the slice boundary, no reduction
    Form boundary_reduced;  // the same modulo the boundary ideal

    [[nodiscard]] bool is_gauge() const { return bulk_reduced.is_zero() && boundary_reduced.is_zero(); }
};

[[nodiscard]] GaugeResidual gauge_residual(const Chart& chart, const LagrangianPair& lp,
                                           const VariationDecomposition& v, const EvolutionaryField& W,
                                           const OnShellIdeals& ideals);

struct SolDescription {
    std::vector<std::pair<std::string, Expr>> bulk;     // E_a coefficients
    std::vector<std::pair<std::string, Expr>> boundary; // b_a coefficients
    std::vector<std::string> dirichlet;
    std::vector<Expr> constraints;
    // Every equation reduces to zero modulo the declared constraints: Sol is the whole field space.
    bool equals_field_space = false;
};

struct VectorReport {
    std::string name;
    bool evolutionary = false;
    std::vector<Expr> xi;
    EvolutionaryField W;
    std::optional<RelForm> invariance_residual;
    std::optional<NoetherData> noether;
    DSymmetryResult dsym;
    GaugeResidual gauge;

    [[nodiscard]] bool xi_invariant() const { return invariance_residual && invariance_residual->is_zero(); }
};

struct PipelineReport {
    std::string model;
    Chart chart;
    std::vector<Rational> metric;
    std::vector<std::string> labels;
    LagrangianPair lp;
    VariationDecomposition v;
    PresymplecticCurrent omega;
    SolDescription sol;
    std::vector<VectorReport> vectors;
    std::vector<std::string> caveats;

    [[nodiscard]] bool certificates_zero() const;
};

struct CpsOptions {
    bool symmetries = true;
};

[[nodiscard]] VectorReport analyse_vector(const Model& model, const LagrangianPair& lp,
                                          const VariationDecomposition& v, const OnShellIdeals& ideals,
                                          const VectorDecl& decl);

[[nodiscard]] PipelineReport run_cps(const Model& model, const CpsOptions& options = {});

} // namespace cpsforge
