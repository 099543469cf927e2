#pragma once

// Discretized cross-checks on charts of dimension 1 or 2. Axis 0 is time on a
// space-time chart and the last axis carries the lateral boundary {x^n = 0}.

#include "cpsforge/cps.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace cpsforge::numeric {

enum class FaceTag { None, Lid, Lateral };

enum class Quadrature { Auto, Trapezoid, Boole };

struct Grid {
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<int> cells;
    std::vector<bool> periodic;
    std::vector<FaceTag> lo_tag;
    std::vector<FaceTag> hi_tag;

    [[nodiscard]] int dim() const { return static_cast<int>(cells.size()); }
    [[nodiscard]] double h(int axis) const;
    [[nodiscard]] int points(int axis) const;
    [[nodiscard]] double coord(int axis, int k) const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t flat(const std::vector<int>& node) const;
    // Index of the node at coordinate value v along the axis; throws SliceOutsideGrid.
    [[nodiscard]] int node_at(int axis, double v) const;
    void validate() const;

    // [0,1]-style interval; both end points are lateral faces.
    static Grid interval(double a, double b, int cells);
    // Space-time box [t0,t1] x [x0,x1]: lids at t0, t1; a lateral face at x0 when
    // `lateral` is set, periodic in x when `periodic_x` is set.
    static Grid spacetime(double t0, double t1, int nt, double x0, double x1, int nx, bool lateral,
                          bool periodic_x = false);
};

struct Point {
    std::vector<double> x;
    std::vector<int> node; // empty when the point is not a grid node
};

class JetSource {
public:
    virtual ~JetSource() = default;
    [[nodiscard]] virtual double jet(const std::string& label, const MultiIndex& J, const Point& p) const = 0;
};

using SourcePtr = std::shared_ptr<const JetSource>;

// Numeric values for the formal function symbols and constants of a model.
// Besides declared realizations, sin, cos, exp and bump(s) = (1 - s^2)^8 on |s| < 1
// are available for building test fields.
struct NumericContext {
    std::map<std::string, FunctionDecl> functions;
    std::map<std::string, double> constants;

    static NumericContext from_model(const Model& model);
};

class Evaluator {
public:
    Evaluator(const NumericContext& ctx, const JetSource* fields);
    [[nodiscard]] double operator()(const Expr& e, const Point& p) const;

private:
    [[nodiscard]] double atom_value(AtomId a, const Point& p) const;
    [[nodiscard]] double func_value(const Atom& f, const Point& p) const;

    const NumericContext& ctx_;
    const JetSource* fields_;
    const std::map<std::string, double>* locals_ = nullptr; // function parameters
    mutable std::map<std::pair<std::string, std::vector<int>>, Expr> derivative_cache_;
};

// Fields given by closed-form expressions in the coordinates; jets are exact.
class AnalyticField : public JetSource {
public:
    explicit AnalyticField(std::map<std::string, Expr> components, NumericContext ctx = {});
    [[nodiscard]] double jet(const std::string& label, const MultiIndex& J, const Point& p) const override;

private:
    std::map<std::string, Expr> components_;
    NumericContext ctx_;
    mutable std::map<std::pair<std::string, MultiIndex>, Expr> cache_;
};

// sum_k c_k source_k, jet by jet.
class SumField : public JetSource {
public:
    SumField(std::vector<std::pair<double, SourcePtr>> parts) : parts_(std::move(parts)) {}
    [[nodiscard]] double jet(const std::string& label, const MultiIndex& J, const Point& p) const override;

private:
    std::vector<std::pair<double, SourcePtr>> parts_;
};

// Point values on a grid; jets by second-order finite differences, centered
// inside and one-sided at non-periodic faces. Only grid nodes can be queried.
class GridField : public JetSource {
public:
    GridField(Grid grid, std::map<std::string, std::vector<double>> values);
    [[nodiscard]] double jet(const std::string& label, const MultiIndex& J, const Point& p) const override;
    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] const std::vector<double>& values(const std::string& label) const;

private:
    [[nodiscard]] const std::vector<double>& derivative(const std::string& label, const MultiIndex& J) const;

    Grid grid_;
    std::map<std::string, std::vector<double>> values_;
    mutable std::map<std::pair<std::string, MultiIndex>, std::vector<double>> cache_;
};

// Composite one-dimensional rule over `cells` intervals (periodic: equal weights).
[[nodiscard]] std::vector<double> quadrature_weights(int cells, double h, bool periodic, Quadrature q);

// Integral of a top-degree form; its vertical part is evaluated on the tangents.
[[nodiscard]] double integrate_bulk(const Form& f, const Grid& grid, const Evaluator& ev, Quadrature q,
                                    const std::vector<const JetSource*>& tangents = {});
// Integral over the lateral faces with the induced orientation of a form whose
// horizontal part is dx^1 ^ ... ^ dx^{n-1}.
[[nodiscard]] double integrate_lateral(const Form& f, const Grid& grid, const Evaluator& ev, Quadrature q,
                                       const std::vector<const JetSource*>& tangents = {});

// int_M alpha - int_{lateral} beta.
[[nodiscard]] double rel_integrate_numeric(const RelForm& p, const Grid& grid, const NumericContext& ctx,
                                           const JetSource* fields, Quadrature q = Quadrature::Auto);

[[nodiscard]] double action_value(const LagrangianPair& lp, const Grid& grid, const NumericContext& ctx,
                                  const JetSource& phi, Quadrature q = Quadrature::Auto);

struct FdResult {
    double fd = 0;               // (S(phi + eps v) - S(phi - eps v)) / 2 eps
    double bulk_pairing = 0;     // int_M E(phi) v
    double boundary_pairing = 0; // int_lateral b(phi) v
    double residual = 0;
};

[[nodiscard]] FdResult fd_variation_check(const LagrangianPair& lp, const VariationDecomposition& v,
                                          const Grid& grid, const NumericContext& ctx, const JetSource& phi,
                                          const JetSource& perturbation, double eps, bool include_boundary = true,
                                          Quadrature q = Quadrature::Auto);

// Least-squares slope of log(residual) against log(eps).
[[nodiscard]] double loglog_slope(const std::vector<double>& eps, const std::vector<double>& residual);

// int_Sigma i*Omega(d1, d2) - int_{dSigma} i*omega_bar(d1, d2) on Sigma = {t = t_slice}.
[[nodiscard]] double symplectic_eval(const PresymplecticCurrent& omega, const Grid& grid, const NumericContext& ctx,
                                     const JetSource& phi, const JetSource& d1, const JetSource& d2, double t_slice,
                                     Quadrature q = Quadrature::Auto);

// int_Sigma (d1 phi d2 p - d2 phi d1 p) vol_gamma with p = grad_n phi, n the unit
// normal d_t / sqrt|g_00| of a diagonal metric.
[[nodiscard]] double canonical_pairing(const std::vector<Rational>& metric, const std::string& label,
                                       const Grid& grid, const JetSource& d1, const JetSource& d2, double t_slice,
                                       Quadrature q = Quadrature::Auto);

// Relative charge int_Sigma J - int_{dSigma} j_bar.
[[nodiscard]] double charge(const NoetherData& nd, const Grid& grid, const NumericContext& ctx, const JetSource& phi,
                            double t_slice, Quadrature q = Quadrature::Auto);

struct FluxReport {
    double q1 = 0;
    double q2 = 0;
    double delta_q = 0;
    double rhs = 0; // relative integral of the Lie-difference term between the slices
    double residual = 0;
};

[[nodiscard]] FluxReport flux_check(const NoetherData& nd, const Grid& grid, const NumericContext& ctx,
                                    const JetSource& phi, double t1, double t2, Quadrature q = Quadrature::Auto);

// Leapfrog for a single scalar label whose equation is linear in u_tt with
// constant coefficient and free of other time derivatives. The lateral face
// uses the model's b_bar (ghost node) or its Dirichlet condition; the far face
// of a strip uses the mirrored condition. `initial` supplies u and u_t at t0.
[[nodiscard]] GridField wave_solver(const Model& model, const VariationDecomposition& v, const Grid& grid,
                                    const NumericContext& ctx, const JetSource& initial);

// Same scheme for the linearization around `background` (a solution on the same grid).
[[nodiscard]] GridField linearized_wave_solver(const Model& model, const VariationDecomposition& v, const Grid& grid,
                                               const NumericContext& ctx, const GridField& background,
                                               const JetSource& initial);

} // namespace cpsforge::numeric
