#include "cpsforge/cps.hpp"
#include "cpsforge/dsl.hpp"
#include "support/acceptance.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <functional>

using namespace cpsforge;

namespace {

Expr u(const MultiIndex& J = {}) { return Expr::jet("u", J); }

const char* kScalarHeader = R"(
model s;
chart { coords t, x; boundary x; }
fields { scalar u; }
background { metric diag(-1, 1); }
)";

Model scalar(const std::string& lagrangian, const std::string& rest = "")
{
    return dsl::parse_model(std::string(kScalarHeader) + "lagrangian { " + lagrangian + " }\n" + rest);
}

Model oneform_2d()
{
    return dsl::parse_model(R"(
model a;
chart { coords t, x; boundary x; }
fields { oneform A; }
background { metric diag(-1, 1); }
lagrangian { L = -1/2*inner(d(A), d(A))*vol; }
)");
}

} // namespace

TEST(Cps, ZeroLagrangianGivesZeroReport)
{
    const PipelineReport r = run_cps(scalar("L = 0; ell = 0;"));
    EXPECT_TRUE(r.v.E.at("u").is_zero());
    EXPECT_TRUE(r.v.Theta.is_zero());
    EXPECT_TRUE(r.v.b_bar.at("u").is_zero());
    EXPECT_TRUE(r.v.theta_bar.is_zero());
    EXPECT_TRUE(r.omega.Omega.is_zero());
    EXPECT_TRUE(r.omega.omega_bar.is_zero());
    EXPECT_TRUE(r.sol.equals_field_space);
    EXPECT_TRUE(r.certificates_zero());
}

TEST(Cps, DirichletRemovesBoundarySource)
{
    const Model m = scalar("L = 1/2*inner(d(u), d(u))*vol; ell = u^2*vol;", "bc { u: dirichlet; }");
    const PipelineReport r = run_cps(m);
    EXPECT_TRUE(r.v.b_bar.at("u").is_zero());
    EXPECT_TRUE(r.v.residuals_zero());
    EXPECT_EQ(r.v.E.at("u"), (u({0, 0}) - u({1, 1})) * Form::volume(2));
}

TEST(Cps, TransversalBoundaryVariationIsRejected)
{
    const Model m = dsl::load_model(acceptance::corpus_path("lagrange_multiplier_L3.cps"));
    try {
        (void)run_cps(m);
        FAIL() << "expected NonDecomposable";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonDecomposable);
        EXPECT_NE(e.detail().find("phi_x"), std::string::npos) << e.detail();
    }
}

TEST(Cps, LiftOfTimeTranslation)
{
    const Model s = scalar("L = 0;");
    const std::vector<Expr> dt{Expr(1), Expr(0)};
    EXPECT_EQ(lift_vector_field(s, dt).at("u"), u({0}));
    const EvolutionaryField W = lift_vector_field(oneform_2d(), dt);
    EXPECT_EQ(W.at("A[t]"), Expr::jet("A[t]", {0}));
    EXPECT_EQ(W.at("A[x]"), Expr::jet("A[x]", {0}));
}

TEST(Cps, LiftOfBoostAgreesWithFlowDerivative)
{
    // xi = x d_t on a one-form: W^{A_x} = x A_x,t + A_t and W^{A_t} = x A_t,t.
    const Expr x = Expr::coord(1);
    const EvolutionaryField W = lift_vector_field(oneform_2d(), {x, Expr(0)});
    EXPECT_EQ(W.at("A[x]"), x * Expr::jet("A[x]", {0}) + Expr::jet("A[t]"));
    EXPECT_EQ(W.at("A[t]"), x * Expr::jet("A[t]", {0}));

    // Independent route: the flow (t, x) -> (t + s x, x) pulls A back to
    // (A_t(t + s x, x), s A_t(t + s x, x) + A_x(t + s x, x)); differentiate in s.
    const std::function<double(double, double)> At = [](double t, double xx) { return std::sin(t) * xx + t * t; };
    const std::function<double(double, double)> Ax = [](double t, double xx) { return std::exp(0.3 * t) * xx * xx; };
    const double t0 = 0.4, x0 = 0.7, s = 1e-5;
    const auto pull_x = [&](double ss) { return ss * At(t0 + ss * x0, x0) + Ax(t0 + ss * x0, x0); };
    const double fd = (pull_x(s) - pull_x(-s)) / (2 * s);
    // the symbolic W^{A_x} evaluated on the same functions
    const double dAx_dt = 0.3 * std::exp(0.3 * t0) * x0 * x0;
    const double symbolic = x0 * dAx_dt + At(t0, x0);
    EXPECT_NEAR(fd, symbolic, 1e-8);
}

TEST(Cps, XiInvariance)
{
    const Model m = dsl::load_model(acceptance::corpus_path("scalar_neumann.cps"));
    const LagrangianPair lp = lagrangian_pair(m);
    const std::vector<Expr> dt{Expr(1), Expr(0)};
    EXPECT_TRUE(xi_invariance_residual(m.chart, lp, dt, lift_vector_field(m, dt)).is_zero());
    const std::vector<Expr> tdt{Expr::coord(0), Expr(0)};
    EXPECT_FALSE(xi_invariance_residual(m.chart, lp, tdt, lift_vector_field(m, tdt)).is_zero());
    // the Robin coefficient f(t) is a formal function of t
    const Model robin = dsl::load_model(acceptance::corpus_path("scalar_robin.cps"));
    const RelForm rr = xi_invariance_residual(robin.chart, lagrangian_pair(robin), dt, lift_vector_field(robin, dt));
    EXPECT_TRUE(rr.bulk.is_zero());
    EXPECT_FALSE(rr.boundary.is_zero());

    // Chern-Simons is invariant under any tangent vector field.
    const Model cs = dsl::load_model(acceptance::corpus_path("cs_k1.cps"));
    const LagrangianPair lpc = lagrangian_pair(cs);
    const Expr t = Expr::coord(0), y = Expr::coord(1), xx = Expr::coord(2);
    const std::vector<std::vector<Expr>> tangents{
        {t * y + Expr(2), y * y - t, Expr(0)},
        {xx * y, Rational(1, 3) * t * t * xx + y, Expr(0)},
        {Expr(1) + xx * xx, t * y * xx, Expr(0)},
    };
    for (const auto& xi : tangents)
        EXPECT_TRUE(xi_invariance_residual(cs.chart, lpc, xi, lift_vector_field(cs, xi)).is_zero());
}

TEST(Cps, NoetherCurrentOfTimeTranslationIsTheEnergy)
{
    const Model m = scalar("L = (1/2*inner(d(u), d(u)) + u^4/4)*vol;");
    const LagrangianPair lp = lagrangian_pair(m);
    const VariationDecomposition v = decompose(m.chart, lp, m.labels());
    const std::vector<Expr> dt{Expr(1), Expr(0)};
    const NoetherData nd = noether_current_xi(m.chart, lp, v, dt, lift_vector_field(m, dt));
    const Expr energy = Rational(1, 2) * u({0}).pow(2) + Rational(1, 2) * u({1}).pow(2) + Rational(1, 4) * u().pow(4);
    const Form expected = energy * Form::dx(1);
    EXPECT_TRUE(nd.slice_current == expected || nd.slice_current == -expected) << nd.slice_current.str();
    EXPECT_TRUE(nd.flux_residual.is_zero());
}

TEST(Cps, NoetherCurrentIsLinearInXi)
{
    const Model m = dsl::load_model(acceptance::corpus_path("scalar_robin.cps"));
    const LagrangianPair lp = lagrangian_pair(m);
    const VariationDecomposition v = decompose(m.chart, lp, m.labels());
    auto current = [&](const std::vector<Expr>& xi) {
        return noether_current_xi(m.chart, lp, v, xi, lift_vector_field(m, xi)).current;
    };
    EXPECT_TRUE(current({Expr(0), Expr(0)}).is_zero());
    const std::vector<Expr> a{Expr(1), Expr(0)};
    const std::vector<Expr> b{Expr::coord(0), Expr(0)};
    const std::vector<Expr> ab{Expr(1) + Expr::coord(0), Expr(0)};
    const RelForm ja = current(a), jb = current(b), jab = current(ab);
    EXPECT_EQ(jab.bulk, ja.bulk + jb.bulk);
    EXPECT_EQ(jab.boundary, ja.boundary + jb.boundary);
}

TEST(Cps, DSymmetryDecisions)
{
    const Model m = dsl::load_model(acceptance::corpus_path("scalar_neumann.cps"));
    const LagrangianPair lp = lagrangian_pair(m);
    const std::vector<Expr> dt{Expr(1), Expr(0)};
    const DSymmetryResult r = d_symmetry_check(m.chart, lp, lift_vector_field(m, dt), &dt);
    EXPECT_TRUE(r.is_symmetry);
    EXPECT_EQ(r.method, "iota_xi");
    EXPECT_TRUE(r.certificate.is_zero());

    const Model free = scalar("L = 1/2*inner(d(u), d(u))*vol;");
    const DSymmetryResult shift = d_symmetry_check(free.chart, lagrangian_pair(free), {{"u", Expr(1)}});
    EXPECT_TRUE(shift.is_symmetry);
    EXPECT_TRUE(shift.certificate.is_zero());

    const Model massive = scalar("L = (1/2*inner(d(u), d(u)) + 1/2*u^2)*vol;");
    const DSymmetryResult scale = d_symmetry_check(massive.chart, lagrangian_pair(massive), {{"u", u()}});
    EXPECT_FALSE(scale.is_symmetry);
    EXPECT_FALSE(scale.obstruction.is_zero());
}

TEST(Cps, ZeroFieldIsGauge)
{
    const Model m = dsl::load_model(acceptance::corpus_path("cs_k1.cps"));
    const LagrangianPair lp = lagrangian_pair(m);
    const VariationDecomposition v = decompose(m.chart, lp, m.labels());
    const OnShellIdeals ideals = build_ideals(m.chart, lp, v, m.constraints);
    EvolutionaryField W;
    for (const auto& l : m.labels()) W[l] = Expr(0);
    const GaugeResidual g = gauge_residual(m.chart, lp, v, W, ideals);
    EXPECT_TRUE(g.bulk_raw.is_zero());
    EXPECT_TRUE(g.boundary_raw.is_zero());
    EXPECT_TRUE(g.is_gauge());
}

TEST(Cps, CorpusCertificates)
{
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(acceptance::corpus_path(""))) {
        if (entry.path().extension() != ".cps") continue;
        const std::string name = entry.path().stem().string();
        if (name == "lagrange_multiplier_L3") continue;
        const PipelineReport r = run_cps(dsl::load_model(entry.path().string()));
        EXPECT_TRUE(r.certificates_zero()) << name;
        EXPECT_TRUE(r.omega.closed) << name;
        ++seen;
    }
    EXPECT_GE(seen, 15);
}
