#include "cpsforge/jet.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace cpsforge;

namespace {

const Chart kTX({"t", "x"}, false, 8);
const Chart kTXb({"t", "x"}, true, 8);

Expr u(const MultiIndex& J = {}) { return Expr::jet("u", J); }
Expr v(const MultiIndex& J = {}) { return Expr::jet("v", J); }
Form vol2() { return Form::volume(2); }

} // namespace

TEST(Euler, WaveLagrangian)
{
    const Form L = (Rational(1, 2) * (u({0}).pow(2) - u({1}).pow(2))) * vol2();
    const SourceForm E = euler_operator(kTX, L);
    EXPECT_EQ(E.at("u"), (-u({0, 0}) + u({1, 1})) * vol2());
}

TEST(Euler, NullLagrangianAndPotential)
{
    const Form L = total_derivative(kTX, 0, u().pow(2)) * vol2();
    EXPECT_TRUE(euler_operator(kTX, L).at("u").is_zero());
    const Form P = Expr::func("V", {u()}) * vol2();
    EXPECT_EQ(euler_operator(kTX, P).at("u"), Expr::func("V", {u()}, {1}) * vol2());
}

TEST(IntegrateByParts, WaveLagrangianResidual)
{
    const Form L = (Rational(1, 2) * (u({0}).pow(2) - u({1}).pow(2))) * vol2();
    const IbpResult r = integrate_by_parts(kTX, L);
    EXPECT_TRUE(bulk_residual(kTX, L, r.E, r.Theta).is_zero());
    EXPECT_EQ(r.E.at("u"), euler_operator(kTX, L).at("u"));
    // Theta = u_t theta ^ dx + u_x theta ^ dt
    const Form expect = wedge(u({0}) * Form::theta("u"), Form::dx(1)) + wedge(u({1}) * Form::theta("u"), Form::dx(0));
    EXPECT_EQ(r.Theta, expect);
    EXPECT_TRUE(r.canonical);
}

TEST(IntegrateByParts, PotentialOnly)
{
    const Form L = Expr::func("V", {u()}) * vol2();
    const IbpResult r = integrate_by_parts(kTX, L);
    EXPECT_TRUE(r.Theta.is_zero());
}

TEST(IntegrateByParts, TwoFieldsOneDimension)
{
    const Chart x({"x"}, false, 6);
    const Form L = u({0}) * v({0}) * Form::volume(1);
    const IbpResult r = integrate_by_parts(x, L);
    EXPECT_EQ(r.E.at("u"), -v({0, 0}) * Form::volume(1));
    EXPECT_EQ(r.E.at("v"), -u({0, 0}) * Form::volume(1));
    EXPECT_TRUE(bulk_residual(x, L, r.E, r.Theta).is_zero());
}

TEST(IntegrateByParts, HigherOrderIsFlagged)
{
    const Form L = Rational(1, 2) * u({0, 0, 1}).pow(2) * vol2();
    const IbpResult r = integrate_by_parts(kTX, L);
    EXPECT_FALSE(r.canonical);
    EXPECT_TRUE(bulk_residual(kTX, L, r.E, r.Theta).is_zero());
}

TEST(BoundaryEuler, ScalarRobin)
{
    // Bulk 1/2(-u_t^2 + u_x^2) + V(u); boundary {x = 0}.
    const Form L = (Rational(1, 2) * (u({1}).pow(2) - u({0}).pow(2)) + Expr::func("V", {u()})) * vol2();
    const IbpResult r = integrate_by_parts(kTXb, L);
    const Expr f = Expr::func("f", {Expr::coord(0)});
    const Form ell = Rational(1, 2) * f * u().pow(2) * Form::dx(0);
    const Form jTheta = restrict_to_hyperplane(r.Theta, 1, Expr(0));
    const BoundaryDecomposition b = boundary_euler_operator(kTXb, ell, jTheta);
    // b = -(d_perp u - f u) vol_bar with d_perp = -d_x for the outward normal at x = 0.
    EXPECT_EQ(b.b_bar.at("u"), (u({1}) + f * u()) * Form::dx(0));
    EXPECT_TRUE(b.theta_bar.is_zero());
    EXPECT_TRUE(boundary_residual(kTXb, ell, jTheta, b).is_zero());
}

TEST(BoundaryEuler, TransversalContactIsRejected)
{
    const Form ell = u({1}) * Form::dx(0);
    try {
        (void)boundary_euler_operator(kTXb, ell, Form());
        FAIL() << "expected NonDecomposable";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonDecomposable);
        EXPECT_NE(e.detail().find("δu_x"), std::string::npos);
    }
}

TEST(BoundaryEuler, TangentialSweepProducesThetaBar)
{
    const Chart c({"t", "y", "x"}, true, 6);
    const Form ell = Rational(1, 2) * u({1}).pow(2) * Form::dx_word({0, 1});
    const BoundaryDecomposition b = boundary_euler_operator(c, ell, Form());
    EXPECT_EQ(b.b_bar.at("u"), -u({1, 1}) * Form::dx_word({0, 1}));
    EXPECT_FALSE(b.theta_bar.is_zero());
    EXPECT_TRUE(boundary_residual(c, ell, Form(), b).is_zero());
}

TEST(JetProperties, NullLagrangians)
{
    for (int n = 1; n <= 3; ++n) {
        std::vector<std::string> names{"t", "x", "y"};
        names.resize(static_cast<std::size_t>(n));
        const Chart chart(names, false, 8);
        testgen::Gen g(100 + static_cast<std::uint64_t>(n), n, 2);
        for (int k = 0; k < 40; ++k) {
            const Form Y = g.form(n - 1, 0, 2, 0);
            const SourceForm E = euler_operator(chart, d_H(chart, Y), {"u", "v"});
            for (const auto& [a, e] : E) ASSERT_TRUE(e.is_zero()) << Y.str();
        }
    }
}

TEST(JetProperties, LinearityAndResidual)
{
    testgen::Gen g(7, 2, 2);
    for (int k = 0; k < 60; ++k) {
        const Form L1 = g.form(2, 0, 2, 0);
        const Form L2 = g.form(2, 0, 2, 0);
        const SourceForm a = euler_operator(kTX, L1, {"u", "v"});
        const SourceForm b = euler_operator(kTX, L2, {"u", "v"});
        const SourceForm s = euler_operator(kTX, L1 + L2, {"u", "v"});
        for (const auto& f : {"u", "v"}) ASSERT_EQ(s.at(f), a.at(f) + b.at(f));
        const IbpResult r = integrate_by_parts(kTX, L1, {"u", "v"});
        ASSERT_TRUE(bulk_residual(kTX, L1, r.E, r.Theta).is_zero());
        for (const auto& f : {"u", "v"}) ASSERT_EQ(r.E.at(f), a.at(f));
    }
}
