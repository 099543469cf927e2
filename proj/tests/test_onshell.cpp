#include "cpsforge/onshell.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace cpsforge;

namespace {

const Chart kTX({"t", "x"}, true, 6);

Expr u(const MultiIndex& J = {}) { return Expr::jet("u", J); }

} // namespace

TEST(OnShell, WaveEquationLeaderAndProlongation)
{
    OnShellIdeal I(kTX);
    ASSERT_TRUE(I.add(u({0, 0}) - u({1, 1}), {0, 1}));
    EXPECT_EQ(I.reduce(u({0, 0})), u({1, 1}));
    EXPECT_EQ(I.reduce(u({0, 0, 1})), u({1, 1, 1}));
    EXPECT_EQ(I.reduce(u({0, 0, 0, 0})), u({1, 1, 1, 1}));
    // u_ttt = D_t u_xx = u_txx, which is already reduced
    EXPECT_EQ(I.reduce(u({0, 0, 0})), u({0, 1, 1}));
    EXPECT_EQ(I.reduce(Form::theta("u", {0, 0})), Form::theta("u", {1, 1}));
}

TEST(OnShell, TotalDerivativesOfGeneratorsReduceToZero)
{
    const Expr E = u({0, 0}) - u({1, 1}) + u().pow(3);
    OnShellIdeal I(kTX);
    ASSERT_TRUE(I.add(E, {0, 1}));
    EXPECT_TRUE(I.reduce(E).is_zero());
    EXPECT_TRUE(I.reduce(total_derivative(kTX, 0, E)).is_zero());
    EXPECT_TRUE(I.reduce(total_derivative_multi(kTX, MultiIndex{0, 1}, E)).is_zero());
    EXPECT_TRUE(I.reduce(u({1}) * E).is_zero());
}

TEST(OnShell, NonlinearLeaderIsKeptUnsolved)
{
    OnShellIdeal I(kTX);
    EXPECT_FALSE(I.add(u({0}).pow(2) + u(), {0}));
    EXPECT_EQ(I.unsolved().size(), 1u);
    EXPECT_EQ(I.reduce(u({0})), u({0}));
}

TEST(OnShell, BoundaryRulesOnlyUseTangentialDirections)
{
    OnShellIdeal B(kTX, true);
    ASSERT_TRUE(B.add(u({1}) + Rational(1, 2) * u(), {0}));
    EXPECT_EQ(B.reduce(u({1})), Rational(-1, 2) * u());
    EXPECT_EQ(B.reduce(u({0, 1})), Rational(-1, 2) * u({0}));
    // no prolongation across the boundary
    EXPECT_EQ(B.reduce(u({1, 1})), u({1, 1}));
}

TEST(OnShell, ReductionIsIdempotentOnRandomExpressions)
{
    OnShellIdeal I(kTX);
    ASSERT_TRUE(I.add(u({0, 0}) - u({1, 1}), {0, 1}));
    testgen::Gen g(99, 2, 3);
    g.fields = {"u"};
    for (int k = 0; k < 100; ++k) {
        const Expr e = g.expr(3, 3);
        const Expr r = I.reduce(e);
        EXPECT_EQ(I.reduce(r), r);
    }
}
