#include "cpsforge/relative.hpp"

#include <gtest/gtest.h>

using namespace cpsforge;

namespace {

const Chart kTX({"t", "x"}, true, 6);

Expr u(const MultiIndex& J = {}) { return Expr::jet("u", J); }

} // namespace

TEST(Pullback, DropsTransversalDirection)
{
    EXPECT_TRUE(pullback_boundary(kTX, Form::dx(1)).is_zero());
    EXPECT_EQ(pullback_boundary(kTX, u() * Form::dx(0)), u() * Form::dx(0));
    EXPECT_EQ(pullback_boundary(kTX, Expr::coord(1) * Form::dx(0) + u({1}) * Form::dx(0)), u({1}) * Form::dx(0));
    // j* d_H f = d_H j* f when f has no transversal jets and no x dependence
    const Form f = Form::scalar(u().pow(2) * Expr::coord(0) + u({0}));
    EXPECT_EQ(pullback_boundary(kTX, d_H(kTX, f)), d_H_boundary(kTX, pullback_boundary(kTX, f)));
}

TEST(RelD, Specializations)
{
    const Form a = Expr::coord(0) * Form::dx(1);
    const RelForm p{a, {}};
    EXPECT_EQ(rel_d(kTX, p), (RelForm{d_H(kTX, a), pullback_boundary(kTX, a)}));
    const Form b = Form::scalar(u());
    EXPECT_EQ(rel_d(kTX, RelForm{{}, b}), (RelForm{{}, -d_H_boundary(kTX, b)}));
    EXPECT_TRUE(rel_d(kTX, rel_d(kTX, RelForm{a, b})).is_zero());
}

TEST(RelWedge, HalfFormula)
{
    const RelForm p{Form::dx(0), {}};
    const RelForm q{{}, Form::scalar(Expr(1))};
    EXPECT_EQ(rel_wedge(kTX, p, q), (RelForm{{}, Rational(-1, 2) * Form::dx(0)}));
    const RelForm a{Form::dx(0), {}};
    const RelForm c{Form::dx(1), {}};
    EXPECT_EQ(rel_wedge(kTX, a, c), (RelForm{Form::volume(2), {}}));
}

TEST(RelIota, SignOnBoundary)
{
    const std::vector<Expr> d1{Expr(1), Expr(0)};
    EXPECT_EQ(rel_iota(kTX, d1, RelForm{Form::dx(0), {}}), (RelForm{Form::scalar(Expr(1)), {}}));
    EXPECT_EQ(rel_iota(kTX, d1, RelForm{{}, Form::dx(0)}), (RelForm{{}, Form::scalar(Expr(-1))}));
}

TEST(RelIota, NonTangentRejected)
{
    const std::vector<Expr> dx{Expr(0), Expr(1)};
    try {
        (void)rel_iota(kTX, dx, RelForm{Form::dx(0), {}});
        FAIL() << "expected NonTangent";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonTangent);
    }
    // x d/dx vanishes on {x = 0} and is accepted.
    const std::vector<Expr> xdx{Expr(0), Expr::coord(1)};
    EXPECT_NO_THROW((void)rel_lie(kTX, xdx, RelForm{Form::dx(0), {}}));
}
