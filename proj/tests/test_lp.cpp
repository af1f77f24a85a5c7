#include "czest/lp.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace czest;

namespace
{

lp::Problem box_problem(Vector c, Vector lo, Vector hi, lp::Sense sense = lp::Sense::Minimize)
{
    lp::Problem p;
    p.objective = std::move(c);
    p.eq_matrix = Matrix(0, p.objective.size());
    p.eq_rhs = Vector(0);
    p.lower = std::move(lo);
    p.upper = std::move(hi);
    p.sense = sense;
    return p;
}

} // namespace

TEST(Lp, MinimizeOverBox)
{
    const auto st = lp::solve(box_problem(Vector::Unit(2, 0), Vector::Constant(2, -1), Vector::Constant(2, 1)));
    ASSERT_TRUE(st.optimal());
    EXPECT_DOUBLE_EQ(st.value, -1.0);
    EXPECT_DOUBLE_EQ(st.point(0), -1.0);
}

TEST(Lp, InfeasibleEquality)
{
    lp::Problem p = box_problem(Vector::Ones(1), Vector::Constant(1, -1), Vector::Constant(1, 1));
    p.eq_matrix = Matrix::Ones(1, 1);
    p.eq_rhs = Vector::Constant(1, 5.0);
    EXPECT_EQ(lp::solve(p).outcome, lp::Outcome::Infeasible);
}

TEST(Lp, UnboundedFreeVariable)
{
    const auto st = lp::solve(box_problem(-Vector::Ones(1), Vector::Constant(1, -kInf), Vector::Constant(1, kInf)));
    EXPECT_EQ(st.outcome, lp::Outcome::Unbounded);
}

TEST(Lp, MaximizeSense)
{
    const auto st =
        lp::solve(box_problem(Vector::Ones(2), Vector::Constant(2, -1), Vector::Constant(2, 3), lp::Sense::Maximize));
    ASSERT_TRUE(st.optimal());
    EXPECT_DOUBLE_EQ(st.value, 6.0);
}

TEST(Lp, RejectsMalformedInput)
{
    lp::Problem p = box_problem(Vector::Ones(2), Vector::Constant(2, -1), Vector::Constant(2, 1));
    p.eq_matrix = Matrix::Ones(1, 3);
    p.eq_rhs = Vector::Ones(1);
    EXPECT_THROW(lp::solve(p), std::invalid_argument);
    p = box_problem(Vector::Ones(1), Vector::Constant(1, 2), Vector::Constant(1, 1));
    EXPECT_THROW(lp::solve(p), std::invalid_argument);
}

TEST(Lp, FixedVariableAndDegenerateRows)
{
    // x0 + x1 = 1 twice (redundant), x0 fixed at 0.25.
    lp::Problem p = box_problem(Vector::Unit(2, 1), Vector(Vector::Zero(2)), Vector::Ones(2));
    p.lower(0) = p.upper(0) = 0.25;
    p.eq_matrix = Matrix::Ones(2, 2);
    p.eq_rhs = Vector::Ones(2);
    const auto st = lp::solve(p);
    ASSERT_TRUE(st.optimal());
    EXPECT_NEAR(st.value, 0.75, 1e-12);
}

// Random bounded LPs against vertex enumeration.
TEST(Lp, MatchesVertexEnumeration)
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int feasible = 0;
    for (int trial = 0; trial < 300; ++trial)
    {
        const int n = 2 + static_cast<int>(rng() % 5);
        const int m = static_cast<int>(rng() % 3);
        Matrix A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = u(rng);
        Vector lo(n), hi(n), c(n), x0(n);
        for (int j = 0; j < n; ++j)
        {
            lo(j) = -1.0 - 0.5 * std::abs(u(rng));
            hi(j) = 1.0 + 0.5 * std::abs(u(rng));
            c(j) = u(rng);
            x0(j) = 1.6 * u(rng);
        }
        // Half the instances are feasible by construction.
        Vector b = A * x0;
        if (trial % 2) b += Vector::Constant(m, 3.0 * u(rng));
        lp::Problem p{c, A, b, lo, hi, lp::Sense::Minimize};
        const auto st = lp::solve(p);
        const auto ref = oracle::lp_min(c, A, b, lo, hi);
        ASSERT_EQ(st.optimal(), ref.has_value()) << "trial " << trial;
        if (!ref) continue;
        ++feasible;
        EXPECT_NEAR(st.value, *ref, 1e-8) << "trial " << trial;
        if (m > 0) EXPECT_LE((A * st.point - b).cwiseAbs().maxCoeff(), 1e-8);
    }
    EXPECT_GT(feasible, 100);
}

TEST(Lp, WorkspaceReoptimizesAndIsDeterministic)
{
    Matrix A(1, 3);
    A << 1, 1, 1;
    const Vector b = Vector::Constant(1, 1.0);
    const Vector lo = Vector::Constant(3, -1), hi = Vector::Constant(3, 1);
    lp::Workspace ws(A, b, lo, hi);
    ASSERT_TRUE(ws.feasible());
    for (int j = 0; j < 3; ++j)
    {
        const auto mn = ws.optimize(Vector::Unit(3, j), lp::Sense::Minimize);
        const auto mx = ws.optimize(Vector::Unit(3, j), lp::Sense::Maximize);
        EXPECT_NEAR(mn.value, -1.0, 1e-12);
        EXPECT_NEAR(mx.value, 1.0, 1e-12);
    }
    lp::Workspace again(A, b, lo, hi);
    const auto s1 = lp::Workspace(A, b, lo, hi).optimize(Vector::Unit(3, 2), lp::Sense::Minimize);
    const auto s2 = again.optimize(Vector::Unit(3, 2), lp::Sense::Minimize);
    EXPECT_EQ(s1.point, s2.point);
}

TEST(Lp, StartPointDoesNotChangeAnswer)
{
    Matrix A(2, 4);
    A << 1, 2, -1, 0.5, 0, 1, 1, -1;
    const Vector b(Vector::Constant(2, 0.3));
    const Vector lo = Vector::Constant(4, -1), hi = Vector::Constant(4, 1);
    Vector start(4);
    start << 0.9, -0.9, 0.2, 5.0;
    lp::Workspace cold(A, b, lo, hi), warm(A, b, lo, hi, &start);
    for (int j = 0; j < 4; ++j)
        EXPECT_NEAR(cold.optimize(Vector::Unit(4, j), lp::Sense::Maximize).value,
                    warm.optimize(Vector::Unit(4, j), lp::Sense::Maximize).value, 1e-10);
}
