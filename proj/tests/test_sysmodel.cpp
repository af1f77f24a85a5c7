#include "czest/scenario.hpp"
#include "czest/sysmodel.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace czest;

namespace
{

ConstrainedZonotope interval(int n, double r) { return from_box(Box(Vector::Constant(n, -r), Vector::Constant(n, r))); }

AgentModel agent(int id, int n, Matrix C, Matrix D, Matrix A = {})
{
    AgentModel a;
    a.id = id;
    a.A = TimeVaryingMatrix(A.size() ? A : Matrix(Matrix::Identity(n, n)));
    a.B = Matrix::Identity(n, n);
    a.C = std::move(C);
    a.D = std::move(D);
    a.W = interval(n, 1.0);
    a.V = interval(static_cast<int>(a.C.rows()), 1.0);
    a.R = interval(static_cast<int>(a.D.rows()), 0.5);
    return a;
}

MultiAgentSystem system_of(std::vector<AgentModel> agents, std::set<std::pair<int, int>> edges)
{
    MultiAgentSystem sys;
    const int n = static_cast<int>(agents.size());
    sys.agents = std::move(agents);
    sys.topology = Topology(n, std::move(edges));
    sys.validate();
    return sys;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

} // namespace

// ---------------------------------------------------------------------------
// Topology

TEST(Topology, NeighborhoodsAndInvolution)
{
    const Topology t(5, edges_from_neighbors(uav5_default_neighbors()));
    EXPECT_EQ(t.in_neighbors(2), (std::vector<int>{1, 3, 4}));
    EXPECT_EQ(t.closed_neighborhood(2), (std::vector<int>{2, 1, 3, 4}));
    EXPECT_EQ(t.closed_neighborhood(4), (std::vector<int>{4, 2, 3}));
    EXPECT_EQ(t.q(2), 4);
    for (int i = 1; i <= 5; ++i)
        for (int l = 1; l <= 5; ++l)
        {
            const auto m = t.out_neighbors(i);
            const auto n = t.in_neighbors(l);
            const bool out = std::find(m.begin(), m.end(), l) != m.end();
            const bool in = std::find(n.begin(), n.end(), i) != n.end();
            EXPECT_EQ(out, in) << i << " -> " << l;
        }
}

TEST(Topology, RejectsBadEdges)
{
    EXPECT_THROW(Topology(2, {{1, 1}}), std::invalid_argument);
    EXPECT_THROW(Topology(2, {{1, 3}}), std::invalid_argument);
    EXPECT_THROW(Topology(2, {}).in_neighbors(3), std::out_of_range);
}

// ---------------------------------------------------------------------------
// Stackings

TEST(BuildCentralized, SingleAgent)
{
    Matrix C(1, 2);
    C << 1, 0;
    Matrix A(2, 2);
    A << 1, 1, 0, 1;
    const auto sys = system_of({agent(1, 2, C, Matrix(0, 2), A)}, {});
    const auto s = build_centralized(sys, 0);
    EXPECT_EQ(s.A, A);
    EXPECT_EQ(s.H, C);
    EXPECT_EQ(s.Vset.dim(), 1);
    EXPECT_EQ(interval_hull(s.Vset).hi(0), 1.0);
}

TEST(BuildCentralized, RelativeRowBlock)
{
    // Edge (2, 1): agent 1 measures relative to agent 2.
    const Matrix I = Matrix::Identity(2, 2);
    const auto sys = system_of({agent(1, 2, I, I), agent(2, 2, I, I)}, {{2, 1}});
    const auto s = build_centralized(sys, 0);
    Matrix want = Matrix::Zero(6, 4);
    want.topLeftCorner(2, 2) = I;
    want.block(2, 2, 2, 2) = I;
    want.block(4, 0, 2, 2) = I;
    want.block(4, 2, 2, 2) = -I;
    EXPECT_EQ(s.H, want);
    const Box v = interval_hull(s.Vset);
    EXPECT_EQ(v.hi(0), 1.0);
    EXPECT_EQ(v.hi(4), 0.5);
}

TEST(BuildCentralized, UavScenarioIsBlockDiagonal)
{
    const auto cfg = build_uav_scenario();
    const auto s = build_centralized(cfg.system, 0);
    ASSERT_EQ(s.A.rows(), 20);
    const Matrix blk = cfg.system.agent(1).A.at(0);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
        {
            const Matrix b = s.A.block(4 * i, 4 * j, 4, 4);
            if (i == j) EXPECT_EQ(b, blk);
            else EXPECT_TRUE(b.isZero(0.0));
        }
    // Absolute rows (2 per agent) then 9 relative edges of 2 rows each.
    EXPECT_EQ(s.H.rows(), 10 + 2 * 9);
}

TEST(BuildNeighborhood, NoNeighbors)
{
    const auto sys = system_of({agent(1, 1, scalar(2), scalar(1)), agent(2, 1, scalar(1), scalar(1))}, {{1, 2}});
    const auto s = build_neighborhood(sys, 1, 0);
    EXPECT_EQ(s.H, scalar(2));
    EXPECT_EQ(s.Vset.dim(), 1);
}

TEST(BuildNeighborhood, OneNeighborScalar)
{
    const auto sys = system_of({agent(1, 1, scalar(3), scalar(1)), agent(2, 1, scalar(5), scalar(1))}, {{2, 1}});
    const auto s = build_neighborhood(sys, 1, 0);
    Matrix want(3, 2);
    want << 3, 0, 0, 5, 1, -1;
    EXPECT_EQ(s.H, want);
    EXPECT_THROW(build_neighborhood(sys, 3, 0), std::out_of_range);
}

TEST(BuildNeighborhood, UavAgentTwoOrder)
{
    const auto cfg = build_uav_scenario();
    const auto s = build_neighborhood(cfg.system, 2, 0);
    ASSERT_EQ(s.index_map.size(), 4u);
    const std::vector<int> want{2, 1, 3, 4};
    for (size_t t = 0; t < 4; ++t)
    {
        EXPECT_EQ(s.index_map[t].agent, want[t]);
        EXPECT_EQ(s.index_map[t].offset, static_cast<int>(4 * t));
    }
    EXPECT_EQ(cfg.system.topology.q(2), 4);
}

// Rows and columns of each neighborhood stacking are the centralized rows
// of the neighborhood's absolute measurements and i's relative
// measurements, restricted to the neighborhood's state blocks.
TEST(BuildNeighborhood, IsRestrictionOfCentralized)
{
    const auto cfg = build_uav_scenario();
    const auto& sys = cfg.system;
    const auto cen = build_centralized(sys, 3);
    const auto edges = detail::all_relative_edges(sys);
    for (int i = 1; i <= 5; ++i)
    {
        const auto nb = build_neighborhood(sys, i, 3);
        const auto order = sys.topology.closed_neighborhood(i);
        std::vector<int> rows, cols;
        for (int j : order)
            for (int r = 0; r < 2; ++r) rows.push_back(2 * (j - 1) + r);
        for (size_t e = 0; e < edges.size(); ++e)
            if (edges[e].first == i)
                for (int r = 0; r < 2; ++r) rows.push_back(10 + 2 * static_cast<int>(e) + r);
        for (int j : order)
            for (int c = 0; c < 4; ++c) cols.push_back(sys.state_offset(j) + c);
        ASSERT_EQ(nb.H.rows(), static_cast<Eigen::Index>(rows.size()));
        ASSERT_EQ(nb.H.cols(), static_cast<Eigen::Index>(cols.size()));
        for (size_t r = 0; r < rows.size(); ++r)
            for (size_t c = 0; c < cols.size(); ++c)
                EXPECT_EQ(nb.H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)), cen.H(rows[r], cols[c]));
        // Columns outside the neighborhood carry nothing in these rows.
        for (int r : rows)
            for (int c = 0; c < 20; ++c)
                if (std::find(cols.begin(), cols.end(), c) == cols.end()) EXPECT_EQ(cen.H(r, c), 0.0);
    }
}

TEST(Stacking, MatchesMeasureOutputs)
{
    const auto cfg = build_uav_scenario();
    const auto& sys = cfg.system;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep)
    {
        Vector x(20);
        for (int j = 0; j < 20; ++j) x(j) = 10 * u(rng);
        std::map<int, Vector> v;
        std::map<std::pair<int, int>, Vector> r;
        for (int i = 1; i <= 5; ++i)
        {
            v[i] = Vector(2);
            v[i] << u(rng), u(rng);
            for (int j : sys.topology.in_neighbors(i))
            {
                r[{i, j}] = Vector(2);
                r[{i, j}] << u(rng), u(rng);
            }
        }
        const auto batch = measure(sys, rep, x, v, r);
        std::vector<Vector> noise;
        for (int i = 1; i <= 5; ++i) noise.push_back(v[i]);
        for (const auto& e : detail::all_relative_edges(sys)) noise.push_back(r[e]);
        const Vector Y = build_centralized(sys, rep).H * x + vstack(std::span<const Vector>(noise));
        const Vector got = stack_measurements(sys, batch);
        EXPECT_LE((Y - got).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, Y.cwiseAbs().maxCoeff()));
    }
}

// ---------------------------------------------------------------------------
// Truth and measurements

TEST(StepTruth, Examples)
{
    const Matrix I = Matrix::Identity(2, 2);
    const auto sys = system_of({agent(1, 2, I, I)}, {});
    const Vector x = Vector::LinSpaced(2, 1.0, 2.0);
    EXPECT_EQ(step_truth(sys, 0, x, Vector::Zero(2)), x);

    auto a = agent(1, 1, scalar(1), scalar(1), scalar(2));
    const auto s1 = system_of({a}, {});
    EXPECT_DOUBLE_EQ(step_truth(s1, 0, Vector::Ones(1), Vector::Constant(1, 0.5))(0), 2.5);

    const auto uav = build_uav_scenario();
    EXPECT_TRUE(step_truth(uav.system, 0, Vector::Zero(20), Vector::Zero(10)).isZero(0.0));
    EXPECT_THROW(step_truth(uav.system, 0, Vector::Zero(3), Vector::Zero(10)), std::invalid_argument);
}

TEST(StepTruth, Linearity)
{
    const auto cfg = build_uav_scenario();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector x1(20), x2(20), w1(10), w2(10);
    for (int j = 0; j < 20; ++j) x1(j) = u(rng), x2(j) = u(rng);
    for (int j = 0; j < 10; ++j) w1(j) = 0.5 * u(rng), w2(j) = 0.5 * u(rng);
    const Vector lhs = step_truth(cfg.system, 4, x1 + x2, w1 + w2);
    const Vector rhs = step_truth(cfg.system, 4, x1, w1) + step_truth(cfg.system, 4, x2, w2);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Measure, Examples)
{
    const Matrix I = Matrix::Identity(2, 2);
    const auto sys = system_of({agent(1, 2, I, I), agent(2, 2, I, I)}, {{2, 1}});
    Vector x(4);
    x << 3, 4, 3, 4;
    std::map<int, Vector> v{{1, Vector::Zero(2)}, {2, Vector::Zero(2)}};
    std::map<std::pair<int, int>, Vector> r{{{1, 2}, Vector::Zero(2)}};
    auto b = measure(sys, 0, x, v, r);
    EXPECT_EQ(b.y.at(1), x.head(2));
    EXPECT_TRUE(b.z.at({1, 2}).isZero(0.0));

    x << 1, 2, 0, 0;
    r[{1, 2}] << 0.1, -0.1;
    b = measure(sys, 0, x, v, r);
    EXPECT_NEAR(b.z.at({1, 2})(0), 1.1, 1e-15);
    EXPECT_NEAR(b.z.at({1, 2})(1), 1.9, 1e-15);
}

// ---------------------------------------------------------------------------
// Observability

TEST(Observability, FullStateMeasured)
{
    const Matrix I = Matrix::Identity(2, 2);
    const auto sys = system_of({agent(1, 2, I, I), agent(2, 2, I, I)}, {{1, 2}});
    EXPECT_EQ(observability_index(sys, 0, 5), 1);
}

TEST(Observability, DoubleIntegrator)
{
    Matrix A(2, 2), C(1, 2);
    A << 1, 1, 0, 1;
    C << 1, 0;
    // Independent check: [C] has rank 1, [C; CA] = [[1,0],[1,1]] has rank 2.
    Matrix O(2, 2);
    O << C, C * A;
    ASSERT_EQ(Eigen::FullPivLU<Matrix>(O).rank(), 2);
    const auto sys = system_of({agent(1, 2, C, Matrix(0, 2), A)}, {});
    EXPECT_EQ(observability_index(sys, 0, 5), 2);
}

TEST(Observability, NotObservable)
{
    Matrix C(1, 2);
    C << 1, 0;
    const auto sys = system_of({agent(1, 2, C, Matrix(0, 2))}, {});
    EXPECT_THROW(observability_index(sys, 0, 6), NotObservableError);
}

TEST(Observability, UavWithinDefaultWindow)
{
    const auto cfg = build_uav_scenario();
    const int mu0 = observability_index(cfg.system, 0, 20);
    EXPECT_LE(mu0, cfg.delta_bar + 1);
    EXPECT_EQ(mu0, 2);
}

// ---------------------------------------------------------------------------
// Coordinated-turn family

TEST(CoordinatedTurn, EntriesAtZero)
{
    const double T = std::numbers::pi / 12;
    const Matrix blk = TimeVaryingMatrix::coordinated_turn_block(1.0, T, 0);
    EXPECT_NEAR(blk(0, 0), 1.25882, 1e-5);
    EXPECT_NEAR(blk(1, 1), 1.25882, 1e-5);
    EXPECT_NEAR(blk(0, 1), 0.03407, 1e-5);
    const auto a = uav_agent(1, 1.0, T);
    EXPECT_NEAR(a.B(0, 0), 0.03427, 1e-5);
    EXPECT_NEAR(a.B(1, 0), 0.26180, 1e-5);
    EXPECT_EQ(a.B(2, 1), a.B(0, 0));
    const Matrix A4 = a.A.at(0);
    EXPECT_EQ(A4.block(0, 0, 2, 2), blk);
    EXPECT_EQ(A4.block(2, 2, 2, 2), blk);
    EXPECT_TRUE(A4.block(0, 2, 2, 2).isZero(0.0));
}

TEST(AgentModel, ValidatesDimensions)
{
    auto a = agent(1, 2, Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    a.C = Matrix::Identity(2, 3);
    EXPECT_THROW(a.validate(), std::invalid_argument);
}
