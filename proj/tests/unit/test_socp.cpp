#include <gtest/gtest.h>

#include <cmath>

#include "fran/rng.hpp"
#include "fran/socp.hpp"

using namespace fran;

TEST(Socp, SmallLinearProgram)
{
    // min -x1 - 2 x2  s.t.  x1 + x2 <= 4, x1 <= 3, x2 <= 3, x >= 0  ->  (1, 3), value -7
    ConicProgram p;
    p.c = Eigen::Vector2d(-1, -2);
    p.A.resize(0, 2);
    p.b.resize(0);
    p.G.resize(5, 2);
    p.G << 1, 1, 1, 0, 0, 1, -1, 0, 0, -1;
    p.h.resize(5);
    p.h << 4, 3, 3, 0, 0;
    p.cones.linear = 5;
    const ConicSolution s = solve_conic(p);
    ASSERT_EQ(s.status, SolverStatus::optimal) << s.message;
    EXPECT_NEAR(s.x(0), 1.0, 1e-7);
    EXPECT_NEAR(s.x(1), 3.0, 1e-7);
    EXPECT_NEAR(s.primal_objective, -7.0, 1e-7);
}

TEST(Socp, NormOfFixedVector)
{
    // min t  s.t.  ||(x1, x2)|| <= t,  x1 = 3, x2 = 4
    ConicProgram p;
    p.c = Eigen::Vector3d(1, 0, 0);
    p.A.resize(2, 3);
    p.A << 0, 1, 0, 0, 0, 1;
    p.b = Eigen::Vector2d(3, 4);
    p.G = -Eigen::Matrix3d::Identity();
    p.h = Eigen::Vector3d::Zero();
    p.cones.soc = {3};
    const ConicSolution s = solve_conic(p);
    ASSERT_EQ(s.status, SolverStatus::optimal) << s.message;
    EXPECT_NEAR(s.x(0), 5.0, 1e-7);
}

TEST(Socp, DistanceFromPointToHalfspace)
{
    // min t  s.t. ||x - q|| <= t,  a'x <= 1; closed form (a'q - 1) / ||a||
    const Eigen::Vector3d q(2.0, -1.0, 3.0), a(1.0, 2.0, 2.0);
    ConicProgram p;
    p.c = Eigen::Vector4d(1, 0, 0, 0);
    p.A.resize(0, 4);
    p.b.resize(0);
    p.G = Eigen::MatrixXd::Zero(5, 4);
    p.h = Eigen::VectorXd::Zero(5);
    p.G.row(0).tail(3) = a.transpose();
    p.h(0) = 1.0;
    p.G.block(1, 0, 4, 4) = -Eigen::Matrix4d::Identity();
    p.h.segment(2, 3) = -q;
    p.cones.linear = 1;
    p.cones.soc = {4};
    const ConicSolution s = solve_conic(p);
    ASSERT_EQ(s.status, SolverStatus::optimal) << s.message;
    EXPECT_NEAR(s.x(0), (a.dot(q) - 1.0) / a.norm(), 1e-7);
}

TEST(Socp, DetectsInfeasibility)
{
    // x >= 1 and x <= 0
    ConicProgram p;
    p.c = Eigen::VectorXd::Ones(1);
    p.A.resize(0, 1);
    p.b.resize(0);
    p.G.resize(2, 1);
    p.G << -1, 1;
    p.h = Eigen::Vector2d(-1, 0);
    p.cones.linear = 2;
    EXPECT_EQ(solve_conic(p).status, SolverStatus::infeasible);
}

TEST(Socp, RejectsInconsistentDimensions)
{
    ConicProgram p;
    p.c = Eigen::VectorXd::Ones(2);
    p.A.resize(0, 2);
    p.b.resize(0);
    p.G.resize(3, 2);
    p.h.resize(2);
    p.cones.linear = 3;
    EXPECT_THROW(p.check(), std::invalid_argument);
}

TEST(Socp, EveryCallReportsOneStatus)
{
    Rng rng(4);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 20; ++trial) {
        ConicProgram p;
        p.c = Eigen::VectorXd::NullaryExpr(3, [&] { return n01(rng); });
        p.A.resize(0, 3);
        p.b.resize(0);
        p.G = Eigen::MatrixXd::NullaryExpr(6, 3, [&] { return n01(rng); });
        p.h = Eigen::VectorXd::NullaryExpr(6, [&] { return n01(rng); });
        p.cones.linear = 2;
        p.cones.soc = {4};
        const SolverStatus st = solve_conic(p).status;
        EXPECT_TRUE(st == SolverStatus::optimal || st == SolverStatus::infeasible ||
                    st == SolverStatus::numerical_failure);
    }
}
