#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Cholesky>

#include "fran/oracle.hpp"
#include "fran/precoder.hpp"
#include "fran/radio.hpp"
#include "support.hpp"

using namespace fran;
using fran::testing::flat_channels;
using fran::testing::paper_channels;
using fran::testing::tiny_scenario;

namespace {

std::vector<int> all_ues(int m)
{
    std::vector<int> u(m);
    for (int i = 0; i < m; ++i) u[i] = i;
    return u;
}

/// Minimum total power for SINR targets without per-antenna caps, from the
/// dual fixed point lambda_i = 1 / ((1 + 1/gamma) h_i^H (I + sum_j lambda_j h_j h_j^H)^-1 h_i)
/// on noise-normalised channels; the optimum equals sum_i lambda_i.
double dual_fixed_point_power(const std::vector<Eigen::VectorXcd>& h, double gamma, double noise)
{
    const int M = static_cast<int>(h.size());
    const int n = static_cast<int>(h[0].size());
    std::vector<Eigen::VectorXcd> hn;
    for (const auto& x : h) hn.push_back(x / std::sqrt(noise));
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(M);
    for (int it = 0; it < 100000; ++it) {
        Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(n, n);
        for (int j = 0; j < M; ++j) S += lambda(j) * hn[j] * hn[j].adjoint();
        const Eigen::LDLT<Eigen::MatrixXcd> ldlt(S);
        Eigen::VectorXd next(M);
        for (int i = 0; i < M; ++i)
            next(i) = 1.0 / ((1.0 + 1.0 / gamma) * hn[i].dot(ldlt.solve(hn[i])).real());
        const double change = (next - lambda).cwiseAbs().maxCoeff() / next.maxCoeff();
        lambda = next;
        if (change < 1e-15) break;
    }
    return lambda.sum();
}

} // namespace

TEST(InitPrecoding, EmptySetIsZero)
{
    ScenarioConfig cfg;
    const PrecodingSolution s = init_precoding({}, paper_channels(1), cfg);
    EXPECT_TRUE(s.feasible());
    EXPECT_EQ(s.total_tx_power, 0.0);
}

TEST(InitPrecoding, SingleLinkClosedForm)
{
    const ScenarioConfig cfg = tiny_scenario(1, 1, 1);
    ChannelSet ch = flat_channels(1, 1, 1);
    ch.h[0](0) = std::sqrt(1e-8);
    const std::vector<int> set{0};
    const PrecodingSolution s = init_precoding(set, ch, cfg);
    ASSERT_TRUE(s.feasible());
    const double expected = single_link_optimum(1e-8, cfg.sinr_target(), cfg.noise_power);
    EXPECT_NEAR(expected, 3.1623e-5, 1e-9);
    EXPECT_NEAR(s.total_tx_power / expected, 1.0, 1e-6);
}

TEST(InitPrecoding, ScalingChannelsScalesPowerInversely)
{
    const ScenarioConfig cfg = tiny_scenario(1, 2, 2);
    ChannelSet ch = flat_channels(1, 2, 2);
    ch.h[0] << std::complex<double>(3e-4, 0), 0.0;
    ch.h[1] << 0.0, std::complex<double>(0, 1e-4);
    const std::vector<int> set{0, 1};
    const double p1 = init_precoding(set, ch, cfg).total_tx_power;
    for (auto& h : ch.h) h *= 5.0;
    const double p2 = init_precoding(set, ch, cfg).total_tx_power;
    EXPECT_NEAR(p1 / p2, 25.0, 25.0 * 1e-6);
    // orthogonal channels: two independent links
    const double g = cfg.sinr_target() * cfg.noise_power;
    EXPECT_NEAR(p1 / (g / 9e-8 + g / 1e-8), 1.0, 1e-6);
}

TEST(InitPrecoding, SingleUeMatchesMaximumRatioTransmission)
{
    ScenarioConfig cfg;
    cfg.num_ue = 1;
    cfg.rho = {0.9};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ChannelSet ch = paper_channels(seed, cfg);
        const std::vector<int> set{0};
        const PrecodingSolution s = init_precoding(set, ch, cfg);
        ASSERT_TRUE(s.feasible());
        const double mrt = cfg.sinr_target() * cfg.noise_power / ch.h[0].squaredNorm();
        EXPECT_NEAR(s.total_tx_power / mrt, 1.0, 1e-6) << "seed " << seed;
    }
}

TEST(InitPrecoding, MultiUserMatchesDualFixedPoint)
{
    ScenarioConfig cfg;
    cfg.p_max = 1e6; // per-RRH caps inactive so the closed-form dual applies
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ChannelSet ch = paper_channels(seed, cfg);
        const PrecodingSolution s = init_precoding(all_ues(4), ch, cfg);
        ASSERT_TRUE(s.feasible());
        const double oracle = dual_fixed_point_power(ch.h, cfg.sinr_target(), cfg.noise_power);
        EXPECT_NEAR(s.total_tx_power / oracle, 1.0, 1e-6) << "seed " << seed;
    }
}

TEST(InitPrecoding, UnreachableTargetIsInfeasible)
{
    ScenarioConfig cfg = tiny_scenario(1, 1, 1);
    cfg.p_max = 1e-6;
    ChannelSet ch = flat_channels(1, 1, 1);
    ch.h[0](0) = 1e-6; // needs about 0.3 W
    const std::vector<int> set{0};
    EXPECT_EQ(init_precoding(set, ch, cfg).status, PrecodingStatus::infeasible);
}

TEST(Subproblem, InactiveBudgetRowEqualsRelaxation)
{
    ScenarioConfig cfg;
    const ChannelSet ch = paper_channels(2);
    const PrecodingSolution relaxed = init_precoding(all_ues(4), ch, cfg);
    SocpInstance inst;
    inst.ues = all_ues(4);
    inst.h = ch.h;
    inst.num_rrh = 3;
    inst.antennas_per_rrh = 2;
    inst.noise_power = cfg.noise_power;
    inst.sinr_target = cfg.sinr_target();
    inst.p_max = cfg.p_max;
    const SocpSolution plain = solve_subproblem(inst);
    ASSERT_EQ(plain.status, SolverStatus::optimal);
    EXPECT_NEAR(plain.power / relaxed.total_tx_power, 1.0, 1e-6);

    inst.has_budget = true;
    inst.theta.assign(4, Eigen::VectorXd::Zero(6));
    inst.budget = 1.0;
    const SocpSolution zero_weights = solve_subproblem(inst);
    ASSERT_EQ(zero_weights.status, SolverStatus::optimal);
    EXPECT_NEAR(zero_weights.power / relaxed.total_tx_power, 1.0, 1e-6);

    // weight every coefficient and allow 60% of the relaxed weighted l1 norm
    double l1 = 0.0;
    for (int m = 0; m < 4; ++m) l1 += relaxed.v[m].cwiseAbs().sum();
    inst.theta.assign(4, Eigen::VectorXd::Ones(6));
    inst.budget = 0.6 * l1;
    const SocpSolution tight = solve_subproblem(inst);
    if (tight.status == SolverStatus::optimal) {
        EXPECT_GE(tight.power, relaxed.total_tx_power * (1 - 1e-8));
        double used = 0.0;
        for (const auto& v : tight.v) used += v.cwiseAbs().sum();
        EXPECT_LE(used, inst.budget * (1 + 1e-6));
    } else {
        EXPECT_EQ(tight.status, SolverStatus::infeasible);
    }

    inst.budget = -1.0;
    EXPECT_EQ(solve_subproblem(inst).status, SolverStatus::infeasible);
}

TEST(Subproblem, PinnedCoefficientsAreExactlyZero)
{
    ScenarioConfig cfg;
    const ChannelSet ch = paper_channels(3);
    SocpInstance inst;
    inst.ues = all_ues(4);
    inst.h = ch.h;
    inst.num_rrh = 3;
    inst.antennas_per_rrh = 2;
    inst.noise_power = cfg.noise_power;
    inst.sinr_target = cfg.sinr_target();
    inst.p_max = cfg.p_max;
    inst.zero_mask.assign(4, std::vector<bool>(6, false));
    inst.zero_mask[0][1] = inst.zero_mask[2][4] = inst.zero_mask[3][0] = true;
    const SocpSolution s = solve_subproblem(inst);
    ASSERT_EQ(s.status, SolverStatus::optimal);
    EXPECT_EQ(s.v[0](1), std::complex<double>(0.0));
    EXPECT_EQ(s.v[2](4), std::complex<double>(0.0));
    EXPECT_EQ(s.v[3](0), std::complex<double>(0.0));
}

TEST(Reweighting, WeightsAndThreshold)
{
    PrecodingSolution p = zero_precoding(1, 1, 3);
    p.v[0] << 0.0, 1.0, std::complex<double>(0.0, 0.5);
    const ReweightState w = update_weights(p, 1e-6);
    EXPECT_NEAR(w.theta[0](0), 1e6, 1e-6);
    EXPECT_NEAR(w.theta[0](1), 1.0 / (1.0 + 1e-6), 1e-15);
    EXPECT_GT(w.theta[0](2), w.theta[0](1)); // antitone in |v|
    EXPECT_THROW(update_weights(p, 0.0), std::invalid_argument);

    PrecodingSolution q = zero_precoding(1, 1, 3);
    const double xi = 1e-6;
    q.v[0] << xi / 2, xi, 0.3;
    ZeroMask mask(1, std::vector<bool>(3, false));
    EXPECT_EQ(threshold_zeros(q, mask, xi), 1);
    EXPECT_TRUE(mask[0][0]);
    EXPECT_FALSE(mask[0][1]);
    EXPECT_EQ(q.v[0](0), std::complex<double>(0.0));
    EXPECT_EQ(threshold_zeros(q, mask, xi), 0); // mask never shrinks
    EXPECT_TRUE(mask[0][0]);
}

TEST(Optimize, PaperScaleIsFeasibleAndMonotone)
{
    ScenarioConfig cfg;
    const PrecoderOptions opts = precoder_options(cfg);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ChannelSet ch = paper_channels(seed);
        const PrecodingSolution s = optimize(all_ues(4), cfg.total_capacity(), ch, cfg, opts);
        ASSERT_TRUE(s.feasible()) << "seed " << seed;
        EXPECT_TRUE(s.converged);
        EXPECT_LE(s.computing_load, 23.0 + 1e-6);
        for (int k = 0; k < 3; ++k) EXPECT_LE(s.rrh_power(k), cfg.p_max + 1e-9);
        SystemState st = initial_state(cfg);
        for (int m = 0; m < 4; ++m)
            EXPECT_GE(cran_sinr(m, st, s, ch, cfg), cfg.sinr_target() * (1 - 1e-6));
        for (std::size_t i = 1; i < s.power_history.size(); ++i)
            EXPECT_LE(s.power_history[i], s.power_history[i - 1] + 1e-8);
        const PrecodingSolution relaxed = init_precoding(all_ues(4), ch, cfg, opts);
        EXPECT_GE(s.total_tx_power, relaxed.total_tx_power - 1e-8);
        for (int m = 0; m < 4; ++m)
            for (int j = 0; j < 6; ++j)
                if (s.v[m](j) != 0.0) EXPECT_GE(std::abs(s.v[m](j)), cfg.xi);
    }
}

TEST(Optimize, ZeroCapacityIsInfeasible)
{
    ScenarioConfig cfg;
    const PrecodingSolution s = optimize(all_ues(2), 0.0, paper_channels(1), cfg, precoder_options(cfg));
    EXPECT_EQ(s.status, PrecodingStatus::infeasible);
}

TEST(Optimize, CacheReturnsTheSameSolution)
{
    ScenarioConfig cfg;
    const ChannelSet ch = paper_channels(9);
    PrecodingCache cache(ch, cfg, precoder_options(cfg));
    const PrecodingSolution& a = cache.get(0b1011, 23.0);
    const PrecodingSolution direct = optimize(std::vector<int>{0, 1, 3}, 23.0, ch, cfg, precoder_options(cfg));
    EXPECT_EQ(a.total_tx_power, direct.total_tx_power);
    EXPECT_EQ(&cache.get(0b1011, 23.0), &a);
    EXPECT_EQ(cache.size(), 1u);
}

TEST(Optimize, DumpWritesOneFilePerSubproblem)
{
    ScenarioConfig cfg;
    PrecoderOptions opts = precoder_options(cfg);
    opts.dump_dir = fran::testing::scratch_dir("socp_dump");
    const PrecodingSolution s = optimize(all_ues(4), 23.0, paper_channels(0), cfg, opts);
    int files = 0;
    for (const auto& e : std::filesystem::directory_iterator(opts.dump_dir)) files += e.path().extension() == ".json";
    EXPECT_GE(files, s.iterations);
}
