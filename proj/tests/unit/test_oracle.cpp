#include <gtest/gtest.h>

#include <cmath>

#include "fran/environment.hpp"
#include "fran/oracle.hpp"
#include "fran/radio.hpp"
#include "support.hpp"

using namespace fran;

namespace {

Environment reduced_env(double rho, std::uint64_t seed = 1)
{
    const ScenarioConfig cfg = reduced_scenario(rho);
    return Environment(cfg, fran::testing::paper_channels(seed, cfg));
}

} // namespace

TEST(TabularMdp, ReducedScenarioShape)
{
    Environment env = reduced_env(0.8);
    const TabularMdp mdp = build_tabular_mdp(env);
    EXPECT_EQ(mdp.num_states, 64);
    EXPECT_EQ(mdp.num_actions, 16);
    for (int s = 0; s < 64; ++s)
        for (int a = 0; a < 16; ++a) {
            double total = 0.0;
            for (auto [next, p] : mdp.next(s, a)) total += p;
            EXPECT_NEAR(total, 1.0, 1e-9);
            EXPECT_LE(mdp.expected_reward(s, a), 0.0);
            EXPECT_TRUE(std::isfinite(mdp.expected_reward(s, a)));
        }
}

TEST(TabularMdp, TooLargeScenarioIsRejected)
{
    ScenarioConfig cfg;
    Environment env(cfg, fran::testing::paper_channels(1));
    EXPECT_THROW(build_tabular_mdp(env), std::invalid_argument);
}

TEST(TabularMdp, DeterministicCachesMatchStepRewards)
{
    for (double rho : {0.0, 1.0}) {
        Environment env = reduced_env(rho);
        const TabularMdp mdp = build_tabular_mdp(env);
        Rng rng(1);
        for (int s = 0; s < mdp.num_states; ++s)
            for (int a = 0; a < mdp.num_actions; ++a) {
                ASSERT_EQ(mdp.next(s, a).size(), 1u);
                const StepResult r = env.step(state_from_code(s, 2, 2), a, rng);
                EXPECT_EQ(mdp.expected_reward(s, a), r.reward);
                EXPECT_EQ(mdp.next(s, a).front().first, static_cast<int>(state_code(r.next)));
            }
    }
}

TEST(TabularMdp, AllD2dAllOffRewardEqualsStep)
{
    SystemState s = make_state(2, 2);
    s.ue_d2d = {true, true};
    s.cache = {true, true};
    // pick channels on which both D2D links meet the SINR target
    std::uint64_t seed = 1;
    for (;; ++seed) {
        ASSERT_LT(seed, 200u);
        const Environment probe = reduced_env(1.0, seed);
        if (d2d_sinr(0, s, probe.channels(), probe.config()) >= probe.config().sinr_target() &&
            d2d_sinr(1, s, probe.channels(), probe.config()) >= probe.config().sinr_target())
            break;
    }
    Environment env = reduced_env(1.0, seed);
    const TabularMdp mdp = build_tabular_mdp(env);
    const int a = encode_action({0, false, 0, true}, 2);
    Rng rng(3);
    const StepResult r = env.step(s, a, rng);
    EXPECT_FALSE(r.info.protecting_triggered);
    EXPECT_NEAR(r.reward, -2 * 20 * 0.1, 1e-12);
    EXPECT_EQ(mdp.expected_reward(static_cast<int>(state_code(s)), a), r.reward);
}

TEST(ValueIteration, GeometricSeries)
{
    TabularMdp mdp;
    mdp.num_states = 1;
    mdp.num_actions = 1;
    mdp.reward = {-3.0};
    mdp.outcomes = {{{0, 1.0}}};
    const ValueFunction vf = value_iteration(mdp, 0.9, 1e-12);
    EXPECT_NEAR(vf.v(0), -30.0, 1e-9);
    EXPECT_THROW(value_iteration(mdp, 1.0), std::invalid_argument);
}

TEST(ValueIteration, MyopicAndContraction)
{
    Environment env = reduced_env(0.8);
    const TabularMdp mdp = build_tabular_mdp(env);
    const ValueFunction myopic = value_iteration(mdp, 0.0);
    for (int s = 0; s < mdp.num_states; ++s) {
        double best = -1e300;
        for (int a = 0; a < mdp.num_actions; ++a) best = std::max(best, mdp.expected_reward(s, a));
        EXPECT_DOUBLE_EQ(myopic.v(s), best);
    }
    const ValueFunction vf = value_iteration(mdp, 0.99);
    EXPECT_LE(vf.residual, 1e-8);
    EXPECT_LE(vf.v.maxCoeff(), 0.0);
    for (std::size_t i = 2; i < vf.residual_history.size(); ++i)
        EXPECT_LE(vf.residual_history[i], vf.residual_history[i - 1] * (1 + 1e-12));
}

TEST(ValueIteration, HorizonPolicyReturnMatchesSimulation)
{
    Environment env = reduced_env(0.8);
    const ScenarioConfig& cfg = env.config();
    const TabularMdp mdp = build_tabular_mdp(env);
    const int T = cfg.steps_per_epoch;
    const FiniteHorizonValues fh = finite_horizon_values(mdp, 0.99, T);
    const SystemState s0 = initial_state(cfg);
    Rng rng(17);
    const int epochs = 10000;
    double total = 0.0;
    for (int e = 0; e < epochs; ++e) {
        SystemState s = s0;
        double disc = 1.0;
        for (int k = 0; k < T; ++k) {
            const int a = fh.policy[T - 1 - k][state_code(s)];
            const StepResult r = env.step(s, a, rng);
            total += disc * r.reward;
            disc *= 0.99;
            s = r.next;
        }
    }
    const double v0 = fh.v(state_code(s0));
    EXPECT_NEAR(total / epochs / v0, 1.0, 0.01);

    // the stationary infinite-horizon policy cannot beat the horizon optimum
    const ValueFunction vf = value_iteration(mdp, 0.99);
    EXPECT_LE(policy_horizon_value(mdp, vf.policy, 0.99, T)(state_code(s0)), v0 + 1e-9);
}

TEST(SingleLink, ClosedForm)
{
    EXPECT_NEAR(single_link_optimum(1e-8, std::sqrt(10.0), 1e-13), 3.16227766e-5, 1e-12);
    EXPECT_EQ(single_link_optimum(1e-8, 0.0, 1e-13), 0.0);
    EXPECT_DOUBLE_EQ(single_link_optimum(2e-8, 2.0, 1e-13), single_link_optimum(1e-8, 2.0, 1e-13) / 2);
    EXPECT_THROW(single_link_optimum(0.0, 2.0, 1e-13), std::invalid_argument);
}
