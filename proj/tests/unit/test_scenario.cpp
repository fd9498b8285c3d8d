#include <gtest/gtest.h>

#include <cmath>

#include "fran/scenario.hpp"
#include "fran/topology.hpp"

using namespace fran;

TEST(Scenario, DefaultsMatchReferenceSetup)
{
    ScenarioConfig cfg;
    EXPECT_EQ(cfg.num_processors(), 6);
    EXPECT_EQ(cfg.num_antennas(), 6);
    EXPECT_EQ(cfg.state_size(), 14);
    EXPECT_EQ(cfg.num_actions(), 96);
    EXPECT_DOUBLE_EQ(cfg.total_capacity(), 23.0);
    EXPECT_NEAR(cfg.sinr_target(), std::sqrt(10.0), 1e-12);
    EXPECT_NEAR(cfg.min_rate(), std::log2(1.0 + std::sqrt(10.0)), 1e-12);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Scenario, ValidationRejectsBadValues)
{
    ScenarioConfig cfg;
    cfg.rho[1] = 1.5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = ScenarioConfig{};
    cfg.processor_power[0] = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = ScenarioConfig{};
    cfg.num_ue = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Scenario, JsonRoundTripAndScalarRho)
{
    ScenarioConfig cfg = scenario_from_json(R"({"rho": 0.75, "steps_per_epoch": 12})");
    EXPECT_EQ(cfg.steps_per_epoch, 12);
    ASSERT_EQ(cfg.rho.size(), 4u);
    for (double r : cfg.rho) EXPECT_DOUBLE_EQ(r, 0.75);

    const ScenarioConfig back = scenario_from_json(scenario_to_json(cfg));
    EXPECT_EQ(fingerprint(back), fingerprint(cfg));
    EXPECT_NE(fingerprint(back), fingerprint(ScenarioConfig{}));
}

TEST(Scenario, UnknownKeyIsAnError)
{
    EXPECT_THROW(scenario_from_json(R"({"rhoo": 0.5})"), std::invalid_argument);
    EXPECT_THROW(scenario_from_json("[1, 2]"), std::invalid_argument);
}

TEST(Topology, RrhTriangleHasRequestedSpacing)
{
    ScenarioConfig cfg;
    const Topology t = generate_topology(cfg, 7);
    ASSERT_EQ(t.rrh_positions.size(), 3u);
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) EXPECT_NEAR(distance(t.rrh_positions[a], t.rrh_positions[b]), 800.0, 1e-9);
}

TEST(Topology, UesAndTransmittersInsideTheirDisks)
{
    ScenarioConfig cfg;
    Point centroid;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Topology t = generate_topology(cfg, seed);
        centroid = {};
        for (const auto& p : t.rrh_positions) {
            centroid.x += p.x / 3.0;
            centroid.y += p.y / 3.0;
        }
        for (int m = 0; m < cfg.num_ue; ++m) {
            EXPECT_LE(distance(t.ue_positions[m], centroid), cfg.ue_disk_radius + 1e-9);
            EXPECT_LE(distance(t.ue_positions[m], t.d2d_tx_positions[m]), cfg.d2d_max_distance + 1e-9);
        }
    }
}

TEST(Topology, DeterministicInSeed)
{
    ScenarioConfig cfg;
    const Topology a = generate_topology(cfg, 42), b = generate_topology(cfg, 42), c = generate_topology(cfg, 43);
    for (int m = 0; m < cfg.num_ue; ++m) {
        EXPECT_EQ(a.ue_positions[m].x, b.ue_positions[m].x);
        EXPECT_EQ(a.d2d_tx_positions[m].y, b.d2d_tx_positions[m].y);
    }
    EXPECT_NE(a.ue_positions[0].x, c.ue_positions[0].x);
}

TEST(Topology, ZeroD2dRadiusCoLocatesTransmitters)
{
    ScenarioConfig cfg;
    cfg.d2d_max_distance = 0.0;
    const Topology t = generate_topology(cfg, 3);
    for (int m = 0; m < cfg.num_ue; ++m) EXPECT_EQ(distance(t.ue_positions[m], t.d2d_tx_positions[m]), 0.0);
    EXPECT_THROW(sample_channels(t, cfg, 1), std::invalid_argument);
}

TEST(Channels, PathLossWithUnitFading)
{
    EXPECT_NEAR(std::norm(antenna_gain(100.0, 0.0, {1.0, 0.0})), 1e-4, 1e-18);
    EXPECT_NEAR(std::norm(antenna_gain(100.0, 10.0, {0.0, 1.0})), 1e-3, 1e-17);
}

TEST(Channels, D2dGainsDependOnlyOnDistance)
{
    ScenarioConfig cfg;
    Topology t = generate_topology(cfg, 11);
    t.d2d_tx_positions[0] = {t.ue_positions[0].x + 10.0, t.ue_positions[0].y};
    t.d2d_tx_positions[1] = {t.ue_positions[0].x + 1.0, t.ue_positions[0].y};
    const ChannelSet ch = sample_channels(t, cfg, 5);
    EXPECT_NEAR(ch.g_d2d(0), 0.01, 1e-15);
    EXPECT_NEAR(ch.g_cross(0, 1), 1.0, 1e-12);
    EXPECT_EQ(ch.g_cross(0, 0), 0.0);
}

TEST(Channels, MeanGainFollowsPathLossAndShadowing)
{
    // With shadowing off, E|h|^2 = d^-2; the fading average over many draws converges.
    ScenarioConfig cfg;
    cfg.shadow_std_db = 0.0;
    const Topology t = generate_topology(cfg, 2);
    const double d = distance(t.ue_positions[0], t.rrh_positions[0]);
    double sum = 0.0;
    const int draws = 4000;
    for (int s = 0; s < draws; ++s) {
        const ChannelSet ch = sample_channels(t, cfg, static_cast<std::uint64_t>(s));
        sum += std::norm(ch.gain(0, 0, 0)) + std::norm(ch.gain(0, 0, 1));
    }
    const double mean = sum / (2.0 * draws);
    // |r|^2 ~ Exp(1): relative standard error 1/sqrt(8000)
    EXPECT_NEAR(mean * d * d, 1.0, 4.0 / std::sqrt(2.0 * draws));
}
