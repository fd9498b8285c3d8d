#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <string>

#include "fran/scenario.hpp"
#include "fran/topology.hpp"

namespace fran::testing {

inline std::string scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::path(FRAN_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

inline ChannelSet paper_channels(std::uint64_t seed, const ScenarioConfig& cfg = {})
{
    return sample_channels(generate_topology(cfg, seed), cfg, seed + 1000);
}

/// Channels for a single UE whose D2D gains are set directly.
inline ChannelSet flat_channels(int num_rrh, int antennas, int num_ue)
{
    ChannelSet ch;
    ch.num_rrh = num_rrh;
    ch.antennas_per_rrh = antennas;
    ch.h.assign(num_ue, Eigen::VectorXcd::Zero(num_rrh * antennas));
    ch.g_d2d = Eigen::VectorXd::Constant(num_ue, 1e-2);
    ch.g_cross = Eigen::MatrixXd::Constant(num_ue, num_ue, 1e-4);
    ch.g_cross.diagonal().setZero();
    return ch;
}

inline ScenarioConfig tiny_scenario(int num_rrh, int antennas, int num_ue)
{
    ScenarioConfig cfg;
    cfg.num_rrh = num_rrh;
    cfg.antennas_per_rrh = antennas;
    cfg.num_ue = num_ue;
    cfg.rho.assign(num_ue, 0.9);
    return cfg;
}

} // namespace fran::testing
