#pragma once

#include "fran/precoding_solution.hpp"
#include "fran/scenario.hpp"
#include "fran/state.hpp"
#include "fran/topology.hpp"

namespace fran {

/// Signal over interference-plus-noise for a C-RAN UE; interference comes
/// from every other UE in C-RAN mode. Throws std::invalid_argument for a
/// D2D-mode UE.
double cran_sinr(int m, const SystemState& state, const PrecodingSolution& V, const ChannelSet& ch,
                 const ScenarioConfig& cfg);
double cran_rate(int m, const SystemState& state, const PrecodingSolution& V, const ChannelSet& ch,
                 const ScenarioConfig& cfg);

/// Interference comes from the other active D2D links only.
double d2d_sinr(int m, const SystemState& state, const ChannelSet& ch, const ScenarioConfig& cfg);
double d2d_rate(int m, const SystemState& state, const ChannelSet& ch, const ScenarioConfig& cfg);

/// Coefficients with magnitude at or above `threshold`.
int count_nonzero(const Eigen::VectorXcd& v, double threshold);

/// beta * sum of C-RAN rates (taken from V.rates) + alpha * sum of nonzero coefficients.
double computing_load(const SystemState& state, const PrecodingSolution& V, const ScenarioConfig& cfg);

struct EnergyBreakdown {
    double processor_w = 0.0;
    double fronthaul_w = 0.0;
    double wireless_w = 0.0;
    double total_w = 0.0;
    bool protecting_triggered = false;
};

EnergyBreakdown system_energy(const SystemState& state, const PrecodingSolution& V, const ScenarioConfig& cfg);

} // namespace fran
