#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fran/rng.hpp"
#include "fran/scenario.hpp"

namespace fran {

/// MDP state: processor on/off bits, UE mode bits (true = D2D) and the cache
/// state of each UE's paired transmitter (true = content available).
struct SystemState {
    std::vector<bool> processor_on;
    std::vector<bool> ue_d2d;
    std::vector<bool> cache;

    int num_processors() const { return static_cast<int>(processor_on.size()); }
    int num_ue() const { return static_cast<int>(ue_d2d.size()); }

    bool operator==(const SystemState&) const = default;
};

SystemState make_state(int num_processors, int num_ue);

/// Every UE in C-RAN mode, every processor on, every cache False.
SystemState initial_state(const ScenarioConfig& cfg);

/// Switches one processor and one UE; a target equal to the current value is a no-op.
struct ControlAction {
    int processor_index = 0;
    bool processor_on = false;
    int ue_index = 0;
    bool ue_d2d = false;

    bool operator==(const ControlAction&) const = default;
};

/// Flat index ((n * 2 + b) * 2M + (m * 2 + c)).
int encode_action(const ControlAction& a, int num_ue);
ControlAction decode_action(int index, int num_processors, int num_ue);

/// Processor bits, then mode bits, then cache bits, each 0 or 1.
Eigen::VectorXd encode_state(const SystemState& s);
SystemState decode_state(const Eigen::VectorXd& v, int num_processors, int num_ue);

/// Integer whose bit i is entry i of encode_state.
std::uint32_t state_code(const SystemState& s);
SystemState state_from_code(std::uint32_t code, int num_processors, int num_ue);

/// Throws std::out_of_range on a bad index.
SystemState apply_action(const SystemState& s, const ControlAction& a);

/// Each cache bit independently becomes True with probability rho[m].
SystemState transition_cache(const SystemState& s, std::span<const double> rho, Rng& rng);

std::uint32_t processor_mask(const SystemState& s);
std::uint32_t cran_mask(const SystemState& s); // bit m set when UE m is in C-RAN mode
double active_capacity(const SystemState& s, const ScenarioConfig& cfg);

} // namespace fran
