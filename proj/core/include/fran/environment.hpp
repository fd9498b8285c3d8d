#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "fran/precoder.hpp"
#include "fran/radio.hpp"
#include "fran/rng.hpp"
#include "fran/scenario.hpp"
#include "fran/state.hpp"
#include "fran/topology.hpp"

namespace fran {

/// UEs whose QoS fails: D2D UEs with an empty cache or SINR below target
/// (at the target is fine), and every C-RAN UE when `cran` is not feasible.
std::vector<int> check_qos(const SystemState& state, const PrecodingSolution& cran, const ChannelSet& ch,
                           const ScenarioConfig& cfg);

/// Turns every processor on and moves violating D2D UEs back to C-RAN.
/// An empty violator set leaves the state unchanged.
SystemState protecting_operation(const SystemState& state, const std::vector<int>& violators);

/// Deterministic outcome of serving one post-transition state.
struct Resolution {
    SystemState next; // after protection
    double reward = 0.0;
    EnergyBreakdown energy;
    bool penalized = false; // no feasible precoding even after protection
    PrecodingStatus precoding_status = PrecodingStatus::optimal;
};

struct StepResult {
    SystemState next;
    double reward = 0.0;
    EnergyBreakdown info;
    bool penalized = false;
};

/// One fog-RAN instance with frozen channels.
///
/// The outcome of a step depends only on the state after the action and the
/// cache draw, so it is memoised per state; precodings are memoised in a
/// PrecodingCache that several environments over the same channels may share.
class Environment {
public:
    Environment(ScenarioConfig cfg, ChannelSet ch, std::shared_ptr<PrecodingCache> cache = nullptr);

    const ScenarioConfig& config() const { return cfg_; }
    const ChannelSet& channels() const { return ch_; }
    const std::shared_ptr<PrecodingCache>& precoding_cache() const { return cache_; }

    SystemState initial_state() const { return fran::initial_state(cfg_); }

    StepResult step(const SystemState& state, const ControlAction& a, Rng& rng);
    StepResult step(const SystemState& state, int action_index, Rng& rng);

    /// QoS check, protection and energy accounting for a state whose action
    /// and cache transition have already been applied.
    const Resolution& resolve(const SystemState& post_transition);

    /// Replaces the channels and drops every memoised result.
    void set_channels(ChannelSet ch);
    void set_rho(std::vector<double> rho);

private:
    Resolution compute(const SystemState& s);

    ScenarioConfig cfg_;
    ChannelSet ch_;
    std::shared_ptr<PrecodingCache> cache_;
    std::unordered_map<std::uint32_t, Resolution> memo_;
};

} // namespace fran
