#pragma once

#include <memory>
#include <string>

#include "fran/dqn.hpp"
#include "fran/qnetwork.hpp"
#include "fran/qtable.hpp"
#include "fran/rng.hpp"
#include "fran/scenario.hpp"
#include "fran/state.hpp"

namespace fran {

/// `full` covers every (processor, target, UE, mode) combination;
/// `processor_only` switches one processor and keeps UE 0 in C-RAN mode.
enum class ActionSpace { full, processor_only };

const char* to_string(ActionSpace a);
ActionSpace action_space_from_string(const std::string& s);

int action_count(ActionSpace space, const ScenarioConfig& cfg);
ControlAction to_control(ActionSpace space, int index, const ScenarioConfig& cfg);

/// Round robin: processor (t mod N) off, UE (t mod M) to D2D.
ControlAction d2d_always_action(long t, const ScenarioConfig& cfg);
ControlAction random_action(Rng& rng, const ScenarioConfig& cfg);
/// Epsilon-greedy over a processor-only head.
ControlAction cran_only_action(const QNetwork& net, const Eigen::VectorXd& state_vec, long t,
                               const EpsilonSchedule& sched, Rng& rng, const ScenarioConfig& cfg);

enum class PolicyKind { drl, drl_cran_only, q_learning, d2d_always, random };

const char* to_string(PolicyKind k);
PolicyKind policy_kind_from_string(const std::string& s);

/// Maps a state and the step index within the epoch to an action.
class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyKind kind() const = 0;
    virtual ControlAction act(const SystemState& s, long t, Rng& rng) const = 0;
};

/// Greedy in a Q-network; the head size selects the action space.
class NetworkPolicy final : public Policy {
public:
    NetworkPolicy(QNetwork net, ActionSpace space, ScenarioConfig cfg);
    PolicyKind kind() const override;
    ControlAction act(const SystemState& s, long t, Rng& rng) const override;
    const QNetwork& network() const { return net_; }

private:
    QNetwork net_;
    ActionSpace space_;
    ScenarioConfig cfg_;
};

class QTablePolicy final : public Policy {
public:
    QTablePolicy(QTable table, ScenarioConfig cfg);
    PolicyKind kind() const override { return PolicyKind::q_learning; }
    ControlAction act(const SystemState& s, long t, Rng& rng) const override;

private:
    QTable table_;
    ScenarioConfig cfg_;
};

class D2dAlwaysPolicy final : public Policy {
public:
    explicit D2dAlwaysPolicy(ScenarioConfig cfg) : cfg_(std::move(cfg)) {}
    PolicyKind kind() const override { return PolicyKind::d2d_always; }
    ControlAction act(const SystemState& s, long t, Rng& rng) const override;

private:
    ScenarioConfig cfg_;
};

class RandomPolicy final : public Policy {
public:
    explicit RandomPolicy(ScenarioConfig cfg) : cfg_(std::move(cfg)) {}
    PolicyKind kind() const override { return PolicyKind::random; }
    ControlAction act(const SystemState& s, long t, Rng& rng) const override;

private:
    ScenarioConfig cfg_;
};

} // namespace fran
