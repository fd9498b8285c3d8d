#pragma once

#include <vector>

#include "fran/qnetwork.hpp"
#include "fran/replay.hpp"
#include "fran/rng.hpp"

namespace fran {

/// Linear decay from `start` to `end` over `anneal_steps`, then constant.
struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.01;
    long anneal_steps = 3000;

    double value(long t) const;
};

/// Index of the largest entry; ties go to the lowest index.
int greedy_action(const Eigen::VectorXd& q);

/// Uniform action with probability epsilon(t), otherwise greedy.
int select_action(const QNetwork& net, const Eigen::VectorXd& state, long t, const EpsilonSchedule& sched, Rng& rng);

/// r for terminal samples, r + gamma * max_a' Q_target(s', a') otherwise. With
/// `taken_action` the bootstrap uses Q_target(s', a_t) instead of the max.
Eigen::VectorXd td_targets(const std::vector<const Transition*>& batch, const QNetwork& target, double gamma,
                           bool taken_action = false);

struct DqnConfig {
    std::vector<int> layer_dims{14, 24, 24, 96};
    double learning_rate = 1e-4;
    double gamma = 0.99;
    int batch_size = 32;
    std::size_t replay_capacity = 5000;
    bool taken_action_target = false;
};

/// Online network, target copy, optimizer and replay memory.
class DqnAgent {
public:
    DqnAgent(const DqnConfig& cfg, Rng& init_rng);
    /// Starts from given weights with a fresh optimizer and empty memory.
    DqnAgent(const DqnConfig& cfg, QNetwork initial);

    const DqnConfig& config() const { return cfg_; }
    QNetwork& online() { return online_; }
    const QNetwork& online() const { return online_; }
    const QNetwork& target() const { return target_; }
    const AdamState& optimizer() const { return adam_; }
    ReplayMemory& memory() { return memory_; }
    const ReplayMemory& memory() const { return memory_; }

    /// One mini-batch update; returns the mean squared TD error before the
    /// update. Throws std::length_error when the memory is smaller than a batch.
    double train_step(Rng& rng);
    void sync_target();

    long updates() const { return adam_.step_count; }
    long syncs() const { return syncs_; }

private:
    DqnConfig cfg_;
    QNetwork online_;
    QNetwork target_;
    AdamState adam_;
    ReplayMemory memory_;
    long syncs_ = 0;
};

} // namespace fran
