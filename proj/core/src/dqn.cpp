#include "fran/dqn.hpp"

#include <algorithm>
#include <stdexcept>

namespace fran {

double EpsilonSchedule::value(long t) const
{
    if (anneal_steps <= 0) return end;
    const double frac = static_cast<double>(std::clamp(t, 0L, anneal_steps)) / static_cast<double>(anneal_steps);
    return start - (start - end) * frac;
}

int greedy_action(const Eigen::VectorXd& q)
{
    if (q.size() == 0) throw std::invalid_argument("greedy action over an empty Q-vector");
    int best = 0;
    for (Eigen::Index i = 1; i < q.size(); ++i)
        if (q(i) > q(best)) best = static_cast<int>(i);
    return best;
}

int select_action(const QNetwork& net, const Eigen::VectorXd& state, long t, const EpsilonSchedule& sched, Rng& rng)
{
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u < sched.value(t)) return std::uniform_int_distribution<int>(0, net.output_size() - 1)(rng);
    return greedy_action(net.forward(state));
}

Eigen::VectorXd td_targets(const std::vector<const Transition*>& batch, const QNetwork& target, double gamma,
                           bool taken_action)
{
    if (batch.empty()) throw std::invalid_argument("TD targets of an empty batch");
    Eigen::MatrixXd next(target.input_size(), static_cast<Eigen::Index>(batch.size()));
    for (std::size_t j = 0; j < batch.size(); ++j) next.col(j) = batch[j]->next_state;
    const Eigen::MatrixXd q = target.forward_batch(next);

    Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
    for (std::size_t j = 0; j < batch.size(); ++j) {
        const Transition& tr = *batch[j];
        y(j) = tr.reward;
        if (!tr.terminal && gamma != 0.0) y(j) += gamma * (taken_action ? q(tr.action, j) : q.col(j).maxCoeff());
    }
    return y;
}

DqnAgent::DqnAgent(const DqnConfig& cfg, Rng& init_rng)
    : DqnAgent(cfg, QNetwork::random(cfg.layer_dims, init_rng))
{
}

DqnAgent::DqnAgent(const DqnConfig& cfg, QNetwork initial)
    : cfg_(cfg), online_(std::move(initial)), target_(online_), adam_(make_adam(online_, cfg.learning_rate)),
      memory_(cfg.replay_capacity)
{
    if (online_.layer_dims() != cfg_.layer_dims) throw std::invalid_argument("initial network has the wrong shape");
    if (cfg_.batch_size < 1) throw std::invalid_argument("batch size must be positive");
}

double DqnAgent::train_step(Rng& rng)
{
    const auto batch = memory_.sample(static_cast<std::size_t>(cfg_.batch_size), rng);
    const Eigen::VectorXd y = td_targets(batch, target_, cfg_.gamma, cfg_.taken_action_target);
    Eigen::MatrixXd X(online_.input_size(), static_cast<Eigen::Index>(batch.size()));
    std::vector<int> actions(batch.size());
    for (std::size_t j = 0; j < batch.size(); ++j) {
        X.col(j) = batch[j]->state;
        actions[j] = batch[j]->action;
    }
    LossAndGradients lg = gradients(online_, X, actions, y);
    adam_step(online_, lg.grads, adam_);
    return lg.loss;
}

void DqnAgent::sync_target()
{
    target_ = online_;
    ++syncs_;
}

} // namespace fran
