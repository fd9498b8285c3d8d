#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fran/environment.hpp"
#include "fran/scenario.hpp"

namespace fran {

/// Two processors (21.6 W / 6 MOPTS and 6.4 W / 4 MOPTS), two UEs and two
/// RRHs with two antennas each; 64 states and 16 actions.
ScenarioConfig reduced_scenario(double rho = 0.8);

/// Enumerated MDP; state index = state_code.
struct TabularMdp {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> reward;                                // [s * A + a], expected over cache draws
    std::vector<std::vector<std::pair<int, double>>> outcomes; // [s * A + a] -> (next state, probability)

    double expected_reward(int s, int a) const { return reward[static_cast<std::size_t>(s) * num_actions + a]; }
    const std::vector<std::pair<int, double>>& next(int s, int a) const
    {
        return outcomes[static_cast<std::size_t>(s) * num_actions + a];
    }
};

/// Rewards come from env.resolve on every cache outcome, so they match the
/// environment exactly. Throws std::invalid_argument above `max_states`.
TabularMdp build_tabular_mdp(Environment& env, int max_states = 4096);

struct ValueFunction {
    Eigen::VectorXd v;
    std::vector<int> policy; // greedy, ties to the lowest action
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
};

/// Bellman backups until the sup-norm change is <= tol. Throws
/// std::invalid_argument for gamma outside [0, 1).
ValueFunction value_iteration(const TabularMdp& mdp, double gamma, double tol = 1e-8, int max_iters = 1000000);

/// Optimal expected discounted return over exactly `horizon` steps, and the
/// greedy action per (steps remaining, state): policy[k][s] is used with k+1
/// steps left.
struct FiniteHorizonValues {
    Eigen::VectorXd v;
    std::vector<std::vector<int>> policy;
};
FiniteHorizonValues finite_horizon_values(const TabularMdp& mdp, double gamma, int horizon);

/// Expected discounted return of a fixed stationary policy over `horizon` steps.
Eigen::VectorXd policy_horizon_value(const TabularMdp& mdp, const std::vector<int>& policy, double gamma, int horizon);

/// Minimum transmit power of a single interference-free link: gamma * noise / g.
/// Throws std::invalid_argument for g <= 0.
double single_link_optimum(double g, double sinr_target, double noise_power);

/// CSV with columns state,value,action.
void write_value_csv(const std::string& path, const ValueFunction& vf);

} // namespace fran
