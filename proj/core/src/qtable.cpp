#include "fran/qtable.hpp"

#include <algorithm>
#include <stdexcept>

namespace fran {

QTable::QTable(int num_actions, double alpha, double gamma) : num_actions_(num_actions), alpha_(alpha), gamma_(gamma)
{
    if (num_actions < 1) throw std::invalid_argument("Q-table needs at least one action");
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("Q-table learning rate must lie in [0, 1]");
}

std::uint64_t QTable::key(std::uint32_t state, int action) const
{
    if (action < 0 || action >= num_actions_) throw std::out_of_range("Q-table action index");
    return static_cast<std::uint64_t>(state) * static_cast<std::uint64_t>(num_actions_) +
           static_cast<std::uint64_t>(action);
}

double QTable::value(std::uint32_t state, int action) const
{
    auto it = table_.find(key(state, action));
    return it == table_.end() ? 0.0 : it->second;
}

double QTable::max_value(std::uint32_t state) const
{
    double best = value(state, 0);
    for (int a = 1; a < num_actions_; ++a) best = std::max(best, value(state, a));
    return best;
}

int QTable::greedy(std::uint32_t state) const
{
    int best = 0;
    double best_v = value(state, 0);
    for (int a = 1; a < num_actions_; ++a) {
        const double v = value(state, a);
        if (v > best_v) {
            best = a;
            best_v = v;
        }
    }
    return best;
}

void QTable::update(std::uint32_t state, int action, double reward, std::uint32_t next_state, bool terminal)
{
    const double bootstrap = terminal ? 0.0 : gamma_ * max_value(next_state);
    double& q = table_[key(state, action)];
    q = (1.0 - alpha_) * q + alpha_ * (reward + bootstrap);
}

} // namespace fran
