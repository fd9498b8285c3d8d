#pragma once

#include <cstdint>
#include <unordered_map>

namespace fran {

/// Tabular action values over integer state codes; unvisited entries are 0.
class QTable {
public:
    explicit QTable(int num_actions, double alpha = 0.1, double gamma = 0.99);

    int num_actions() const { return num_actions_; }
    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }

    double value(std::uint32_t state, int action) const;
    double max_value(std::uint32_t state) const;
    /// Lowest index among the maximisers.
    int greedy(std::uint32_t state) const;

    /// Q(s,a) <- (1 - alpha) Q(s,a) + alpha (r + gamma max_a' Q(s',a')); the
    /// bootstrap term is dropped when `terminal`.
    void update(std::uint32_t state, int action, double reward, std::uint32_t next_state, bool terminal = false);

    std::size_t size() const { return table_.size(); }

private:
    std::uint64_t key(std::uint32_t state, int action) const;

    int num_actions_;
    double alpha_;
    double gamma_;
    std::unordered_map<std::uint64_t, double> table_;
};

} // namespace fran
