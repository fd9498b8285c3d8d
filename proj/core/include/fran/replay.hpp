#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "fran/rng.hpp"

namespace fran {

struct Transition {
    Eigen::VectorXd state;
    int action = 0;
    double reward = 0.0;
    Eigen::VectorXd next_state;
    bool terminal = false;
};

/// Fixed-capacity FIFO of transitions; a full memory drops its oldest record.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity = 5000);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }

    /// i = 0 is the oldest stored record.
    const Transition& at(std::size_t i) const;

    /// Uniform sample of `n` distinct records. Throws std::length_error when
    /// fewer than `n` are stored.
    std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0; // slot of the oldest record once full
    std::vector<Transition> items_;
};

/// Floyd's algorithm: `n` distinct indices from [0, population), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t n, Rng& rng);

} // namespace fran
