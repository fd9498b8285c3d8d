#include "fran/replay.hpp"

#include <algorithm>
#include <stdexcept>

namespace fran {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0) throw std::invalid_argument("replay memory capacity must be positive");
    items_.reserve(capacity);
}

void ReplayMemory::push(Transition t)
{
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
        return;
    }
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayMemory::at(std::size_t i) const
{
    if (i >= items_.size()) throw std::out_of_range("replay memory index");
    return items_[(head_ + i) % items_.size()];
}

std::vector<const Transition*> ReplayMemory::sample(std::size_t n, Rng& rng) const
{
    if (n > items_.size()) throw std::length_error("replay memory holds fewer records than the batch size");
    std::vector<const Transition*> out;
    out.reserve(n);
    for (std::size_t i : sample_without_replacement(items_.size(), n, rng)) out.push_back(&items_[i]);
    return out;
}

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t n, Rng& rng)
{
    if (n > population) throw std::length_error("sample larger than population");
    std::vector<std::size_t> out;
    out.reserve(n);
    for (std::size_t j = population - n; j < population; ++j) {
        const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
        else out.push_back(j);
    }
    return out;
}

} // namespace fran
