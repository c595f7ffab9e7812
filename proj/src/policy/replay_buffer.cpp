#include "capshare/policy/replay_buffer.hpp"

#include <stdexcept>
#include <unordered_set>

namespace capshare::policy {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
}

void ReplayBuffer::push(const Transition &t) {
    if (items_.size() < capacity_) {
        items_.push_back(t);
        return;
    }
    items_[head_] = t;
    head_ = (head_ + 1) % capacity_;
}

const Transition &ReplayBuffer::oldest(std::size_t i) const {
    if (i >= items_.size()) throw std::out_of_range("replay buffer index");
    return items_[(head_ + i) % items_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count,
                                                      std::mt19937_64 &rng) const {
    const std::size_t n = items_.size();
    if (count > n) throw std::invalid_argument("cannot sample more transitions than stored");
    std::vector<std::size_t> picked;
    picked.reserve(count);
    std::unordered_set<std::size_t> seen;
    seen.reserve(count * 2);
    for (std::size_t j = n - count; j < n; ++j) {
        std::uniform_int_distribution<std::size_t> pick(0, j);
        const std::size_t t = pick(rng);
        const std::size_t chosen = seen.contains(t) ? j : t;
        seen.insert(chosen);
        picked.push_back(chosen);
    }
    return picked;
}

} // namespace capshare::policy
