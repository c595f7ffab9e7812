#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "capshare/policy/features.hpp"

namespace capshare::policy {

struct Transition {
    StateVector state{};
    std::size_t action = 0;
    double reward = 0.0;
    StateVector next_state{};

    bool operator==(const Transition &) const = default;
};

/// Fixed-capacity ring buffer; once full, each push evicts the oldest entry.
/// Storage grows on demand, so a large capacity costs nothing until used.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition &t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }

    // i = 0 is the oldest retained transition.
    const Transition &oldest(std::size_t i) const;

    /// `count` distinct indices drawn uniformly (Floyd's algorithm).
    std::vector<std::size_t> sample_indices(std::size_t count, std::mt19937_64 &rng) const;
    const Transition &at(std::size_t index) const { return items_[index]; }

private:
    std::size_t capacity_;
    std::size_t head_ = 0; // next slot to overwrite once full
    std::vector<Transition> items_;
};

} // namespace capshare::policy
