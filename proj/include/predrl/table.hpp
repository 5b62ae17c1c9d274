#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace predrl {

// Dense [h][x][a] table. Steps are zero-based (h = 0 is the first step).
template <typename T>
class ActionTable {
public:
    ActionTable() = default;
    ActionTable(int horizon, int states, int actions, T init = T{})
        : horizon_(horizon), states_(states), actions_(actions),
          data_(static_cast<std::size_t>(horizon) * states * actions, init) {}

    int horizon() const { return horizon_; }
    int states() const { return states_; }
    int actions() const { return actions_; }

    T& operator()(int h, int x, int a) { return data_[index(h, x, a)]; }
    const T& operator()(int h, int x, int a) const { return data_[index(h, x, a)]; }

    std::span<T> row(int h, int x) {
        return {data_.data() + index(h, x, 0), static_cast<std::size_t>(actions_)};
    }
    std::span<const T> row(int h, int x) const {
        return {data_.data() + index(h, x, 0), static_cast<std::size_t>(actions_)};
    }

    std::vector<T>& raw() { return data_; }
    const std::vector<T>& raw() const { return data_; }

    bool same_shape(const ActionTable& other) const {
        return horizon_ == other.horizon_ && states_ == other.states_ && actions_ == other.actions_;
    }

    friend bool operator==(const ActionTable&, const ActionTable&) = default;

private:
    std::size_t index(int h, int x, int a) const {
        assert(h >= 0 && h < horizon_ && x >= 0 && x < states_ && a >= 0 && a < actions_);
        return (static_cast<std::size_t>(h) * states_ + x) * actions_ + a;
    }

    int horizon_ = 0;
    int states_ = 0;
    int actions_ = 0;
    std::vector<T> data_;
};

// Dense [h][x] table.
template <typename T>
class StateTable {
public:
    StateTable() = default;
    StateTable(int horizon, int states, T init = T{})
        : horizon_(horizon), states_(states),
          data_(static_cast<std::size_t>(horizon) * states, init) {}

    int horizon() const { return horizon_; }
    int states() const { return states_; }

    T& operator()(int h, int x) { return data_[index(h, x)]; }
    const T& operator()(int h, int x) const { return data_[index(h, x)]; }

    std::vector<T>& raw() { return data_; }
    const std::vector<T>& raw() const { return data_; }

    friend bool operator==(const StateTable&, const StateTable&) = default;

private:
    std::size_t index(int h, int x) const {
        assert(h >= 0 && h < horizon_ && x >= 0 && x < states_);
        return static_cast<std::size_t>(h) * states_ + x;
    }

    int horizon_ = 0;
    int states_ = 0;
    std::vector<T> data_;
};

// Index of the largest element; ties resolve to the lowest index.
template <typename Range>
int argmax_lowest(const Range& values) {
    int best = -1;
    int i = 0;
    for (const auto& v : values) {
        if (best < 0 || v > values[best]) best = i;
        ++i;
    }
    return best;
}

}  // namespace predrl
