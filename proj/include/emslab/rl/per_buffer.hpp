#pragma once
#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace emslab::rl {

struct Transition {
    std::array<double, 4> state{};
    double action = 0.0;
    double reward = 0.0;
    std::array<double, 4> next_state{};
    bool done = false;
};

struct PerSample {
    std::vector<std::size_t> indices;      // slots, for update_priorities
    std::vector<Transition> items;
    std::vector<double> is_weights;        // normalized by the batch max
};

/// Proportional prioritized replay over a power-of-two sum tree.
///
/// Leaf i stores (|td_error_i| + epsilon)^alpha; internal nodes hold the sum
/// of their children, so sampling a mass uniform in [0, total) walks the tree
/// in O(log N). New transitions enter with the running max priority.
class PerBuffer {
public:
    /// capacity must be a power of two. beta is the initial importance-
    /// sampling exponent; anneal it with set_beta().
    PerBuffer(std::size_t capacity, double alpha, double beta, double epsilon);

    void insert(const Transition& t);

    /// Stratified proportional sample of k items. Throws Error(usage) when
    /// the buffer is empty or k > size().
    PerSample sample(std::size_t k, std::mt19937_64& rng) const;

    /// Reset the priorities of previously sampled slots from fresh TD errors.
    void update_priorities(const std::vector<std::size_t>& indices,
                           const std::vector<double>& td_errors);

    void set_beta(double beta) { beta_ = beta; }
    double beta() const { return beta_; }
    double alpha() const { return alpha_; }
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    double total_priority() const { return tree_[1]; }
    double max_priority() const { return max_priority_; }

    /// Every internal node equals the sum of its children within rel_tol.
    bool check_tree_sums(double rel_tol = 1e-6) const;

private:
    void set_leaf(std::size_t slot, double priority_pow_alpha);
    std::size_t find_leaf(double mass) const;

    std::size_t capacity_;
    double alpha_;
    double beta_;
    double epsilon_;
    double max_priority_ = 1.0;          // raw (pre-alpha) priority
    std::vector<double> tree_;           // 2 * capacity, root at [1]
    std::vector<Transition> data_;
    std::size_t size_ = 0;
    std::size_t next_ = 0;
};

} // namespace emslab::rl
