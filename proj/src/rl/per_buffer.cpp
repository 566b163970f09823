#include "emslab/rl/per_buffer.hpp"

#include <algorithm>
#include <cmath>

#include "emslab/errors.hpp"

namespace emslab::rl {

PerBuffer::PerBuffer(std::size_t capacity, double alpha, double beta,
                     double epsilon)
    : capacity_(capacity), alpha_(alpha), beta_(beta), epsilon_(epsilon) {
    if (capacity == 0 || (capacity & (capacity - 1)) != 0)
        fail(ErrorCategory::argument, "PER capacity must be a power of two");
    if (alpha < 0.0 || beta < 0.0 || epsilon <= 0.0)
        fail(ErrorCategory::argument, "PER exponents/epsilon out of range");
    tree_.assign(2 * capacity_, 0.0);
    data_.resize(capacity_);
}

void PerBuffer::set_leaf(std::size_t slot, double priority_pow_alpha) {
    std::size_t node = capacity_ + slot;
    tree_[node] = priority_pow_alpha;
    for (node /= 2; node >= 1; node /= 2) {
        tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
        if (node == 1) break;
    }
}

std::size_t PerBuffer::find_leaf(double mass) const {
    std::size_t node = 1;
    while (node < capacity_) {
        const double left = tree_[2 * node];
        if (mass < left) {
            node = 2 * node;
        } else {
            mass -= left;
            node = 2 * node + 1;
        }
    }
    return node - capacity_;
}

void PerBuffer::insert(const Transition& t) {
    data_[next_] = t;
    set_leaf(next_, std::pow(max_priority_, alpha_));
    next_ = (next_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

PerSample PerBuffer::sample(std::size_t k, std::mt19937_64& rng) const {
    if (size_ == 0) fail(ErrorCategory::usage, "sample() from an empty buffer");
    if (k > size_)
        fail(ErrorCategory::usage, "sample size exceeds buffer size");

    const double total = tree_[1];
    PerSample out;
    out.indices.reserve(k);
    out.items.reserve(k);
    out.is_weights.reserve(k);

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double seg = total / static_cast<double>(k);
    const auto n = static_cast<double>(size_);
    double max_w = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        // stratified draw keeps the batch spread over the priority mass
        const double mass = (static_cast<double>(i) + u01(rng)) * seg;
        std::size_t slot = find_leaf(std::min(mass, total * (1.0 - 1e-12)));
        slot = std::min(slot, size_ - 1);  // guard unfilled slots
        const double p = tree_[capacity_ + slot] / total;
        const double w = std::pow(n * std::max(p, 1e-300), -beta_);
        out.indices.push_back(slot);
        out.items.push_back(data_[slot]);
        out.is_weights.push_back(w);
        max_w = std::max(max_w, w);
    }
    for (auto& w : out.is_weights) w /= max_w;
    return out;
}

void PerBuffer::update_priorities(const std::vector<std::size_t>& indices,
                                  const std::vector<double>& td_errors) {
    if (indices.size() != td_errors.size())
        fail(ErrorCategory::argument, "indices/td_errors size mismatch");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (!std::isfinite(td_errors[i]))
            fail(ErrorCategory::argument, "non-finite TD error");
        const double p = std::abs(td_errors[i]) + epsilon_;
        max_priority_ = std::max(max_priority_, p);
        set_leaf(indices[i], std::pow(p, alpha_));
    }
}

bool PerBuffer::check_tree_sums(double rel_tol) const {
    for (std::size_t node = 1; node < capacity_; ++node) {
        const double kids = tree_[2 * node] + tree_[2 * node + 1];
        const double scale = std::max({std::abs(tree_[node]), std::abs(kids), 1e-12});
        if (std::abs(tree_[node] - kids) > rel_tol * scale) return false;
    }
    return true;
}

} // namespace emslab::rl
