#include "emslab/rl/mlp.hpp"

#include <cmath>

#include "emslab/errors.hpp"
#include "emslab/kernels/kernels.hpp"

namespace emslab::rl {

namespace k = emslab::kernels;

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += weights[l].size() + biases[l].size();
    return n;
}

Mlp make_mlp(const std::vector<std::size_t>& sizes, bool tanh_output,
             double dropout_rate, std::mt19937_64& rng) {
    if (sizes.size() < 2)
        fail(ErrorCategory::argument, "mlp needs at least input and output sizes");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        fail(ErrorCategory::argument, "dropout_rate must be in [0,1)");

    Mlp net;
    net.sizes = sizes;
    net.tanh_output = tanh_output;
    net.dropout_rate = dropout_rate;
    const std::size_t depth = sizes.size() - 1;
    net.weights.resize(depth);
    net.biases.resize(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        const std::size_t fan_in = sizes[l];
        const std::size_t fan_out = sizes[l + 1];
        const bool last = l + 1 == depth;
        // a near-zero head keeps fresh tanh policies centered; value heads
        // get a full-scale init so feature learning is first-order from the
        // start
        const double lim =
            last && tanh_output
                ? 1e-3
                : std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> u(-lim, lim);
        net.weights[l].resize(fan_out * fan_in);
        net.biases[l].assign(fan_out, 0.0);
        for (auto& w : net.weights[l]) w = u(rng);
    }
    return net;
}

namespace {

void apply_activation(std::vector<double>& z, bool is_last, bool tanh_output) {
    if (!is_last || tanh_output) {
        for (auto& x : z) x = std::tanh(x);
    }
}

std::vector<double> run(const Mlp& net, const std::vector<double>& input,
                        bool dropout_on, std::mt19937_64* rng,
                        ForwardCache* cache, bool reuse_masks) {
    if (input.size() != net.input_size())
        fail(ErrorCategory::shape,
             "mlp input size " + std::to_string(input.size()) + " != " +
                 std::to_string(net.input_size()));

    const std::size_t depth = net.layers();
    const bool dropping = dropout_on && net.dropout_rate > 0.0;
    if (cache) {
        cache->inputs.assign(depth, {});
        cache->outputs.assign(depth, {});
        if (!reuse_masks) cache->masks.assign(depth, {});
    }

    std::vector<double> cur = input;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double keep_scale = 1.0 / (1.0 - net.dropout_rate);

    for (std::size_t l = 0; l < depth; ++l) {
        if (dropping) {
            if (reuse_masks) {
                const auto& mask = cache->masks[l];
                for (std::size_t i = 0; i < cur.size(); ++i) cur[i] *= mask[i];
            } else {
                std::vector<double> mask(cur.size());
                for (std::size_t i = 0; i < cur.size(); ++i) {
                    mask[i] = u01(*rng) < net.dropout_rate ? 0.0 : keep_scale;
                    cur[i] *= mask[i];
                }
                if (cache) cache->masks[l] = std::move(mask);
            }
        }
        if (cache) cache->inputs[l] = cur;

        std::vector<double> z(net.sizes[l + 1]);
        k::gemv(net.weights[l].data(), net.sizes[l + 1], net.sizes[l],
                cur.data(), net.biases[l].data(), z.data());
        apply_activation(z, l + 1 == depth, net.tanh_output);
        if (cache) cache->outputs[l] = z;
        cur = std::move(z);
    }
    if (cache) cache->valid = true;
    return cur;
}

} // namespace

std::vector<double> forward(const Mlp& net, const std::vector<double>& input,
                            bool dropout_on, std::mt19937_64& rng,
                            ForwardCache* cache) {
    return run(net, input, dropout_on, &rng, cache, false);
}

std::vector<double> forward_with_masks(const Mlp& net,
                                       const std::vector<double>& input,
                                       ForwardCache& cache) {
    const bool has_masks =
        !cache.masks.empty() && !cache.masks.front().empty();
    return run(net, input, has_masks, nullptr, &cache, has_masks);
}

MlpGrads zero_grads(const Mlp& net) {
    MlpGrads g;
    g.d_weights.resize(net.layers());
    g.d_biases.resize(net.layers());
    for (std::size_t l = 0; l < net.layers(); ++l) {
        g.d_weights[l].assign(net.weights[l].size(), 0.0);
        g.d_biases[l].assign(net.biases[l].size(), 0.0);
    }
    g.d_input.assign(net.input_size(), 0.0);
    return g;
}

MlpGrads backward(const Mlp& net, const ForwardCache& cache,
                  const std::vector<double>& upstream_grad) {
    if (!cache.valid)
        fail(ErrorCategory::usage, "backward() without a cached forward pass");
    if (upstream_grad.size() != net.output_size())
        fail(ErrorCategory::shape, "upstream gradient size mismatch");

    MlpGrads g = zero_grads(net);
    const std::size_t depth = net.layers();
    const bool dropping =
        !cache.masks.empty() && !cache.masks.front().empty();

    std::vector<double> delta = upstream_grad;  // d loss / d activation
    for (std::size_t li = depth; li-- > 0;) {
        const std::size_t rows = net.sizes[li + 1];
        const std::size_t cols = net.sizes[li];
        const auto& a = cache.outputs[li];
        const bool is_last = li + 1 == depth;

        // through the activation: tanh'(z) = 1 - a^2, identity for linear out
        if (!is_last || net.tanh_output) {
            for (std::size_t i = 0; i < rows; ++i) delta[i] *= 1.0 - a[i] * a[i];
        }

        const auto& in = cache.inputs[li];
        for (std::size_t i = 0; i < rows; ++i) {
            k::axpy(delta[i], in.data(), g.d_weights[li].data() + i * cols, cols);
            g.d_biases[li][i] += delta[i];
        }

        std::vector<double> prev(cols, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            k::axpy(delta[i], net.weights[li].data() + i * cols, prev.data(),
                    cols);
        }
        // the mask scaled the layer input, so it scales the gradient too
        if (dropping) {
            const auto& mask = cache.masks[li];
            for (std::size_t i = 0; i < cols; ++i) prev[i] *= mask[i];
        }
        delta = std::move(prev);
    }
    g.d_input = delta;
    return g;
}

void accumulate(MlpGrads& into, const MlpGrads& g) {
    for (std::size_t l = 0; l < into.d_weights.size(); ++l) {
        k::axpy(1.0, g.d_weights[l].data(), into.d_weights[l].data(),
                into.d_weights[l].size());
        k::axpy(1.0, g.d_biases[l].data(), into.d_biases[l].data(),
                into.d_biases[l].size());
    }
}

void scale_grads(MlpGrads& g, double s) {
    for (auto& w : g.d_weights)
        for (auto& x : w) x *= s;
    for (auto& b : g.d_biases)
        for (auto& x : b) x *= s;
}

AdamState make_adam(const Mlp& net) {
    AdamState s;
    s.m_w.resize(net.layers());
    s.v_w.resize(net.layers());
    s.m_b.resize(net.layers());
    s.v_b.resize(net.layers());
    for (std::size_t l = 0; l < net.layers(); ++l) {
        s.m_w[l].assign(net.weights[l].size(), 0.0);
        s.v_w[l].assign(net.weights[l].size(), 0.0);
        s.m_b[l].assign(net.biases[l].size(), 0.0);
        s.v_b[l].assign(net.biases[l].size(), 0.0);
    }
    return s;
}

void adam_step(Mlp& net, AdamState& opt, const MlpGrads& g, double lr) {
    opt.t += 1;
    const double inv_bc1 =
        1.0 / (1.0 - std::pow(opt.beta1, static_cast<double>(opt.t)));
    const double inv_bc2 =
        1.0 / (1.0 - std::pow(opt.beta2, static_cast<double>(opt.t)));
    for (std::size_t l = 0; l < net.layers(); ++l) {
        k::adam_update(net.weights[l].data(), opt.m_w[l].data(),
                       opt.v_w[l].data(), g.d_weights[l].data(),
                       net.weights[l].size(), lr, opt.beta1, opt.beta2, opt.eps,
                       inv_bc1, inv_bc2);
        k::adam_update(net.biases[l].data(), opt.m_b[l].data(),
                       opt.v_b[l].data(), g.d_biases[l].data(),
                       net.biases[l].size(), lr, opt.beta1, opt.beta2, opt.eps,
                       inv_bc1, inv_bc2);
    }
}

void soft_update_net(const Mlp& online, Mlp& target, double tau) {
    for (std::size_t l = 0; l < online.layers(); ++l) {
        k::soft_update(tau, online.weights[l].data(), target.weights[l].data(),
                       online.weights[l].size());
        k::soft_update(tau, online.biases[l].data(), target.biases[l].data(),
                       online.biases[l].size());
    }
}

bool finite_params(const Mlp& net) {
    for (const auto& w : net.weights)
        for (double x : w)
            if (!std::isfinite(x)) return false;
    for (const auto& b : net.biases)
        for (double x : b)
            if (!std::isfinite(x)) return false;
    return true;
}

} // namespace emslab::rl
