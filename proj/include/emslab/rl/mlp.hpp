#pragma once
#include <cstdint>
#include <random>
#include <vector>

namespace emslab::rl {

/// Fully-connected net with tanh hidden layers. The output layer is tanh
/// for the actor and linear for the critic. Inverted dropout (survivors
/// scaled by 1/(1-rate)) can be applied in front of every layer.
struct Mlp {
    std::vector<std::size_t> sizes;            // e.g. {4, 100, 100, 1}
    std::vector<std::vector<double>> weights;  // per layer, row-major out x in
    std::vector<std::vector<double>> biases;
    bool tanh_output = false;
    double dropout_rate = 0.0;

    std::size_t layers() const { return weights.size(); }
    std::size_t input_size() const { return sizes.front(); }
    std::size_t output_size() const { return sizes.back(); }
    std::size_t param_count() const;
};

/// Everything backward() needs from the paired forward pass. `inputs[l]` is
/// the (post-dropout) input to layer l, `outputs[l]` its post-activation
/// output. `masks[l]` holds the per-unit dropout scale factors (0 for a
/// dropped unit) and is empty when dropout was off.
struct ForwardCache {
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> outputs;
    std::vector<std::vector<double>> masks;
    bool valid = false;
};

struct MlpGrads {
    std::vector<std::vector<double>> d_weights;
    std::vector<std::vector<double>> d_biases;
    std::vector<double> d_input;
};

/// Hidden layers use Xavier-uniform init; the output layer is near-zero so
/// fresh policies and value heads start flat.
Mlp make_mlp(const std::vector<std::size_t>& sizes, bool tanh_output,
             double dropout_rate, std::mt19937_64& rng);

/// Run the net. When dropout_on and dropout_rate > 0, fresh masks are drawn
/// from rng (deterministic given the rng state) and recorded in the cache.
std::vector<double> forward(const Mlp& net, const std::vector<double>& input,
                            bool dropout_on, std::mt19937_64& rng,
                            ForwardCache* cache = nullptr);

/// Re-run the net reusing the masks already present in the cache. Used for
/// finite-difference checks against a fixed dropout realization.
std::vector<double> forward_with_masks(const Mlp& net,
                                       const std::vector<double>& input,
                                       ForwardCache& cache);

/// Exact reverse-mode gradients of forward() for the cached pass.
/// Throws Error(usage) if the cache is not valid.
MlpGrads backward(const Mlp& net, const ForwardCache& cache,
                  const std::vector<double>& upstream_grad);

MlpGrads zero_grads(const Mlp& net);
void accumulate(MlpGrads& into, const MlpGrads& g);
void scale_grads(MlpGrads& g, double s);

/// Adam moments mirroring a net's parameter arrays.
struct AdamState {
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
    std::int64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam(const Mlp& net);
void adam_step(Mlp& net, AdamState& opt, const MlpGrads& g, double lr);

/// theta_target <- tau * theta + (1 - tau) * theta_target, all arrays.
void soft_update_net(const Mlp& online, Mlp& target, double tau);

/// True if every parameter is finite.
bool finite_params(const Mlp& net);

} // namespace emslab::rl
