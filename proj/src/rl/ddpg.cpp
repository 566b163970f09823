#include "emslab/rl/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "emslab/errors.hpp"

namespace emslab::rl {

using nlohmann::json;

namespace {

std::vector<std::size_t> full_sizes(std::size_t in,
                                    const std::vector<std::size_t>& hidden,
                                    std::size_t out) {
    std::vector<std::size_t> s;
    s.push_back(in);
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(out);
    return s;
}

std::vector<double> critic_input(const std::array<double, 4>& s, double a) {
    return {s[0], s[1], s[2], s[3], a};
}

} // namespace

DdpgAgent::DdpgAgent(const DdpgConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed), noise_sigma_(cfg.noise_sigma) {
    actor_ = make_mlp(full_sizes(4, cfg.actor_hidden, 1), /*tanh_output=*/true,
                      /*dropout_rate=*/0.0, rng_);
    critic_ = make_mlp(full_sizes(5, cfg.critic_hidden, 1),
                       /*tanh_output=*/false, cfg.dropout_rate, rng_);
    target_actor_ = actor_;
    target_critic_ = critic_;
    opt_actor_ = make_adam(actor_);
    opt_critic_ = make_adam(critic_);
}

double DdpgAgent::greedy_action(const Mlp& actor_net,
                                const std::array<double, 4>& obs) const {
    std::vector<double> in(obs.begin(), obs.end());
    // dropout is off for the actor; rng is untouched
    std::mt19937_64 scratch(0);
    const double o = forward(actor_net, in, false, scratch).front();
    return 0.5 * (o + 1.0);
}

double DdpgAgent::act(const std::array<double, 4>& obs, bool explore) {
    double a = greedy_action(actor_, obs);
    if (explore && noise_sigma_ > 0.0) {
        std::normal_distribution<double> gauss(0.0, noise_sigma_);
        a += gauss(rng_);
    }
    return std::clamp(a, 0.0, 1.0);
}

double DdpgAgent::target_q(const std::array<double, 4>& next_state,
                           int passes) {
    const double a = greedy_action(target_actor_, next_state);
    const auto in = critic_input(next_state, a);
    double acc = 0.0;
    for (int p = 0; p < passes; ++p) {
        acc += forward(target_critic_, in, true, rng_).front();
    }
    return acc / passes;
}

UpdateStats DdpgAgent::update(const std::vector<Transition>& batch,
                              const std::vector<double>& is_weights) {
    if (batch.empty()) fail(ErrorCategory::usage, "update() with empty batch");
    if (batch.size() != is_weights.size())
        fail(ErrorCategory::argument, "batch/is_weights size mismatch");
    const auto bsz = static_cast<double>(batch.size());

    UpdateStats stats;
    stats.td_errors.reserve(batch.size());

    // --- critic: importance-weighted squared TD error against the
    //     MC-dropout-averaged target
    MlpGrads critic_grads = zero_grads(critic_);
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = batch[i];
        double y = t.reward;
        if (!t.done) {
            y += cfg_.gamma * target_q(t.next_state, cfg_.mc_passes);
        }
        ForwardCache cache;
        const auto in = critic_input(t.state, t.action);
        const double q = forward(critic_, in, true, rng_, &cache).front();
        const double delta = y - q;
        loss += is_weights[i] * delta * delta;
        stats.td_errors.push_back(std::abs(delta));

        MlpGrads g =
            backward(critic_, cache, {-2.0 * is_weights[i] * delta / bsz});
        accumulate(critic_grads, g);
    }
    stats.critic_loss = loss / bsz;
    adam_step(critic_, opt_critic_, critic_grads, cfg_.critic_lr);

    // --- actor: ascend Q(s, actor(s)) through the (dropout-off) critic
    MlpGrads actor_grads = zero_grads(actor_);
    double q_sum = 0.0;
    std::mt19937_64 scratch(0);
    for (const Transition& t : batch) {
        std::vector<double> s(t.state.begin(), t.state.end());
        ForwardCache a_cache;
        const double o = forward(actor_, s, false, scratch, &a_cache).front();
        const double a = 0.5 * (o + 1.0);

        ForwardCache q_cache;
        const auto in = critic_input(t.state, a);
        const double q = forward(critic_, in, false, scratch, &q_cache).front();
        q_sum += q;

        const MlpGrads qg = backward(critic_, q_cache, {1.0});
        const double dq_da = qg.d_input[4];
        // d(-Q)/d(actor output): action = (o + 1) / 2
        MlpGrads g = backward(actor_, a_cache, {-dq_da * 0.5 / bsz});
        accumulate(actor_grads, g);
    }
    stats.actor_loss = -q_sum / bsz;
    adam_step(actor_, opt_actor_, actor_grads, cfg_.actor_lr);

    soft_update_net(actor_, target_actor_, cfg_.tau);
    soft_update_net(critic_, target_critic_, cfg_.tau);
    update_count_ += 1;

    if (!std::isfinite(stats.critic_loss) || !std::isfinite(stats.actor_loss) ||
        !finite_params(actor_) || !finite_params(critic_)) {
        fail(ErrorCategory::divergence,
             "non-finite loss or parameters during ddpg update");
    }
    return stats;
}

// --------------------------------------------------------------------------
// checkpointing
// --------------------------------------------------------------------------

namespace {

constexpr int kCheckpointVersion = 1;

json net_to_json(const Mlp& n) {
    json j;
    j["sizes"] = n.sizes;
    j["weights"] = n.weights;
    j["biases"] = n.biases;
    j["tanh_output"] = n.tanh_output;
    j["dropout_rate"] = n.dropout_rate;
    return j;
}

Mlp net_from_json(const json& j) {
    Mlp n;
    n.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    n.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    n.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    n.tanh_output = j.at("tanh_output").get<bool>();
    n.dropout_rate = j.at("dropout_rate").get<double>();

    if (n.sizes.size() < 2 || n.weights.size() != n.sizes.size() - 1 ||
        n.biases.size() != n.weights.size())
        fail(ErrorCategory::shape, "checkpoint: inconsistent layer counts");
    for (std::size_t l = 0; l < n.weights.size(); ++l) {
        if (n.weights[l].size() != n.sizes[l + 1] * n.sizes[l] ||
            n.biases[l].size() != n.sizes[l + 1])
            fail(ErrorCategory::shape,
                 "checkpoint: parameter shape mismatch in layer " +
                     std::to_string(l));
    }
    return n;
}

json adam_to_json(const AdamState& s) {
    json j;
    j["m_w"] = s.m_w;
    j["v_w"] = s.v_w;
    j["m_b"] = s.m_b;
    j["v_b"] = s.v_b;
    j["t"] = s.t;
    return j;
}

AdamState adam_from_json(const json& j, const Mlp& net) {
    AdamState s;
    s.m_w = j.at("m_w").get<std::vector<std::vector<double>>>();
    s.v_w = j.at("v_w").get<std::vector<std::vector<double>>>();
    s.m_b = j.at("m_b").get<std::vector<std::vector<double>>>();
    s.v_b = j.at("v_b").get<std::vector<std::vector<double>>>();
    s.t = j.at("t").get<std::int64_t>();
    if (s.m_w.size() != net.layers() || s.v_w.size() != net.layers())
        fail(ErrorCategory::shape, "checkpoint: optimizer shape mismatch");
    for (std::size_t l = 0; l < net.layers(); ++l) {
        if (s.m_w[l].size() != net.weights[l].size() ||
            s.m_b[l].size() != net.biases[l].size())
            fail(ErrorCategory::shape, "checkpoint: optimizer shape mismatch");
    }
    return s;
}

} // namespace

void DdpgAgent::save(const std::string& path) const {
    json j;
    j["version"] = kCheckpointVersion;
    j["actor"] = net_to_json(actor_);
    j["critic"] = net_to_json(critic_);
    j["target_actor"] = net_to_json(target_actor_);
    j["target_critic"] = net_to_json(target_critic_);
    j["opt_actor"] = adam_to_json(opt_actor_);
    j["opt_critic"] = adam_to_json(opt_critic_);
    j["noise_sigma"] = noise_sigma_;
    j["update_count"] = update_count_;

    std::ostringstream rng_text;
    rng_text << rng_;
    j["rng"] = rng_text.str();

    json cfg;
    cfg["actor_hidden"] = cfg_.actor_hidden;
    cfg["critic_hidden"] = cfg_.critic_hidden;
    cfg["dropout_rate"] = cfg_.dropout_rate;
    cfg["gamma"] = cfg_.gamma;
    cfg["tau"] = cfg_.tau;
    cfg["actor_lr"] = cfg_.actor_lr;
    cfg["critic_lr"] = cfg_.critic_lr;
    cfg["noise_sigma"] = cfg_.noise_sigma;
    cfg["noise_decay"] = cfg_.noise_decay;
    cfg["mc_passes"] = cfg_.mc_passes;
    cfg["batch_size"] = cfg_.batch_size;
    cfg["buffer_capacity"] = cfg_.buffer_capacity;
    cfg["alpha_per"] = cfg_.alpha_per;
    cfg["beta_per_initial"] = cfg_.beta_per_initial;
    cfg["beta_per_final"] = cfg_.beta_per_final;
    cfg["epsilon_per"] = cfg_.epsilon_per;
    j["config"] = cfg;

    std::ofstream out(path);
    if (!out) fail(ErrorCategory::io, "cannot write checkpoint: " + path);
    out << j.dump() << '\n';
    if (!out) fail(ErrorCategory::io, "checkpoint write failed: " + path);
}

DdpgAgent DdpgAgent::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCategory::io, "cannot open checkpoint: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorCategory::parse, path + ": " + e.what());
    }
    if (j.value("version", -1) != kCheckpointVersion)
        fail(ErrorCategory::shape, path + ": unsupported checkpoint version");

    DdpgAgent agent;
    const json& cfg = j.at("config");
    agent.cfg_.actor_hidden =
        cfg.at("actor_hidden").get<std::vector<std::size_t>>();
    agent.cfg_.critic_hidden =
        cfg.at("critic_hidden").get<std::vector<std::size_t>>();
    agent.cfg_.dropout_rate = cfg.at("dropout_rate").get<double>();
    agent.cfg_.gamma = cfg.at("gamma").get<double>();
    agent.cfg_.tau = cfg.at("tau").get<double>();
    agent.cfg_.actor_lr = cfg.at("actor_lr").get<double>();
    agent.cfg_.critic_lr = cfg.at("critic_lr").get<double>();
    agent.cfg_.noise_sigma = cfg.at("noise_sigma").get<double>();
    agent.cfg_.noise_decay = cfg.at("noise_decay").get<double>();
    agent.cfg_.mc_passes = cfg.at("mc_passes").get<int>();
    agent.cfg_.batch_size = cfg.at("batch_size").get<std::size_t>();
    agent.cfg_.buffer_capacity = cfg.at("buffer_capacity").get<std::size_t>();
    agent.cfg_.alpha_per = cfg.at("alpha_per").get<double>();
    agent.cfg_.beta_per_initial = cfg.at("beta_per_initial").get<double>();
    agent.cfg_.beta_per_final = cfg.at("beta_per_final").get<double>();
    agent.cfg_.epsilon_per = cfg.at("epsilon_per").get<double>();

    agent.actor_ = net_from_json(j.at("actor"));
    agent.critic_ = net_from_json(j.at("critic"));
    agent.target_actor_ = net_from_json(j.at("target_actor"));
    agent.target_critic_ = net_from_json(j.at("target_critic"));

    if (agent.actor_.input_size() != 4 || agent.actor_.output_size() != 1 ||
        agent.critic_.input_size() != 5 || agent.critic_.output_size() != 1)
        fail(ErrorCategory::shape, path + ": unexpected network interface sizes");
    if (agent.target_actor_.sizes != agent.actor_.sizes ||
        agent.target_critic_.sizes != agent.critic_.sizes)
        fail(ErrorCategory::shape, path + ": target/online shape mismatch");
    const auto expect_actor = full_sizes(4, agent.cfg_.actor_hidden, 1);
    const auto expect_critic = full_sizes(5, agent.cfg_.critic_hidden, 1);
    if (agent.actor_.sizes != expect_actor ||
        agent.critic_.sizes != expect_critic)
        fail(ErrorCategory::shape, path + ": config/network shape mismatch");

    agent.opt_actor_ = adam_from_json(j.at("opt_actor"), agent.actor_);
    agent.opt_critic_ = adam_from_json(j.at("opt_critic"), agent.critic_);
    agent.noise_sigma_ = j.at("noise_sigma").get<double>();
    agent.update_count_ = j.at("update_count").get<std::int64_t>();

    std::istringstream rng_text(j.at("rng").get<std::string>());
    rng_text >> agent.rng_;
    if (!rng_text) fail(ErrorCategory::parse, path + ": bad RNG state");
    return agent;
}

} // namespace emslab::rl
