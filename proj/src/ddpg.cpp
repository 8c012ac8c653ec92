#include "graftrl/ddpg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "graftrl/rng.hpp"

namespace graftrl {

DdpgAgent::DdpgAgent(const DdpgConfig& cfg, Rng& rng) : cfg_(cfg) {
    if (cfg_.state_dim <= 0 || cfg_.action_dim <= 0) {
        throw std::invalid_argument("DdpgAgent: dimensions must be positive");
    }
    if (cfg_.action_low.size() != static_cast<std::size_t>(cfg_.action_dim) ||
        cfg_.action_high.size() != static_cast<std::size_t>(cfg_.action_dim)) {
        throw std::invalid_argument("DdpgAgent: action bounds must match action_dim");
    }
    action_center_.resize(cfg_.action_dim);
    action_half_.resize(cfg_.action_dim);
    for (int i = 0; i < cfg_.action_dim; ++i) {
        if (!(cfg_.action_low[i] < cfg_.action_high[i])) {
            throw std::invalid_argument("DdpgAgent: action_low must be below action_high");
        }
        action_center_(i) = 0.5 * (cfg_.action_low[i] + cfg_.action_high[i]);
        action_half_(i) = 0.5 * (cfg_.action_high[i] - cfg_.action_low[i]);
    }

    const std::vector<int> actor_widths{cfg_.state_dim, cfg_.hidden1, cfg_.hidden2,
                                        cfg_.action_dim};
    const std::vector<int> critic_widths{cfg_.state_dim + cfg_.action_dim, cfg_.hidden1,
                                         cfg_.hidden2, 1};
    actor_ = Mlp(actor_widths, OutputActivation::Tanh, rng, cfg_.final_init_scale);
    critic_ = Mlp(critic_widths, OutputActivation::Identity, rng, cfg_.final_init_scale);
    if (cfg_.zero_init_actor) {
        actor_.set_zero();
    }
    target_actor_ = actor_;
    target_critic_ = critic_;
    actor_opt_ = AdamOptimizer(actor_, cfg_.actor_lr);
    critic_opt_ = AdamOptimizer(critic_, cfg_.critic_lr);
    ou_state_ = Eigen::VectorXd::Zero(cfg_.action_dim);
}

void DdpgAgent::reset_noise() { ou_state_.setZero(); }

ActionVec DdpgAgent::map_to_bounds(const Eigen::VectorXd& raw) const {
    ActionVec a(static_cast<std::size_t>(cfg_.action_dim));
    for (int i = 0; i < cfg_.action_dim; ++i) {
        a[static_cast<std::size_t>(i)] = action_center_(i) + action_half_(i) * raw(i);
    }
    return a;
}

Eigen::VectorXd DdpgAgent::actor_raw(const StateVec& s) const {
    if (s.size() != static_cast<std::size_t>(cfg_.state_dim)) {
        throw std::invalid_argument("DdpgAgent::act: state dimension mismatch");
    }
    Eigen::MatrixXd x(1, cfg_.state_dim);
    for (int i = 0; i < cfg_.state_dim; ++i) {
        x(0, i) = s[static_cast<std::size_t>(i)];
    }
    return actor_.forward(x).row(0).transpose();
}

ActionVec DdpgAgent::act(const StateVec& s, bool explore, Rng& rng) {
    Eigen::VectorXd raw = actor_raw(s);
    ActionVec a = map_to_bounds(raw);
    if (explore) {
        for (int i = 0; i < cfg_.action_dim; ++i) {
            ou_state_(i) += cfg_.ou_theta * (0.0 - ou_state_(i)) + cfg_.ou_sigma * rng.gaussian();
            a[static_cast<std::size_t>(i)] += action_half_(i) * ou_state_(i);
        }
    }
    for (int i = 0; i < cfg_.action_dim; ++i) {
        a[static_cast<std::size_t>(i)] = std::clamp(a[static_cast<std::size_t>(i)],
                                                    cfg_.action_low[static_cast<std::size_t>(i)],
                                                    cfg_.action_high[static_cast<std::size_t>(i)]);
    }
    return a;
}

Eigen::MatrixXd DdpgAgent::batch_states(const std::vector<Transition>& batch) const {
    Eigen::MatrixXd x(batch.size(), cfg_.state_dim);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        for (int i = 0; i < cfg_.state_dim; ++i) {
            x(static_cast<Eigen::Index>(b), i) = batch[b].s[static_cast<std::size_t>(i)];
        }
    }
    return x;
}

Eigen::MatrixXd DdpgAgent::batch_state_actions(const std::vector<Transition>& batch) const {
    Eigen::MatrixXd x(batch.size(), cfg_.state_dim + cfg_.action_dim);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        for (int i = 0; i < cfg_.state_dim; ++i) {
            x(static_cast<Eigen::Index>(b), i) = batch[b].s[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < cfg_.action_dim; ++i) {
            x(static_cast<Eigen::Index>(b), cfg_.state_dim + i) =
                batch[b].a[static_cast<std::size_t>(i)];
        }
    }
    return x;
}

std::vector<double> DdpgAgent::critic_targets(const std::vector<Transition>& batch) const {
    if (batch.empty()) {
        throw std::invalid_argument("critic_targets: empty batch");
    }
    Eigen::MatrixXd s2(batch.size(), cfg_.state_dim);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        for (int i = 0; i < cfg_.state_dim; ++i) {
            s2(static_cast<Eigen::Index>(b), i) = batch[b].s_next[static_cast<std::size_t>(i)];
        }
    }
    const Eigen::MatrixXd raw2 = target_actor_.forward(s2);
    Eigen::MatrixXd x2(batch.size(), cfg_.state_dim + cfg_.action_dim);
    x2.leftCols(cfg_.state_dim) = s2;
    x2.rightCols(cfg_.action_dim) =
        (raw2 * action_half_.asDiagonal()).rowwise() + action_center_.transpose();
    const Eigen::MatrixXd q2 = target_critic_.forward(x2);

    std::vector<double> y(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        y[b] = batch[b].r;
        if (!batch[b].terminal) {
            y[b] += cfg_.gamma * q2(static_cast<Eigen::Index>(b), 0);
        }
    }
    return y;
}

double DdpgAgent::critic_loss(const std::vector<Transition>& batch,
                              const std::vector<double>& targets) const {
    const Eigen::MatrixXd q = critic_.forward(batch_state_actions(batch));
    double loss = 0.0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const double d = q(static_cast<Eigen::Index>(b), 0) - targets[b];
        loss += d * d;
    }
    return loss / static_cast<double>(batch.size());
}

double DdpgAgent::critic_loss_gradient(const std::vector<Transition>& batch,
                                       const std::vector<double>& targets,
                                       Mlp::Grads& out) const {
    Mlp::Cache cache;
    const Eigen::MatrixXd& q = critic_.forward(batch_state_actions(batch), cache);
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    Eigen::MatrixXd dq(batch.size(), 1);
    double loss = 0.0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const double d = q(static_cast<Eigen::Index>(b), 0) - targets[b];
        loss += d * d;
        dq(static_cast<Eigen::Index>(b), 0) = 2.0 * d * inv_n;
    }
    critic_.backward(cache, dq, out);
    return loss * inv_n;
}

double DdpgAgent::actor_objective(const std::vector<Transition>& batch) const {
    const Eigen::MatrixXd s = batch_states(batch);
    const Eigen::MatrixXd raw = actor_.forward(s);
    Eigen::MatrixXd x(batch.size(), cfg_.state_dim + cfg_.action_dim);
    x.leftCols(cfg_.state_dim) = s;
    x.rightCols(cfg_.action_dim) =
        (raw * action_half_.asDiagonal()).rowwise() + action_center_.transpose();
    return critic_.forward(x).col(0).mean();
}

double DdpgAgent::actor_objective_gradient(const std::vector<Transition>& batch,
                                           Mlp::Grads& out) const {
    const Eigen::MatrixXd s = batch_states(batch);
    Mlp::Cache actor_cache;
    const Eigen::MatrixXd& raw = actor_.forward(s, actor_cache);
    Eigen::MatrixXd x(batch.size(), cfg_.state_dim + cfg_.action_dim);
    x.leftCols(cfg_.state_dim) = s;
    x.rightCols(cfg_.action_dim) =
        (raw * action_half_.asDiagonal()).rowwise() + action_center_.transpose();
    Mlp::Cache critic_cache;
    const Eigen::MatrixXd& q = critic_.forward(x, critic_cache);
    const double objective = q.col(0).mean();

    Eigen::MatrixXd dq = Eigen::MatrixXd::Constant(
        static_cast<Eigen::Index>(batch.size()), 1, 1.0 / static_cast<double>(batch.size()));
    const Eigen::MatrixXd dx = critic_.backward_input(critic_cache, dq);
    // Only the action block feeds back into the actor; undo the affine map.
    const Eigen::MatrixXd draw = dx.rightCols(cfg_.action_dim) * action_half_.asDiagonal();
    actor_.backward(actor_cache, draw, out);
    return objective;
}

std::pair<double, double> DdpgAgent::train_step(const std::vector<Transition>& batch) {
    if (batch.empty()) {
        throw std::invalid_argument("train_step: empty batch");
    }
    const std::vector<double> targets = critic_targets(batch);

    Mlp::Grads critic_grads = critic_.zero_grads();
    const double closs = critic_loss_gradient(batch, targets, critic_grads);
    critic_opt_.step(critic_, critic_grads);

    Mlp::Grads ascent = actor_.zero_grads();
    const double objective = actor_objective_gradient(batch, ascent);
    for (std::size_t l = 0; l < ascent.dw.size(); ++l) {
        ascent.dw[l] = -ascent.dw[l];
        ascent.db[l] = -ascent.db[l];
    }
    actor_opt_.step(actor_, ascent);

    if (!std::isfinite(closs) || !std::isfinite(objective)) {
        throw TrainingDiverged("train_step: non-finite loss (critic=" + std::to_string(closs) +
                               ", actor=" + std::to_string(objective) + ")");
    }
    soft_update();
    return {closs, objective};
}

void DdpgAgent::soft_update() {
    const double tau = cfg_.tau;
    for (std::size_t l = 0; l < actor_.layer_count(); ++l) {
        target_actor_.weights(l) = tau * actor_.weights(l) + (1.0 - tau) * target_actor_.weights(l);
        target_actor_.biases(l) = tau * actor_.biases(l) + (1.0 - tau) * target_actor_.biases(l);
    }
    for (std::size_t l = 0; l < critic_.layer_count(); ++l) {
        target_critic_.weights(l) =
            tau * critic_.weights(l) + (1.0 - tau) * target_critic_.weights(l);
        target_critic_.biases(l) =
            tau * critic_.biases(l) + (1.0 - tau) * target_critic_.biases(l);
    }
}

// Checkpoint layout (all little-endian):
//   magic "DDPGNET1" (8 bytes), u32 network count (4)
//   per network (actor, critic, target_actor, target_critic):
//     u32 width count, u32 widths[], u8 output activation (0 tanh, 1 identity)
//     per layer: f64 weights row-major (out x in), f64 biases (out)
namespace {

constexpr char kMagic[8] = {'D', 'D', 'P', 'G', 'N', 'E', 'T', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) {
        buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    }
    out.write(buf, 4);
}

void put_f64(std::ofstream& out, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    char buf[8];
    for (int i = 0; i < 8; ++i) {
        buf[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    }
    out.write(buf, 8);
}

std::uint32_t take_u32(std::ifstream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    }
    return v;
}

double take_f64(std::ifstream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
        bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    }
    return std::bit_cast<double>(bits);
}

void write_net(std::ofstream& out, const Mlp& net) {
    put_u32(out, static_cast<std::uint32_t>(net.widths().size()));
    for (int w : net.widths()) {
        put_u32(out, static_cast<std::uint32_t>(w));
    }
    const char act = net.output_activation() == OutputActivation::Tanh ? 0 : 1;
    out.write(&act, 1);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const Eigen::MatrixXd& w = net.weights(l);
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                put_f64(out, w(i, j));
            }
        }
        const Eigen::VectorXd& b = net.biases(l);
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            put_f64(out, b(i));
        }
    }
}

void read_net(std::ifstream& in, Mlp& net) {
    const std::uint32_t n_widths = take_u32(in);
    if (n_widths != net.widths().size()) {
        throw std::runtime_error("checkpoint: width count mismatch");
    }
    for (std::size_t i = 0; i < n_widths; ++i) {
        if (take_u32(in) != static_cast<std::uint32_t>(net.widths()[i])) {
            throw std::runtime_error("checkpoint: layer width mismatch");
        }
    }
    char act = 0;
    in.read(&act, 1);
    const char expected = net.output_activation() == OutputActivation::Tanh ? 0 : 1;
    if (act != expected) {
        throw std::runtime_error("checkpoint: output activation mismatch");
    }
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        Eigen::MatrixXd& w = net.weights(l);
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                w(i, j) = take_f64(in);
            }
        }
        Eigen::VectorXd& b = net.biases(l);
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            b(i) = take_f64(in);
        }
    }
    if (!in) {
        throw std::runtime_error("checkpoint: truncated file");
    }
}

}  // namespace

void DdpgAgent::save_checkpoint(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("checkpoint: cannot open for writing: " + path);
    }
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, 4);
    write_net(out, actor_);
    write_net(out, critic_);
    write_net(out, target_actor_);
    write_net(out, target_critic_);
    if (!out) {
        throw std::runtime_error("checkpoint: write failed: " + path);
    }
}

void DdpgAgent::load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("checkpoint: cannot open for reading: " + path);
    }
    char magic[8];
    in.read(magic, 8);
    if (!in || !std::equal(magic, magic + 8, kMagic)) {
        throw std::runtime_error("checkpoint: bad magic: " + path);
    }
    if (take_u32(in) != 4) {
        throw std::runtime_error("checkpoint: unexpected network count");
    }
    read_net(in, actor_);
    read_net(in, critic_);
    read_net(in, target_actor_);
    read_net(in, target_critic_);
}

}  // namespace graftrl
