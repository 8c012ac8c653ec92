#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graftrl/experience.hpp"
#include "graftrl/mlp.hpp"

namespace graftrl {

class Rng;

// Raised when a training update produces a non-finite loss; the run aborts
// with diagnostics instead of silently continuing.
struct TrainingDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DdpgConfig {
    int state_dim = 1;
    int action_dim = 1;
    std::vector<double> action_low;   // per-dimension bounds
    std::vector<double> action_high;
    int hidden1 = 64;
    int hidden2 = 64;
    double gamma = 0.99;
    double tau = 0.001;
    double actor_lr = 1e-4;
    double critic_lr = 1e-3;
    double ou_theta = 0.15;
    double ou_sigma = 0.2;
    double final_init_scale = 3e-3;
    bool zero_init_actor = false;  // diagnostic: start from the constant midpoint policy
};

// Deterministic-policy actor-critic pair with target networks. The actor's
// tanh head is mapped affinely onto the action box; the critic consumes the
// mapped action, so stored actions and policy actions share one space.
class DdpgAgent {
public:
    DdpgAgent(const DdpgConfig& cfg, Rng& rng);

    // Policy action for one state. With explore set, Ornstein-Uhlenbeck noise
    // (evolved per call, scaled by the action half-range) is added and the
    // result is clamped to the action bounds.
    ActionVec act(const StateVec& s, bool explore, Rng& rng);

    // Clears the exploration noise state (call at episode start).
    void reset_noise();

    // Bellman targets: r + gamma * Q'(s', pi'(s')), or just r on terminal
    // transitions.
    std::vector<double> critic_targets(const std::vector<Transition>& batch) const;

    // One critic descent step (squared error to the Bellman targets), one
    // actor ascent step (mean critic value of the policy's actions), then a
    // soft target update. Returns (critic_loss, actor_objective) measured
    // before the update. Throws TrainingDiverged on non-finite losses.
    std::pair<double, double> train_step(const std::vector<Transition>& batch);

    // target <- tau * online + (1 - tau) * target, both networks.
    void soft_update();

    // Raw tanh head output in [-1,1]^action_dim, no noise, no affine map.
    Eigen::VectorXd actor_raw(const StateVec& s) const;

    // Affine map from the tanh head to the action box.
    ActionVec map_to_bounds(const Eigen::VectorXd& raw) const;

    // Loss/gradient surfaces, exposed for verification against finite
    // differences. Gradients are w.r.t. the respective network's parameters
    // in flatten_params() order. actor_objective_gradient returns the
    // gradient of the objective itself (the ascent direction).
    double critic_loss(const std::vector<Transition>& batch,
                       const std::vector<double>& targets) const;
    double critic_loss_gradient(const std::vector<Transition>& batch,
                                const std::vector<double>& targets, Mlp::Grads& out) const;
    double actor_objective(const std::vector<Transition>& batch) const;
    double actor_objective_gradient(const std::vector<Transition>& batch, Mlp::Grads& out) const;

    Mlp& actor() { return actor_; }
    const Mlp& actor() const { return actor_; }
    Mlp& critic() { return critic_; }
    const Mlp& critic() const { return critic_; }
    Mlp& target_actor() { return target_actor_; }
    const Mlp& target_actor() const { return target_actor_; }
    Mlp& target_critic() { return target_critic_; }
    const Mlp& target_critic() const { return target_critic_; }
    const DdpgConfig& config() const { return cfg_; }

    // Little-endian flat checkpoint of all four networks; see README for the
    // exact layout. Round-trips bit-exactly.
    void save_checkpoint(const std::string& path) const;
    void load_checkpoint(const std::string& path);

private:
    Eigen::MatrixXd batch_states(const std::vector<Transition>& batch) const;
    Eigen::MatrixXd batch_state_actions(const std::vector<Transition>& batch) const;

    DdpgConfig cfg_;
    Eigen::VectorXd action_center_;
    Eigen::VectorXd action_half_;
    Mlp actor_;
    Mlp critic_;
    Mlp target_actor_;
    Mlp target_critic_;
    AdamOptimizer actor_opt_;
    AdamOptimizer critic_opt_;
    Eigen::VectorXd ou_state_;
};

}  // namespace graftrl
