#pragma once

#include <Eigen/Dense>
#include <vector>

namespace graftrl {

class Rng;

enum class OutputActivation { Tanh, Identity };

// Fully connected net with rectified-linear hidden layers. Rows of the input
// matrix are batch samples. Weights initialize uniformly at +-1/sqrt(fan_in)
// except the final layer, which uses +-final_init_scale.
class Mlp {
public:
    Mlp() = default;
    Mlp(std::vector<int> widths, OutputActivation out_act, Rng& rng, double final_init_scale);

    Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

    // Post-activation values per layer, kept for the backward pass.
    struct Cache {
        Eigen::MatrixXd input;
        std::vector<Eigen::MatrixXd> post;
    };
    const Eigen::MatrixXd& forward(const Eigen::MatrixXd& x, Cache& cache) const;

    struct Grads {
        std::vector<Eigen::MatrixXd> dw;
        std::vector<Eigen::VectorXd> db;
    };
    Grads zero_grads() const;

    // dy is the gradient w.r.t. the post-activation output. Accumulates
    // parameter gradients into `grads` and returns the input gradient.
    Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& dy, Grads& grads) const;

    // Same propagation without parameter gradients.
    Eigen::MatrixXd backward_input(const Cache& cache, const Eigen::MatrixXd& dy) const;

    std::size_t param_count() const;
    Eigen::VectorXd flatten_params() const;
    void unflatten_params(const Eigen::VectorXd& flat);
    void set_zero();

    const std::vector<int>& widths() const { return widths_; }
    OutputActivation output_activation() const { return out_act_; }
    std::size_t layer_count() const { return w_.size(); }
    Eigen::MatrixXd& weights(std::size_t layer) { return w_[layer]; }
    const Eigen::MatrixXd& weights(std::size_t layer) const { return w_[layer]; }
    Eigen::VectorXd& biases(std::size_t layer) { return b_[layer]; }
    const Eigen::VectorXd& biases(std::size_t layer) const { return b_[layer]; }

private:
    Eigen::MatrixXd apply_output_activation(Eigen::MatrixXd z) const;

    std::vector<int> widths_;
    OutputActivation out_act_ = OutputActivation::Identity;
    std::vector<Eigen::MatrixXd> w_;  // (out x in) per layer
    std::vector<Eigen::VectorXd> b_;
};

// Adam with per-tensor moment estimates, bias-corrected, descending.
class AdamOptimizer {
public:
    AdamOptimizer() = default;
    AdamOptimizer(const Mlp& net, double lr, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);
    void step(Mlp& net, const Mlp::Grads& grads);

private:
    double lr_ = 1e-3;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    long t_ = 0;
    std::vector<Eigen::MatrixXd> mw_, vw_;
    std::vector<Eigen::VectorXd> mb_, vb_;
};

}  // namespace graftrl
