#include "graftrl/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "graftrl/rng.hpp"

namespace graftrl {

Mlp::Mlp(std::vector<int> widths, OutputActivation out_act, Rng& rng, double final_init_scale)
    : widths_(std::move(widths)), out_act_(out_act) {
    if (widths_.size() < 2) {
        throw std::invalid_argument("Mlp: need at least input and output widths");
    }
    for (int w : widths_) {
        if (w <= 0) {
            throw std::invalid_argument("Mlp: widths must be positive");
        }
    }
    const std::size_t layers = widths_.size() - 1;
    w_.resize(layers);
    b_.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const int in = widths_[l];
        const int out = widths_[l + 1];
        const double scale =
            (l + 1 == layers) ? final_init_scale : 1.0 / std::sqrt(static_cast<double>(in));
        w_[l].resize(out, in);
        b_[l].resize(out);
        for (int i = 0; i < out; ++i) {
            for (int j = 0; j < in; ++j) {
                w_[l](i, j) = rng.uniform(-scale, scale);
            }
        }
        for (int i = 0; i < out; ++i) {
            b_[l](i) = rng.uniform(-scale, scale);
        }
    }
}

Eigen::MatrixXd Mlp::apply_output_activation(Eigen::MatrixXd z) const {
    if (out_act_ == OutputActivation::Tanh) {
        z = z.array().tanh().matrix();
    }
    return z;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd a = x;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        Eigen::MatrixXd z = (a * w_[l].transpose()).rowwise() + b_[l].transpose();
        if (l + 1 < w_.size()) {
            a = z.cwiseMax(0.0);
        } else {
            a = apply_output_activation(std::move(z));
        }
    }
    return a;
}

const Eigen::MatrixXd& Mlp::forward(const Eigen::MatrixXd& x, Cache& cache) const {
    cache.input = x;
    cache.post.resize(w_.size());
    const Eigen::MatrixXd* a = &cache.input;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        Eigen::MatrixXd z = (*a * w_[l].transpose()).rowwise() + b_[l].transpose();
        if (l + 1 < w_.size()) {
            cache.post[l] = z.cwiseMax(0.0);
        } else {
            cache.post[l] = apply_output_activation(std::move(z));
        }
        a = &cache.post[l];
    }
    return cache.post.back();
}

Mlp::Grads Mlp::zero_grads() const {
    Grads g;
    g.dw.resize(w_.size());
    g.db.resize(b_.size());
    for (std::size_t l = 0; l < w_.size(); ++l) {
        g.dw[l] = Eigen::MatrixXd::Zero(w_[l].rows(), w_[l].cols());
        g.db[l] = Eigen::VectorXd::Zero(b_[l].size());
    }
    return g;
}

namespace {

// Gradient through the activation, from post-activation values alone:
// relu'(z) = 1[post > 0], tanh'(z) = 1 - post^2.
Eigen::MatrixXd through_relu(const Eigen::MatrixXd& dy, const Eigen::MatrixXd& post) {
    return (post.array() > 0.0).select(dy, 0.0);
}

Eigen::MatrixXd through_tanh(const Eigen::MatrixXd& dy, const Eigen::MatrixXd& post) {
    return (dy.array() * (1.0 - post.array().square())).matrix();
}

}  // namespace

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& dy,
                              Grads& grads) const {
    Eigen::MatrixXd dz;
    for (std::size_t l = w_.size(); l-- > 0;) {
        const Eigen::MatrixXd& post = cache.post[l];
        const Eigen::MatrixXd& upstream = (l + 1 == w_.size()) ? dy : dz;
        Eigen::MatrixXd local;
        if (l + 1 == w_.size()) {
            local = out_act_ == OutputActivation::Tanh ? through_tanh(upstream, post) : upstream;
        } else {
            local = through_relu(upstream, post);
        }
        const Eigen::MatrixXd& below = (l == 0) ? cache.input : cache.post[l - 1];
        grads.dw[l].noalias() += local.transpose() * below;
        grads.db[l].noalias() += local.colwise().sum().transpose();
        dz.noalias() = local * w_[l];
    }
    return dz;
}

Eigen::MatrixXd Mlp::backward_input(const Cache& cache, const Eigen::MatrixXd& dy) const {
    Eigen::MatrixXd dz;
    for (std::size_t l = w_.size(); l-- > 0;) {
        const Eigen::MatrixXd& post = cache.post[l];
        const Eigen::MatrixXd& upstream = (l + 1 == w_.size()) ? dy : dz;
        Eigen::MatrixXd local;
        if (l + 1 == w_.size()) {
            local = out_act_ == OutputActivation::Tanh ? through_tanh(upstream, post) : upstream;
        } else {
            local = through_relu(upstream, post);
        }
        dz.noalias() = local * w_[l];
    }
    return dz;
}

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        n += static_cast<std::size_t>(w_[l].size()) + static_cast<std::size_t>(b_[l].size());
    }
    return n;
}

Eigen::VectorXd Mlp::flatten_params() const {
    Eigen::VectorXd flat(param_count());
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        for (Eigen::Index i = 0; i < w_[l].rows(); ++i) {
            for (Eigen::Index j = 0; j < w_[l].cols(); ++j) {
                flat(at++) = w_[l](i, j);
            }
        }
        for (Eigen::Index i = 0; i < b_[l].size(); ++i) {
            flat(at++) = b_[l](i);
        }
    }
    return flat;
}

void Mlp::unflatten_params(const Eigen::VectorXd& flat) {
    if (static_cast<std::size_t>(flat.size()) != param_count()) {
        throw std::invalid_argument("Mlp::unflatten_params: size mismatch");
    }
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        for (Eigen::Index i = 0; i < w_[l].rows(); ++i) {
            for (Eigen::Index j = 0; j < w_[l].cols(); ++j) {
                w_[l](i, j) = flat(at++);
            }
        }
        for (Eigen::Index i = 0; i < b_[l].size(); ++i) {
            b_[l](i) = flat(at++);
        }
    }
}

void Mlp::set_zero() {
    for (std::size_t l = 0; l < w_.size(); ++l) {
        w_[l].setZero();
        b_[l].setZero();
    }
}

AdamOptimizer::AdamOptimizer(const Mlp& net, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    mw_.resize(net.layer_count());
    vw_.resize(net.layer_count());
    mb_.resize(net.layer_count());
    vb_.resize(net.layer_count());
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        mw_[l] = Eigen::MatrixXd::Zero(net.weights(l).rows(), net.weights(l).cols());
        vw_[l] = mw_[l];
        mb_[l] = Eigen::VectorXd::Zero(net.biases(l).size());
        vb_[l] = mb_[l];
    }
}

void AdamOptimizer::step(Mlp& net, const Mlp::Grads& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        mw_[l] = beta1_ * mw_[l] + (1.0 - beta1_) * grads.dw[l];
        vw_[l] = (beta2_ * vw_[l].array() + (1.0 - beta2_) * grads.dw[l].array().square()).matrix();
        net.weights(l).array() -=
            lr_ * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + eps_);

        mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * grads.db[l];
        vb_[l] = (beta2_ * vb_[l].array() + (1.0 - beta2_) * grads.db[l].array().square()).matrix();
        net.biases(l).array() -=
            lr_ * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps_);
    }
}

}  // namespace graftrl
