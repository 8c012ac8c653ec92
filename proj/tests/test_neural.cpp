#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "graftrl/ddpg.hpp"
#include "graftrl/rng.hpp"

using namespace graftrl;

namespace {

DdpgConfig small_config(int ds = 3, int da = 2) {
    DdpgConfig cfg;
    cfg.state_dim = ds;
    cfg.action_dim = da;
    cfg.action_low.assign(da, -1.0);
    cfg.action_high.assign(da, 1.0);
    cfg.hidden1 = 8;
    cfg.hidden2 = 6;
    cfg.final_init_scale = 0.05;
    return cfg;
}

std::vector<Transition> random_batch(Rng& rng, int ds, int da, std::size_t n) {
    std::vector<Transition> batch(n);
    for (Transition& t : batch) {
        t.s.resize(ds);
        t.s_next.resize(ds);
        t.a.resize(da);
        for (double& v : t.s) v = rng.uniform(-1.0, 1.0);
        for (double& v : t.s_next) v = rng.uniform(-1.0, 1.0);
        for (double& v : t.a) v = rng.uniform(-1.0, 1.0);
        t.r = rng.uniform(-1.0, 1.0);
        t.terminal = rng.uniform() < 0.2;
    }
    return batch;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

Eigen::VectorXd grads_to_flat(const Mlp& net, const Mlp::Grads& grads) {
    Eigen::VectorXd flat(net.param_count());
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        for (Eigen::Index i = 0; i < grads.dw[l].rows(); ++i) {
            for (Eigen::Index j = 0; j < grads.dw[l].cols(); ++j) {
                flat(at++) = grads.dw[l](i, j);
            }
        }
        for (Eigen::Index i = 0; i < grads.db[l].size(); ++i) {
            flat(at++) = grads.db[l](i);
        }
    }
    return flat;
}

}  // namespace

TEST_CASE("critic gradient matches central finite differences") {
    Rng rng(101);
    for (int net_idx = 0; net_idx < 4; ++net_idx) {
        DdpgAgent agent(small_config(), rng);
        const auto batch = random_batch(rng, 3, 2, 5);
        const auto targets = agent.critic_targets(batch);

        Mlp::Grads analytic = agent.critic().zero_grads();
        agent.critic_loss_gradient(batch, targets, analytic);
        const Eigen::VectorXd flat_analytic = grads_to_flat(agent.critic(), analytic);

        const Eigen::VectorXd theta = agent.critic().flatten_params();
        const double h = 1e-6;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            Eigen::VectorXd probe = theta;
            probe(i) = theta(i) + h;
            agent.critic().unflatten_params(probe);
            const double up = agent.critic_loss(batch, targets);
            probe(i) = theta(i) - h;
            agent.critic().unflatten_params(probe);
            const double down = agent.critic_loss(batch, targets);
            const double fd = (up - down) / (2.0 * h);
            REQUIRE(relative_error(fd, flat_analytic(i)) <= 1e-4);
        }
        agent.critic().unflatten_params(theta);
    }
}

TEST_CASE("actor gradient matches central finite differences") {
    Rng rng(202);
    for (int net_idx = 0; net_idx < 4; ++net_idx) {
        DdpgAgent agent(small_config(), rng);
        const auto batch = random_batch(rng, 3, 2, 5);

        Mlp::Grads analytic = agent.actor().zero_grads();
        agent.actor_objective_gradient(batch, analytic);
        const Eigen::VectorXd flat_analytic = grads_to_flat(agent.actor(), analytic);

        const Eigen::VectorXd theta = agent.actor().flatten_params();
        const double h = 1e-6;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            Eigen::VectorXd probe = theta;
            probe(i) = theta(i) + h;
            agent.actor().unflatten_params(probe);
            const double up = agent.actor_objective(batch);
            probe(i) = theta(i) - h;
            agent.actor().unflatten_params(probe);
            const double down = agent.actor_objective(batch);
            const double fd = (up - down) / (2.0 * h);
            REQUIRE(relative_error(fd, flat_analytic(i)) <= 1e-4);
        }
        agent.actor().unflatten_params(theta);
    }
}

TEST_CASE("soft_update blends toward the online networks") {
    Rng rng(303);
    DdpgAgent agent(small_config(), rng);

    SUBCASE("tau = 0 leaves targets unchanged") {
        DdpgConfig cfg = small_config();
        cfg.tau = 0.0;
        DdpgAgent frozen(cfg, rng);
        const Eigen::VectorXd before = frozen.target_actor().flatten_params();
        frozen.actor().unflatten_params(before.array() + 1.0);
        frozen.soft_update();
        CHECK(frozen.target_actor().flatten_params() == before);
    }

    SUBCASE("tau = 1 copies the online networks") {
        DdpgConfig cfg = small_config();
        cfg.tau = 1.0;
        DdpgAgent copy(cfg, rng);
        copy.actor().unflatten_params(copy.actor().flatten_params().array() + 0.5);
        copy.soft_update();
        CHECK(copy.target_actor().flatten_params() == copy.actor().flatten_params());
        CHECK(copy.target_critic().flatten_params() == copy.critic().flatten_params());
    }

    SUBCASE("tau = 0.5 midpoint on a known value") {
        DdpgConfig cfg = small_config();
        cfg.tau = 0.5;
        DdpgAgent mid(cfg, rng);
        Eigen::VectorXd twos = Eigen::VectorXd::Constant(mid.actor().param_count(), 2.0);
        mid.actor().unflatten_params(twos);
        mid.target_actor().unflatten_params(Eigen::VectorXd::Zero(mid.actor().param_count()));
        mid.soft_update();
        CHECK((mid.target_actor().flatten_params().array() == 1.0).all());
    }

    SUBCASE("targets contract toward fixed online parameters") {
        DdpgConfig cfg = small_config();
        cfg.tau = 0.25;
        DdpgAgent a(cfg, rng);
        a.target_actor().unflatten_params(a.actor().flatten_params().array() + 2.0);
        double gap = (a.target_actor().flatten_params() - a.actor().flatten_params()).norm();
        for (int i = 0; i < 5; ++i) {
            a.soft_update();
            const double next =
                (a.target_actor().flatten_params() - a.actor().flatten_params()).norm();
            CHECK(next < gap);
            gap = next;
        }
    }
}

TEST_CASE("act maps, explores, and clamps") {
    Rng rng(404);
    DdpgConfig cfg = small_config(3, 2);
    DdpgAgent agent(cfg, rng);

    SUBCASE("zero actor gives the midpoint action, deterministically") {
        agent.actor().set_zero();
        Rng noise(1);
        const ActionVec a1 = agent.act({0.1, 0.2, 0.3}, false, noise);
        const ActionVec a2 = agent.act({0.1, 0.2, 0.3}, false, noise);
        CHECK(a1 == ActionVec{0.0, 0.0});
        CHECK(a1 == a2);
    }

    SUBCASE("asymmetric bounds shift the midpoint") {
        DdpgConfig shifted = small_config(3, 1);
        shifted.action_low = {0.0};
        shifted.action_high = {1.0};
        DdpgAgent unit(shifted, rng);
        unit.actor().set_zero();
        Rng noise(1);
        CHECK(unit.act({0.0, 0.0, 0.0}, false, noise) == ActionVec{0.5});
    }

    SUBCASE("exploration noise stays inside the bounds and engages the clamp") {
        DdpgConfig loud = small_config(3, 2);
        loud.ou_sigma = 50.0;  // essentially every draw must clamp
        DdpgAgent noisy(loud, rng);
        Rng noise(7);
        bool clamped_high = false;
        bool clamped_low = false;
        for (int i = 0; i < 20; ++i) {
            const ActionVec a = noisy.act({0.1, -0.2, 0.0}, true, noise);
            for (double v : a) {
                CHECK(v >= -1.0);
                CHECK(v <= 1.0);
                clamped_high |= v == 1.0;
                clamped_low |= v == -1.0;
            }
        }
        CHECK(clamped_high);
        CHECK(clamped_low);
    }

    SUBCASE("same seed reproduces the same noisy actions") {
        Rng n1(55);
        Rng n2(55);
        agent.reset_noise();
        const ActionVec a1 = agent.act({0.0, 0.0, 0.0}, true, n1);
        agent.reset_noise();
        const ActionVec a2 = agent.act({0.0, 0.0, 0.0}, true, n2);
        CHECK(a1 == a2);
    }

    SUBCASE("dimension mismatch is an error") {
        Rng noise(1);
        CHECK_THROWS_AS(agent.act({0.0}, false, noise), std::invalid_argument);
    }
}

TEST_CASE("critic_targets implements the Bellman backup") {
    Rng rng(505);

    SUBCASE("gamma = 0 reduces to the reward") {
        DdpgConfig cfg = small_config();
        cfg.gamma = 0.0;
        DdpgAgent agent(cfg, rng);
        auto batch = random_batch(rng, 3, 2, 4);
        const auto y = agent.critic_targets(batch);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            CHECK(y[i] == batch[i].r);
        }
    }

    SUBCASE("terminal transitions ignore the bootstrap") {
        DdpgConfig cfg = small_config();
        cfg.gamma = 0.99;
        DdpgAgent agent(cfg, rng);
        auto batch = random_batch(rng, 3, 2, 4);
        for (Transition& t : batch) {
            t.terminal = true;
        }
        const auto y = agent.critic_targets(batch);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            CHECK(y[i] == batch[i].r);
        }
    }

    SUBCASE("constant target critic gives r + gamma * c") {
        DdpgConfig cfg = small_config();
        cfg.gamma = 0.99;
        DdpgAgent agent(cfg, rng);
        // Zero every target-critic parameter, then set the output bias to 2.
        agent.target_critic().set_zero();
        agent.target_critic().biases(agent.target_critic().layer_count() - 1)(0) = 2.0;
        auto batch = random_batch(rng, 3, 2, 3);
        for (Transition& t : batch) {
            t.r = 1.0;
            t.terminal = false;
        }
        const auto y = agent.critic_targets(batch);
        for (double v : y) {
            CHECK(v == doctest::Approx(2.98).epsilon(1e-12));
        }
    }

    SUBCASE("empty batch is an error") {
        DdpgAgent agent(small_config(), rng);
        CHECK_THROWS_AS(agent.critic_targets({}), std::invalid_argument);
    }
}

TEST_CASE("train_step drives the critic toward a fixed target") {
    Rng rng(606);
    DdpgConfig cfg = small_config(2, 1);
    cfg.gamma = 0.0;  // target is exactly r
    cfg.critic_lr = 1e-2;
    DdpgAgent agent(cfg, rng);

    std::vector<Transition> batch(4);
    for (Transition& t : batch) {
        t.s = {0.3, -0.7};
        t.a = {0.5};
        t.r = 1.25;
        t.s_next = {0.0, 0.0};
        t.terminal = true;
    }
    double loss = 0.0;
    for (int i = 0; i < 800; ++i) {
        loss = agent.train_step(batch).first;
    }
    CHECK(loss < 1e-3);
}

TEST_CASE("train_step reports divergence") {
    Rng rng(707);
    DdpgAgent agent(small_config(2, 1), rng);
    const Eigen::VectorXd huge =
        Eigen::VectorXd::Constant(agent.critic().param_count(), 1e200);
    agent.critic().unflatten_params(huge);
    agent.target_critic().unflatten_params(huge);
    const auto batch = random_batch(rng, 2, 1, 4);
    CHECK_THROWS_AS(agent.train_step(batch), TrainingDiverged);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
    Rng rng(808);
    DdpgAgent agent(small_config(), rng);
    // A few updates so the four networks all differ.
    for (int i = 0; i < 5; ++i) {
        agent.train_step(random_batch(rng, 3, 2, 6));
    }
    const std::string path = std::filesystem::temp_directory_path() / "graftrl_ckpt_test.bin";
    agent.save_checkpoint(path);

    DdpgAgent other(small_config(), rng);
    other.load_checkpoint(path);
    CHECK(other.actor().flatten_params() == agent.actor().flatten_params());
    CHECK(other.critic().flatten_params() == agent.critic().flatten_params());
    CHECK(other.target_actor().flatten_params() == agent.target_actor().flatten_params());
    CHECK(other.target_critic().flatten_params() == agent.target_critic().flatten_params());
    std::remove(path.c_str());

    CHECK_THROWS(other.load_checkpoint("/nonexistent/checkpoint.bin"));
}

TEST_CASE("checkpoint rejects shape mismatches") {
    Rng rng(909);
    DdpgAgent agent(small_config(3, 2), rng);
    const std::string path = std::filesystem::temp_directory_path() / "graftrl_ckpt_shape.bin";
    agent.save_checkpoint(path);
    DdpgAgent narrower(small_config(2, 2), rng);
    CHECK_THROWS(narrower.load_checkpoint(path));
    std::remove(path.c_str());
}

TEST_CASE("full training is deterministic under a fixed seed") {
    auto run_once = [] {
        Rng rng(1234);
        DdpgAgent agent(small_config(2, 1), rng);
        auto batch = random_batch(rng, 2, 1, 8);
        for (int i = 0; i < 50; ++i) {
            agent.train_step(batch);
        }
        return agent.actor().flatten_params();
    };
    CHECK(run_once() == run_once());
}
