#include "graftrl/autoeg.hpp"

#include <algorithm>
#include <cmath>

#include "graftrl/rng.hpp"

namespace graftrl {

double tutor_select_epsilon(const DdpgAgent& tutor, const TutorObservation& obs, bool explore,
                            Rng& rng, double sigma) {
    double raw = tutor.actor_raw({obs.r_trs, obs.r_trj})(0);
    if (explore) {
        raw += sigma * rng.gaussian();
    }
    raw = std::clamp(raw, -1.0, 1.0);
    return 0.5 * (raw + 1.0);
}

std::pair<Trajectory, double> run_eg_episode(DdpgAgent& agent, Env& env, ReplayBuffer& buf,
                                             std::size_t batch_size, Rng& rng) {
    StateVec s = env.reset(rng.next_u64());
    agent.reset_noise();
    Trajectory traj;
    double episode_return = 0.0;
    for (;;) {
        ActionVec a = agent.act(s, /*explore=*/true, rng);
        const StepResult sr = env.step(a);
        Transition t;
        t.s = std::move(s);
        t.a = std::move(a);
        t.r = sr.r;
        t.s_next = sr.s_next;
        t.provenance = Provenance::Authentic;
        t.terminal = sr.done && sr.reason == DoneReason::Terminal;
        buf.push(t);
        traj.transitions.push_back(std::move(t));
        episode_return += sr.r;
        if (auto batch = buf.sample_minibatch(batch_size, rng); batch && !batch->empty()) {
            agent.train_step(*batch);
        }
        s = sr.s_next;
        if (sr.done) {
            traj.is_complete_episode = sr.reason == DoneReason::Terminal;
            break;
        }
    }
    return {std::move(traj), episode_return};
}

namespace {

DdpgConfig eg_agent_config(const RunConfig& cfg, const EnvSpec& spec) {
    DdpgConfig c = cfg.ddpg;
    c.state_dim = spec.state_dim;
    c.action_dim = spec.action_dim;
    c.action_low = spec.action_low;
    c.action_high = spec.action_high;
    c.zero_init_actor = false;
    return c;
}

DdpgConfig tutor_agent_config(const RunConfig& cfg) {
    DdpgConfig c = cfg.ddpg;
    c.state_dim = 2;
    c.action_dim = 1;
    c.action_low = {0.0};
    c.action_high = {1.0};
    c.gamma = cfg.tutor_gamma;
    c.zero_init_actor = cfg.tutor_zero_init;
    return c;
}

// Tutor exploration noise: linear decay from sigma0 to sigma1 over the first
// half of training, constant afterwards.
double tutor_sigma(const RunConfig& cfg, int episode, int total_episodes) {
    const double half = std::max(1.0, 0.5 * static_cast<double>(total_episodes));
    const double frac = std::min(1.0, static_cast<double>(episode - 1) / half);
    return cfg.tutor_sigma0 + (cfg.tutor_sigma1 - cfg.tutor_sigma0) * frac;
}

Transition tutor_transition(const TutorObservation& from, double eps, double reward,
                            const TutorObservation& to, bool terminal) {
    Transition t;
    t.s = {from.r_trs, from.r_trj};
    t.a = {eps};
    t.r = reward;
    t.s_next = {to.r_trs, to.r_trj};
    t.provenance = Provenance::Authentic;
    t.terminal = terminal;
    return t;
}

}  // namespace

RunLog ddpg_train(const RunConfig& cfg, Env& env, int episodes, Rng& rng,
                  const EpisodeObserver& observer) {
    // All three modes split the incoming stream the same way so that the
    // environment-side stream is identical across conditions.
    Rng agent_rng(rng.next_u64());
    Rng tutor_rng(rng.next_u64());
    (void)tutor_rng;

    DdpgAgent agent(eg_agent_config(cfg, env.spec()), agent_rng);
    ReplayBuffer buf(cfg.buffer_capacity, cfg.buffer_warmup);

    RunLog log;
    for (int ep = 1; ep <= episodes; ++ep) {
        auto [traj, ret] = run_eg_episode(agent, env, buf, cfg.eg_batch, agent_rng);
        EpisodeRecord rec;
        rec.episode = ep;
        rec.ret = ret;
        log.episodes.push_back(rec);
        if (observer) {
            observer(rec, buf, nullptr);
        }
    }
    return log;
}

RunLog eg_train(const RunConfig& cfg, Env& env, int episodes, double fixed_eps, Rng& rng,
                const EpisodeObserver& observer) {
    Rng agent_rng(rng.next_u64());
    Rng tutor_rng(rng.next_u64());
    (void)tutor_rng;

    DdpgAgent agent(eg_agent_config(cfg, env.spec()), agent_rng);
    ReplayBuffer buf(cfg.buffer_capacity, cfg.buffer_warmup);
    SegmentLibrary lib(cfg.lib_bin_size, cfg.lib_bin_capacity);

    RunLog log;
    for (int ep = 1; ep <= episodes; ++ep) {
        auto [traj, ret] = run_eg_episode(agent, env, buf, cfg.eg_batch, agent_rng);

        GraftConfig gc = cfg.graft;
        gc.eps = fixed_eps;
        GraftStats stats;
        const auto synthetic = graft(gc, traj, lib, agent_rng, &stats);
        std::size_t stored = 0;
        for (const SyntheticTrajectory& st : synthetic) {
            for (const Transition& t : st.transitions) {
                buf.push(t);
                ++stored;
            }
            if (auto batch = buf.sample_minibatch(cfg.eg_batch, agent_rng);
                batch && !batch->empty()) {
                agent.train_step(*batch);
            }
        }

        EpisodeRecord rec;
        rec.episode = ep;
        rec.ret = ret;
        rec.epsilon_used = fixed_eps;
        rec.n_synth_generated = synthetic.size();
        rec.n_synth_stored = stored;
        rec.synth_ratio = buf.synthetic_ratio();
        log.episodes.push_back(rec);
        if (observer) {
            observer(rec, buf, nullptr);
        }
    }
    return log;
}

RunLog autoeg_train(const RunConfig& cfg, Env& env, int episodes, Rng& rng,
                    const EpisodeObserver& observer) {
    Rng agent_rng(rng.next_u64());
    Rng tutor_rng(rng.next_u64());

    DdpgAgent agent(eg_agent_config(cfg, env.spec()), agent_rng);
    DdpgAgent tutor(tutor_agent_config(cfg), tutor_rng);
    ReplayBuffer buf(cfg.buffer_capacity, cfg.buffer_warmup);
    ReplayBuffer tutor_buf(cfg.tutor_capacity, cfg.tutor_warmup);
    SegmentLibrary lib(cfg.lib_bin_size, cfg.lib_bin_capacity);

    TutorObservation tutor_state;  // starts at (0, 0)
    std::size_t horizon_counter = 0;
    double sum_of_reward = 0.0;

    RunLog log;
    for (int ep = 1; ep <= episodes; ++ep) {
        auto [traj, ret] = run_eg_episode(agent, env, buf, cfg.eg_batch, agent_rng);
        sum_of_reward += ret;

        const double eps = tutor_select_epsilon(tutor, tutor_state, /*explore=*/true, tutor_rng,
                                                tutor_sigma(cfg, ep, episodes));
        GraftConfig gc = cfg.graft;
        gc.eps = eps;
        GraftStats stats;
        const auto synthetic = graft(gc, traj, lib, agent_rng, &stats);
        std::size_t stored = 0;
        for (const SyntheticTrajectory& st : synthetic) {
            for (const Transition& t : st.transitions) {
                buf.push(t);
                ++stored;
            }
            if (auto batch = buf.sample_minibatch(cfg.eg_batch, agent_rng);
                batch && !batch->empty()) {
                agent.train_step(*batch);
            }
        }

        TutorObservation next_state;
        next_state.r_trs = buf.synthetic_ratio();
        next_state.r_trj = cfg.graft.theta == 0
                               ? 0.0
                               : static_cast<double>(synthetic.size()) /
                                     static_cast<double>(cfg.graft.theta);

        EpisodeRecord rec;
        rec.episode = ep;
        rec.ret = ret;
        rec.epsilon_used = eps;
        rec.n_synth_generated = synthetic.size();
        rec.n_synth_stored = stored;
        rec.synth_ratio = next_state.r_trs;

        // The counter counts completed episodes in the current window, so a
        // window holds exactly `horizon` episode returns.
        ++horizon_counter;
        if (horizon_counter < cfg.horizon) {
            tutor_buf.push(tutor_transition(tutor_state, eps, 0.0, next_state,
                                            /*terminal=*/false));
            tutor_state = next_state;
        } else {
            const double reward = sum_of_reward / static_cast<double>(cfg.horizon);
            tutor_buf.push(tutor_transition(tutor_state, eps, reward, next_state,
                                            /*terminal=*/true));
            buf.remove_synthetic();
            tutor_state = TutorObservation{};
            horizon_counter = 0;
            sum_of_reward = 0.0;
            rec.tutor_reward = reward;
        }

        if (auto batch = tutor_buf.sample_minibatch(cfg.tutor_batch, tutor_rng);
            batch && !batch->empty()) {
            tutor.train_step(*batch);
        }

        log.episodes.push_back(rec);
        if (observer) {
            observer(rec, buf, &tutor_buf);
        }
    }
    return log;
}

}  // namespace graftrl
