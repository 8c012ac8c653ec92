#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "graftrl/ddpg.hpp"
#include "graftrl/envs.hpp"
#include "graftrl/grafting.hpp"
#include "graftrl/segment_library.hpp"

namespace graftrl {

// The threshold-tuning agent's whole world: the synthetic share of the
// replay buffer and the yield of the latest graft call relative to theta.
// It never sees environment states.
struct TutorObservation {
    double r_trs = 0.0;
    double r_trj = 0.0;
};

struct EpisodeRecord {
    int episode = 0;  // 1-based
    double ret = 0.0;
    std::optional<double> epsilon_used;
    std::optional<std::size_t> n_synth_generated;  // synthetic trajectories from graft()
    std::optional<std::size_t> n_synth_stored;     // synthetic transitions pushed
    std::optional<double> synth_ratio;             // buffer ratio as the tutor observes it
    std::optional<double> tutor_reward;            // emitted at horizon boundaries only
};

struct RunLog {
    std::vector<EpisodeRecord> episodes;
};

// Full parameter set for one training run; defaults mirror the config schema.
struct RunConfig {
    DdpgConfig ddpg;  // dims and bounds are filled in from the environment
    std::size_t buffer_capacity = 100000;
    std::size_t buffer_warmup = 1000;
    std::size_t eg_batch = 16;

    std::size_t tutor_batch = 10;
    double tutor_gamma = 0.9;
    std::size_t tutor_capacity = 100000;
    std::size_t tutor_warmup = 100;
    double tutor_sigma0 = 0.1;
    double tutor_sigma1 = 0.01;
    bool tutor_zero_init = false;

    GraftConfig graft;  // graft.eps is overridden per mode
    double lib_bin_size = 1.0;
    std::size_t lib_bin_capacity = 1000;
    std::size_t horizon = 10;
};

// Grafting threshold from the tutor's policy: the tanh head plus optional
// Gaussian noise (pre-mapping), clamped, then mapped affinely from [-1,1]
// onto [0,1].
double tutor_select_epsilon(const DdpgAgent& tutor, const TutorObservation& obs, bool explore,
                            Rng& rng, double sigma = 0.1);

// One authentic episode: act with exploration, store each transition, one
// agent update per step once the buffer passes warmup. Returns the episode's
// trajectory and its return.
std::pair<Trajectory, double> run_eg_episode(DdpgAgent& agent, Env& env, ReplayBuffer& buf,
                                             std::size_t batch_size, Rng& rng);

// Observer invoked after each episode's bookkeeping is complete. The buffers
// are the environment agent's and (when present) the tutor's.
using EpisodeObserver =
    std::function<void(const EpisodeRecord&, const ReplayBuffer& eg_buffer,
                       const ReplayBuffer* tutor_buffer)>;

// Plain actor-critic baseline: no grafting machinery at all.
RunLog ddpg_train(const RunConfig& cfg, Env& env, int episodes, Rng& rng,
                  const EpisodeObserver& observer = {});

// Grafting with a fixed threshold; synthetic transitions stay in the buffer
// for their natural lifetime (no bulk eviction).
RunLog eg_train(const RunConfig& cfg, Env& env, int episodes, double fixed_eps, Rng& rng,
                const EpisodeObserver& observer = {});

// Full loop: the environment agent learns from authentic plus grafted
// experience while the tutor tunes the grafting threshold online, rewarded
// every `horizon` episodes with the window's mean return; synthetic
// transitions are evicted at each horizon boundary.
RunLog autoeg_train(const RunConfig& cfg, Env& env, int episodes, Rng& rng,
                    const EpisodeObserver& observer = {});

}  // namespace graftrl
