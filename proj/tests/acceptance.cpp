// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria can be filtered by name on the command line.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "graftrl/csv.hpp"
#include "graftrl/fixtures.hpp"
#include "graftrl/harness.hpp"
#include "graftrl/rng.hpp"
#include "oracles.hpp"

using namespace graftrl;

namespace {

struct Criterion {
    std::string name;
    double time_budget_s;
    std::function<bool(std::ostream&)> run;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path scratch_dir(const std::string& leaf) {
    const auto dir = std::filesystem::temp_directory_path() / "graftrl_acceptance" / leaf;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------

bool distance_oracle(std::ostream& log) {
    Rng rng(1001);
    double worst = 0.0;
    for (int it = 0; it < 500; ++it) {
        const std::size_t n = 1 + rng.uniform_index(6);
        const Distribution p{oracles::random_distribution(rng, n)};
        const Distribution q{oracles::random_distribution(rng, n)};
        const double got = wasserstein1(p, q);
        const double expected = oracles::ot_bruteforce(p.mass, q.mass);
        worst = std::max(worst, std::abs(got - expected));
        if (std::abs(got - expected) > 1e-9) {
            log << "case " << it << ": |" << got << " - " << expected << "| > 1e-9";
            return false;
        }
    }
    log << "500 certified pairs, worst |delta| = " << worst;
    return true;
}

bool metric_axioms(std::ostream& log) {
    Rng rng(2002);
    for (int it = 0; it < 1000; ++it) {
        const std::size_t n = 2 + rng.uniform_index(7);  // supports up to 8
        const Distribution p{oracles::random_distribution(rng, n)};
        const Distribution q{oracles::random_distribution(rng, n)};
        const Distribution r{oracles::random_distribution(rng, n)};
        const double pq = wasserstein1(p, q);
        const double qp = wasserstein1(q, p);
        const double pr = wasserstein1(p, r);
        const double qr = wasserstein1(q, r);
        if (!(pq >= 0.0) || std::abs(pq - qp) > 1e-9 || wasserstein1(p, p) != 0.0 ||
            pr > pq + qr + 1e-9) {
            log << "axiom violated on triple " << it;
            return false;
        }
    }
    log << "1000 random triples satisfy the metric axioms";
    return true;
}

bool library_oracle(std::ostream& log) {
    Rng rng(3003);
    for (int seq = 0; seq < 200; ++seq) {
        SegmentLibrary lib(1.0, 5);
        // Mirror model: per-bin FIFO plus linear scan.
        std::map<std::vector<std::int64_t>, std::vector<std::pair<StateVec, double>>> mirror;

        for (int op = 0; op < 40; ++op) {
            if (rng.uniform() < 0.55) {
                const StateVec key{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
                const double reward = rng.uniform(-1.0, 1.0);
                Transition t;
                t.s = key;
                t.a = {0.0};
                t.r = reward;
                t.s_next = key;
                lib.insert(key, {t});
                auto& bin = mirror[quantize(key, 1.0).coords];
                if (bin.size() == 5) {
                    bin.erase(bin.begin());
                }
                bin.emplace_back(key, reward);
            } else {
                const StateVec query{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
                const double eps = rng.uniform(0.0, 0.8);
                const auto got = lib.get(query, eps);

                std::vector<std::pair<StateVec, double>> expected;
                auto it = mirror.find(quantize(query, 1.0).coords);
                if (it != mirror.end()) {
                    for (const auto& [key, reward] : it->second) {
                        if (state_distance(query, key) < eps) {
                            expected.emplace_back(key, reward);
                        }
                    }
                }
                if (got.size() != expected.size()) {
                    log << "sequence " << seq << ": size mismatch " << got.size() << " vs "
                        << expected.size();
                    return false;
                }
                for (std::size_t i = 0; i < got.size(); ++i) {
                    if (got[i][0].s != expected[i].first || got[i][0].r != expected[i].second) {
                        log << "sequence " << seq << ": entry " << i << " differs";
                        return false;
                    }
                }

                // Monotonicity in eps.
                const auto wider = lib.get(query, eps + rng.uniform(0.0, 0.5));
                if (wider.size() < got.size()) {
                    log << "sequence " << seq << ": monotonicity violated";
                    return false;
                }
            }
        }
    }
    log << "200 randomized sequences match the same-bin linear scan";
    return true;
}

bool grafting_invariants(std::ostream& log) {
    Rng rng(4004);
    SegmentLibrary lib(1.0, 300);
    std::vector<Transition> registry;

    std::size_t outputs = 0;
    for (int call = 0; call < 100; ++call) {
        Trajectory traj;
        StateVec s{rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
        const std::size_t len = 4 + rng.uniform_index(10);
        for (std::size_t i = 0; i < len; ++i) {
            StateVec next = s;
            for (double& v : next) {
                v = std::clamp(v + rng.uniform(-0.4, 0.4), 0.0, 3.0);
            }
            Transition t;
            t.s = s;
            t.a = {rng.uniform(-1.0, 1.0)};
            t.r = rng.uniform(-1.0, 1.0);
            t.s_next = next;
            traj.transitions.push_back(t);
            s = next;
        }
        registry.insert(registry.end(), traj.transitions.begin(), traj.transitions.end());

        GraftConfig cfg;
        cfg.eps = rng.uniform(0.0, 1.0);
        cfg.n_ext = rng.uniform_index(12);
        cfg.n_gft = rng.uniform_index(12);
        cfg.theta = 5;
        const auto out = graft(cfg, traj, lib, rng);
        const double authentic_quality = quality(traj.transitions);

        if (out.size() > 5) {
            log << "call " << call << ": returned " << out.size() << " > theta";
            return false;
        }
        for (const SyntheticTrajectory& st : out) {
            ++outputs;
            const StateVec& term = st.transitions[st.head_length - 1].s_next;
            const StateVec& init = st.transitions[st.head_length].s;
            const double independent = oracles::state_distance_oracle(term, init);
            if (!(st.junction_error < cfg.eps) || std::abs(independent - st.junction_error) > 1e-9) {
                log << "call " << call << ": junction error check failed";
                return false;
            }
            if (!(st.quality >= authentic_quality)) {
                log << "call " << call << ": quality below the authentic trajectory";
                return false;
            }
            for (const Transition& t : st.transitions) {
                bool registered = false;
                for (const Transition& r : registry) {
                    if (same_experience(r, t)) {
                        registered = true;
                        break;
                    }
                }
                if (!registered || t.provenance != Provenance::Synthetic) {
                    log << "call " << call << ": non-verbatim synthetic transition";
                    return false;
                }
            }
        }
    }
    log << "100 randomized calls, " << outputs << " synthetic trajectories verified";
    return true;
}

bool fig3_fixture(std::ostream& log) {
    const SpliceDemo demo = make_splice_demo();
    SegmentLibrary lib(1.0, 1000);
    const auto out = run_splice_demo(demo, lib);
    if (out.size() != 1) {
        log << "expected exactly one synthetic trajectory, got " << out.size();
        return false;
    }
    const double fall = quality(demo.fall_trial.transitions);
    const double slow = quality(demo.slow_trial.transitions);
    if (!(out[0].quality > fall && out[0].quality > slow)) {
        log << "synthetic quality " << out[0].quality << " does not exceed both inputs (" << fall
            << ", " << slow << ")";
        return false;
    }
    log << "one synthetic trajectory, quality " << out[0].quality << " > {" << fall << ", "
        << slow << "}";
    return true;
}

bool gradient_checks(std::ostream& log) {
    Rng rng(5005);
    double worst = 0.0;
    for (int net_idx = 0; net_idx < 20; ++net_idx) {
        DdpgConfig cfg;
        cfg.state_dim = 2 + static_cast<int>(rng.uniform_index(3));
        cfg.action_dim = 1 + static_cast<int>(rng.uniform_index(2));
        cfg.action_low.assign(cfg.action_dim, -1.0);
        cfg.action_high.assign(cfg.action_dim, 1.0);
        cfg.hidden1 = 8;
        cfg.hidden2 = 6;
        cfg.final_init_scale = 0.05;
        DdpgAgent agent(cfg, rng);

        std::vector<Transition> batch(5);
        for (Transition& t : batch) {
            t.s.resize(cfg.state_dim);
            t.s_next.resize(cfg.state_dim);
            t.a.resize(cfg.action_dim);
            for (double& v : t.s) v = rng.uniform(-1.0, 1.0);
            for (double& v : t.s_next) v = rng.uniform(-1.0, 1.0);
            for (double& v : t.a) v = rng.uniform(-1.0, 1.0);
            t.r = rng.uniform(-1.0, 1.0);
            t.terminal = rng.uniform() < 0.2;
        }
        const auto targets = agent.critic_targets(batch);
        const double h = 1e-6;

        auto flatten = [](const Mlp& net, const Mlp::Grads& grads) {
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
        };

        // Critic.
        {
            Mlp::Grads grads = agent.critic().zero_grads();
            agent.critic_loss_gradient(batch, targets, grads);
            const Eigen::VectorXd analytic = flatten(agent.critic(), grads);
            const Eigen::VectorXd theta = agent.critic().flatten_params();
            for (Eigen::Index i = 0; i < theta.size(); ++i) {
                Eigen::VectorXd probe = theta;
                probe(i) = theta(i) + h;
                agent.critic().unflatten_params(probe);
                const double up = agent.critic_loss(batch, targets);
                probe(i) = theta(i) - h;
                agent.critic().unflatten_params(probe);
                const double down = agent.critic_loss(batch, targets);
                const double fd = (up - down) / (2.0 * h);
                const double rel = std::abs(fd - analytic(i)) /
                                   std::max({1.0, std::abs(fd), std::abs(analytic(i))});
                worst = std::max(worst, rel);
                if (rel > 1e-4) {
                    log << "critic net " << net_idx << " param " << i << ": rel err " << rel;
                    return false;
                }
            }
            agent.critic().unflatten_params(theta);
        }
        // Actor.
        {
            Mlp::Grads grads = agent.actor().zero_grads();
            agent.actor_objective_gradient(batch, grads);
            const Eigen::VectorXd analytic = flatten(agent.actor(), grads);
            const Eigen::VectorXd theta = agent.actor().flatten_params();
            for (Eigen::Index i = 0; i < theta.size(); ++i) {
                Eigen::VectorXd probe = theta;
                probe(i) = theta(i) + h;
                agent.actor().unflatten_params(probe);
                const double up = agent.actor_objective(batch);
                probe(i) = theta(i) - h;
                agent.actor().unflatten_params(probe);
                const double down = agent.actor_objective(batch);
                const double fd = (up - down) / (2.0 * h);
                const double rel = std::abs(fd - analytic(i)) /
                                   std::max({1.0, std::abs(fd), std::abs(analytic(i))});
                worst = std::max(worst, rel);
                if (rel > 1e-4) {
                    log << "actor net " << net_idx << " param " << i << ": rel err " << rel;
                    return false;
                }
            }
            agent.actor().unflatten_params(theta);
        }
    }
    log << "20 networks, worst relative error " << worst;
    return true;
}

bool tutor_bookkeeping(std::ostream& log) {
    Config cfg;  // full defaults: H = 10, theta = 5
    LineWalkerParams params;
    LineWalker env(params);
    const RunConfig rc = run_config_from(cfg);

    std::vector<double> boundary_ratios;
    std::vector<std::size_t> tutor_sizes;
    Rng rng(6006);
    const RunLog run = autoeg_train(rc, env, 50, rng,
                                    [&](const EpisodeRecord& rec, const ReplayBuffer& buf,
                                        const ReplayBuffer* tutor_buf) {
                                        tutor_sizes.push_back(tutor_buf ? tutor_buf->size() : 0);
                                        if (rec.tutor_reward) {
                                            boundary_ratios.push_back(buf.synthetic_ratio());
                                        }
                                    });

    for (std::size_t i = 0; i < tutor_sizes.size(); ++i) {
        if (tutor_sizes[i] != i + 1) {
            log << "episode " << i + 1 << ": expected " << i + 1 << " tutor transitions, have "
                << tutor_sizes[i];
            return false;
        }
    }
    if (boundary_ratios.size() != 5) {
        log << "expected 5 horizon boundaries in 50 episodes, saw " << boundary_ratios.size();
        return false;
    }
    for (double ratio : boundary_ratios) {
        if (ratio != 0.0) {
            log << "synthetic ratio " << ratio << " after a horizon boundary";
            return false;
        }
    }
    double window_sum = 0.0;
    std::size_t in_window = 0;
    for (const EpisodeRecord& rec : run.episodes) {
        window_sum += rec.ret;
        ++in_window;
        if (in_window == 10) {
            if (!rec.tutor_reward) {
                log << "episode " << rec.episode << ": missing tutor reward at the boundary";
                return false;
            }
            if (std::abs(*rec.tutor_reward - window_sum / 10.0) > 1e-9) {
                log << "episode " << rec.episode << ": reward " << *rec.tutor_reward
                    << " != window mean " << window_sum / 10.0;
                return false;
            }
            window_sum = 0.0;
            in_window = 0;
        } else if (rec.tutor_reward) {
            log << "episode " << rec.episode << ": unexpected mid-window tutor reward";
            return false;
        }
    }
    log << "50 episodes, 5 clean horizon boundaries, rewards match window means";
    return true;
}

bool determinism(std::ostream& log) {
    Config cfg;
    cfg.set("run.env", "linewalker");
    cfg.set("run.mode", "autoeg");
    cfg.set("run.episodes", "120");
    cfg.set("run.seeds", "7");

    const auto dir_a = scratch_dir("det_a");
    const auto dir_b = scratch_dir("det_b");
    cfg.set("run.out", dir_a.string());
    run_experiment(experiment_from_config(cfg));
    cfg.set("run.out", dir_b.string());
    run_experiment(experiment_from_config(cfg));

    const std::string a = slurp(dir_a / "run_autoeg_seed7.csv");
    const std::string b = slurp(dir_b / "run_autoeg_seed7.csv");
    if (a.empty() || a != b) {
        log << "per-run CSVs differ between identical runs";
        return false;
    }
    log << "byte-identical 120-episode curves (" << a.size() << " bytes)";
    return true;
}

bool baseline_health(std::ostream& log) {
    Config cfg;
    cfg.set("run.env", "pendulum");
    cfg.set("run.mode", "noeg");
    cfg.set("run.episodes", "300");
    cfg.set("run.seeds", "1,2,3,4,5");
    cfg.set("run.policy_window", "50");
    const auto dir = scratch_dir("baseline");
    cfg.set("run.out", dir.string());

    const ExperimentReport report = run_experiment(experiment_from_config(cfg));
    for (const RunSummary& run : report.runs) {
        std::ifstream in(run.csv_path);
        const RunLog curve = read_run_csv(in);
        const std::vector<double> returns = returns_of(curve);
        double first = 0.0;
        for (std::size_t i = 0; i < 50; ++i) {
            first += returns[i];
        }
        first /= 50.0;
        const double last = policy_quality(returns, 50);
        if (!(last > first)) {
            log << "seed " << run.seed << ": last-50 mean " << last
                << " does not beat first-50 mean " << first;
            return false;
        }
        log << "seed " << run.seed << ": " << first << " -> " << last << "; ";
    }
    return true;
}

bool directional_claim(std::ostream& log) {
    const auto base = scratch_dir("directional");
    const std::string seeds = "1,2,3,4,5";
    const int episodes = 2000;

    struct Condition {
        std::string label;
        Mode mode;
        std::optional<double> eps;
    };
    const std::vector<Condition> conditions = {
        {"noeg", Mode::NoEg, std::nullopt},   {"eg0.2", Mode::Eg, 0.2},
        {"eg0.5", Mode::Eg, 0.5},             {"eg1.0", Mode::Eg, 1.0},
        {"autoeg", Mode::AutoEg, std::nullopt},
    };

    std::map<std::string, ExperimentReport> reports;
    for (const Condition& cond : conditions) {
        Config cfg;
        cfg.set("run.env", "linewalker");
        cfg.set("run.mode", mode_name(cond.mode));
        cfg.set("run.episodes", std::to_string(episodes));
        cfg.set("run.seeds", seeds);
        if (cond.eps) {
            cfg.set("run.epsilon", csv::format_double(*cond.eps));
        }
        cfg.set("run.out", (base / cond.label).string());
        reports[cond.label] = run_experiment(experiment_from_config(cfg));
    }

    const double base_auc = reports["noeg"].auc_mean;
    log << "mean AUC / policy quality over 5 seeds x " << episodes << " episodes: ";
    for (const Condition& cond : conditions) {
        const ExperimentReport& rep = reports[cond.label];
        log << cond.label << " " << rep.auc_mean << " / " << rep.policy_quality_mean;
        if (cond.label != "noeg" && base_auc != 0.0) {
            log << " (AUC improvement " << 100.0 * auc_improvement(rep.auc_mean, base_auc)
                << "%)";
        }
        log << "; ";
    }

    const double autoeg_auc = reports["autoeg"].auc_mean;
    if (!(autoeg_auc > base_auc)) {
        log << "ordering violated: autoeg " << autoeg_auc << " <= noeg " << base_auc;
        return false;
    }
    const double improvement = auc_improvement(autoeg_auc, base_auc);
    if (!(improvement > 0.0)) {
        log << "improvement " << improvement << " not positive";
        return false;
    }
    log << "autoeg beats noeg by " << 100.0 * improvement << "% AUC";
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"distance_oracle", 5.0, distance_oracle},
        {"metric_axioms", 5.0, metric_axioms},
        {"library_oracle", 10.0, library_oracle},
        {"grafting_invariants", 30.0, grafting_invariants},
        {"fig3_fixture", 5.0, fig3_fixture},
        {"gradient_checks", 30.0, gradient_checks},
        {"tutor_bookkeeping", 120.0, tutor_bookkeeping},
        {"determinism", 300.0, determinism},
        {"baseline_health", 600.0, baseline_health},
        {"directional_claim", 2700.0, directional_claim},
    };

    std::vector<std::string> selected(argv + 1, argv + argc);
    int failures = 0;
    for (const Criterion& criterion : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), criterion.name) == selected.end()) {
            continue;
        }
        std::ostringstream detail;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail << "exception: " << e.what();
            ok = false;
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (ok && elapsed > criterion.time_budget_s) {
            ok = false;
            detail << " [exceeded time budget of " << criterion.time_budget_s << " s]";
        }
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << criterion.name << " (" << elapsed
                  << " s): " << detail.str() << "\n"
                  << std::flush;
        failures += ok ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
