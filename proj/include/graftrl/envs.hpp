#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "graftrl/core_math.hpp"

namespace graftrl {

class Config;

enum class DoneReason { None, Terminal, Timeout };

struct StepResult {
    StateVec s_next;
    double r = 0.0;
    bool done = false;
    DoneReason reason = DoneReason::None;
};

struct EnvSpec {
    std::string name;
    int state_dim = 0;
    int action_dim = 0;
    std::vector<double> action_low;
    std::vector<double> action_high;
    int max_steps = 0;
};

// Deterministic episodic environment. reset(seed) places the state at the
// nominal start plus a seeded uniform perturbation; step() is a pure function
// of (state, clamped action, step count), so replaying an action sequence
// from the same reset reproduces the trajectory bit-exactly. Stepping a
// finished episode is a protocol error.
class Env {
public:
    virtual ~Env() = default;
    virtual const EnvSpec& spec() const = 0;
    virtual StateVec reset(std::uint64_t seed) = 0;
    virtual StepResult step(const ActionVec& a) = 0;
};

// Walker analogue: state (position, velocity, tilt), actions (thrust,
// balance). Speed pays, but velocity feeds the tilt; beyond the fall limit
// the episode ends with a penalty.
struct LineWalkerParams {
    double thrust_gain = 0.1;
    double drag = 0.01;
    double v_limit = 2.0;
    double pos_gain = 0.1;
    double balance_gain = 0.05;
    double coupling = 0.01;
    double action_cost = 0.01;
    double fall_limit = 1.0;
    double fall_penalty = 1.0;
    int max_steps = 200;
    double reset_jitter = 0.05;
};

class LineWalker final : public Env {
public:
    explicit LineWalker(LineWalkerParams p = {});
    const EnvSpec& spec() const override { return spec_; }
    StateVec reset(std::uint64_t seed) override;
    StepResult step(const ActionVec& a) override;
    // Test/fixture hook: overwrite the physical state mid-episode.
    void set_state(double pos, double vel, double tilt);

private:
    LineWalkerParams p_;
    EnvSpec spec_;
    double pos_ = 0.0, vel_ = 0.0, tilt_ = 0.0;
    int steps_ = 0;
    bool done_ = true;
};

// Reach the fixed goal; reward is per-step progress plus a terminal bonus.
struct PointGoalParams {
    double accel_gain = 0.1;
    double v_limit = 1.0;
    double pos_gain = 0.1;
    double goal_x = 5.0;
    double goal_y = 5.0;
    double goal_radius = 0.2;
    double goal_bonus = 5.0;
    int max_steps = 150;
    double reset_jitter = 0.05;
};

class PointGoal final : public Env {
public:
    explicit PointGoal(PointGoalParams p = {});
    const EnvSpec& spec() const override { return spec_; }
    StateVec reset(std::uint64_t seed) override;
    StepResult step(const ActionVec& a) override;
    void set_state(double x, double y, double vx, double vy);

private:
    PointGoalParams p_;
    EnvSpec spec_;
    double x_ = 0.0, y_ = 0.0, vx_ = 0.0, vy_ = 0.0;
    int steps_ = 0;
    bool done_ = true;
};

// Torque-limited swing-up from the hanging position; dense negative reward,
// no early termination. Observation is (cos angle, sin angle, angular
// velocity); angle zero is upright.
struct PendulumParams {
    double dt = 0.05;
    double gravity = 9.8;
    double length_scale = 1.5;
    double torque_gain = 3.0;
    double omega_limit = 8.0;
    double angle_cost = 1.0;
    double omega_cost = 0.1;
    double torque_cost = 0.001;
    int max_steps = 200;
    double reset_jitter = 0.05;
};

class PendulumSwingup final : public Env {
public:
    explicit PendulumSwingup(PendulumParams p = {});
    const EnvSpec& spec() const override { return spec_; }
    StateVec reset(std::uint64_t seed) override;
    StepResult step(const ActionVec& a) override;
    void set_state(double theta, double omega);

private:
    StateVec observation() const;

    PendulumParams p_;
    EnvSpec spec_;
    double theta_ = 0.0, omega_ = 0.0;
    int steps_ = 0;
    bool done_ = true;
};

// Builds an environment by name ("linewalker", "pointgoal", "pendulum") with
// its constants taken from the configuration.
std::unique_ptr<Env> make_env(const std::string& name, const Config& cfg);

}  // namespace graftrl
