#include "graftrl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "graftrl/config.hpp"
#include "graftrl/rng.hpp"

namespace graftrl {

namespace {

double clamp(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

void check_active(bool done, const char* name) {
    if (done) {
        throw std::logic_error(std::string(name) + ": step() after episode end; call reset()");
    }
}

ActionVec clamp_action(const ActionVec& a, const EnvSpec& spec, const char* name) {
    if (a.size() != static_cast<std::size_t>(spec.action_dim)) {
        throw std::invalid_argument(std::string(name) + ": action dimension mismatch");
    }
    ActionVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = clamp(a[i], spec.action_low[i], spec.action_high[i]);
    }
    return out;
}

}  // namespace

LineWalker::LineWalker(LineWalkerParams p) : p_(p) {
    spec_ = EnvSpec{"linewalker", 3, 2, {-1.0, -1.0}, {1.0, 1.0}, p_.max_steps};
}

StateVec LineWalker::reset(std::uint64_t seed) {
    Rng rng(seed);
    pos_ = rng.uniform(-p_.reset_jitter, p_.reset_jitter);
    vel_ = rng.uniform(-p_.reset_jitter, p_.reset_jitter);
    tilt_ = rng.uniform(-p_.reset_jitter, p_.reset_jitter);
    steps_ = 0;
    done_ = false;
    return {pos_, vel_, tilt_};
}

void LineWalker::set_state(double pos, double vel, double tilt) {
    pos_ = pos;
    vel_ = vel;
    tilt_ = tilt;
}

StepResult LineWalker::step(const ActionVec& action) {
    check_active(done_, "LineWalker");
    const ActionVec a = clamp_action(action, spec_, "LineWalker");
    const double v_new = clamp(vel_ + p_.thrust_gain * a[0] - p_.drag * vel_, -p_.v_limit,
                               p_.v_limit);
    const double pos_new = pos_ + p_.pos_gain * v_new;
    const double tilt_new = tilt_ + p_.balance_gain * a[1] + p_.coupling * v_new;
    double r = v_new - p_.action_cost * (a[0] * a[0] + a[1] * a[1]);

    pos_ = pos_new;
    vel_ = v_new;
    tilt_ = tilt_new;
    ++steps_;

    StepResult out;
    out.s_next = {pos_, vel_, tilt_};
    if (std::abs(tilt_new) > p_.fall_limit) {
        r -= p_.fall_penalty;
        out.done = true;
        out.reason = DoneReason::Terminal;
    } else if (steps_ >= p_.max_steps) {
        out.done = true;
        out.reason = DoneReason::Timeout;
    }
    out.r = r;
    done_ = out.done;
    return out;
}

PointGoal::PointGoal(PointGoalParams p) : p_(p) {
    spec_ = EnvSpec{"pointgoal", 4, 2, {-1.0, -1.0}, {1.0, 1.0}, p_.max_steps};
}

StateVec PointGoal::reset(std::uint64_t seed) {
    Rng rng(seed);
    x_ = rng.uniform(-p_.reset_jitter, p_.reset_jitter);
    y_ = rng.uniform(-p_.reset_jitter, p_.reset_jitter);
    vx_ = rng.uniform(-p_.reset_jitter, p_.reset_jitter);
    vy_ = rng.uniform(-p_.reset_jitter, p_.reset_jitter);
    steps_ = 0;
    done_ = false;
    return {x_, y_, vx_, vy_};
}

void PointGoal::set_state(double x, double y, double vx, double vy) {
    x_ = x;
    y_ = y;
    vx_ = vx;
    vy_ = vy;
}

StepResult PointGoal::step(const ActionVec& action) {
    check_active(done_, "PointGoal");
    const ActionVec a = clamp_action(action, spec_, "PointGoal");
    const double dist_before = std::hypot(x_ - p_.goal_x, y_ - p_.goal_y);
    vx_ = clamp(vx_ + p_.accel_gain * a[0], -p_.v_limit, p_.v_limit);
    vy_ = clamp(vy_ + p_.accel_gain * a[1], -p_.v_limit, p_.v_limit);
    x_ += p_.pos_gain * vx_;
    y_ += p_.pos_gain * vy_;
    const double dist_after = std::hypot(x_ - p_.goal_x, y_ - p_.goal_y);
    double r = dist_before - dist_after;
    ++steps_;

    StepResult out;
    out.s_next = {x_, y_, vx_, vy_};
    if (dist_after < p_.goal_radius) {
        r += p_.goal_bonus;
        out.done = true;
        out.reason = DoneReason::Terminal;
    } else if (steps_ >= p_.max_steps) {
        out.done = true;
        out.reason = DoneReason::Timeout;
    }
    out.r = r;
    done_ = out.done;
    return out;
}

PendulumSwingup::PendulumSwingup(PendulumParams p) : p_(p) {
    spec_ = EnvSpec{"pendulum", 3, 1, {-2.0}, {2.0}, p_.max_steps};
}

StateVec PendulumSwingup::observation() const { return {std::cos(theta_), std::sin(theta_), omega_}; }

StateVec PendulumSwingup::reset(std::uint64_t seed) {
    constexpr double pi = 3.14159265358979323846;
    Rng rng(seed);
    theta_ = pi + rng.uniform(-p_.reset_jitter, p_.reset_jitter);
    omega_ = rng.uniform(-p_.reset_jitter, p_.reset_jitter);
    steps_ = 0;
    done_ = false;
    return observation();
}

void PendulumSwingup::set_state(double theta, double omega) {
    theta_ = theta;
    omega_ = omega;
}

namespace {

// Wrap to [-pi, pi].
double wrap_angle(double theta) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    return theta - two_pi * std::round(theta / two_pi);
}

}  // namespace

StepResult PendulumSwingup::step(const ActionVec& action) {
    check_active(done_, "PendulumSwingup");
    const ActionVec a = clamp_action(action, spec_, "PendulumSwingup");
    constexpr double pi = 3.14159265358979323846;
    const double torque = a[0];
    omega_ = clamp(omega_ + p_.dt * (-p_.gravity * std::sin(theta_ + pi) * p_.length_scale +
                                     p_.torque_gain * torque),
                   -p_.omega_limit, p_.omega_limit);
    theta_ += p_.dt * omega_;
    const double wrapped = wrap_angle(theta_);
    const double r = -(p_.angle_cost * wrapped * wrapped + p_.omega_cost * omega_ * omega_ +
                       p_.torque_cost * torque * torque);
    ++steps_;

    StepResult out;
    out.s_next = observation();
    out.r = r;
    if (steps_ >= p_.max_steps) {
        out.done = true;
        out.reason = DoneReason::Timeout;
    }
    done_ = out.done;
    return out;
}

std::unique_ptr<Env> make_env(const std::string& name, const Config& cfg) {
    const double jitter = cfg.get_double("env.reset_jitter");
    if (name == "linewalker") {
        LineWalkerParams p;
        p.thrust_gain = cfg.get_double("env.linewalker.thrust_gain");
        p.drag = cfg.get_double("env.linewalker.drag");
        p.v_limit = cfg.get_double("env.linewalker.v_limit");
        p.pos_gain = cfg.get_double("env.linewalker.pos_gain");
        p.balance_gain = cfg.get_double("env.linewalker.balance_gain");
        p.coupling = cfg.get_double("env.linewalker.coupling");
        p.action_cost = cfg.get_double("env.linewalker.action_cost");
        p.fall_limit = cfg.get_double("env.linewalker.fall_limit");
        p.fall_penalty = cfg.get_double("env.linewalker.fall_penalty");
        p.max_steps = cfg.get_int("env.linewalker.max_steps");
        p.reset_jitter = jitter;
        return std::make_unique<LineWalker>(p);
    }
    if (name == "pointgoal") {
        PointGoalParams p;
        p.accel_gain = cfg.get_double("env.pointgoal.accel_gain");
        p.v_limit = cfg.get_double("env.pointgoal.v_limit");
        p.pos_gain = cfg.get_double("env.pointgoal.pos_gain");
        p.goal_x = cfg.get_double("env.pointgoal.goal_x");
        p.goal_y = cfg.get_double("env.pointgoal.goal_y");
        p.goal_radius = cfg.get_double("env.pointgoal.goal_radius");
        p.goal_bonus = cfg.get_double("env.pointgoal.goal_bonus");
        p.max_steps = cfg.get_int("env.pointgoal.max_steps");
        p.reset_jitter = jitter;
        return std::make_unique<PointGoal>(p);
    }
    if (name == "pendulum") {
        PendulumParams p;
        p.dt = cfg.get_double("env.pendulum.dt");
        p.gravity = cfg.get_double("env.pendulum.gravity");
        p.length_scale = cfg.get_double("env.pendulum.length_scale");
        p.torque_gain = cfg.get_double("env.pendulum.torque_gain");
        p.omega_limit = cfg.get_double("env.pendulum.omega_limit");
        p.angle_cost = cfg.get_double("env.pendulum.angle_cost");
        p.omega_cost = cfg.get_double("env.pendulum.omega_cost");
        p.torque_cost = cfg.get_double("env.pendulum.torque_cost");
        p.max_steps = cfg.get_int("env.pendulum.max_steps");
        p.reset_jitter = jitter;
        return std::make_unique<PendulumSwingup>(p);
    }
    throw std::runtime_error("make_env: unknown environment '" + name + "'");
}

}  // namespace graftrl
