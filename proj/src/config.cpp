#include "graftrl/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace graftrl {

const std::vector<Config::KeySpec>& Config::schema() {
    static const std::vector<KeySpec> keys = {
        {"run.env", "linewalker", "environment: linewalker | pointgoal | pendulum"},
        {"run.mode", "noeg", "condition: noeg | eg | autoeg"},
        {"run.epsilon", "", "fixed grafting threshold (eg mode only)"},
        {"run.episodes", "2000", "episodes per run"},
        {"run.seeds", "1,2,3,4,5", "comma-separated seed list"},
        {"run.out", "runs", "output directory"},
        {"run.policy_window", "100", "episodes averaged for policy quality"},

        {"ddpg.hidden1", "64", "first hidden layer width"},
        {"ddpg.hidden2", "64", "second hidden layer width"},
        {"ddpg.gamma", "0.99", "discount factor"},
        {"ddpg.tau", "0.001", "soft target update rate"},
        {"ddpg.actor_lr", "0.0001", "actor step size"},
        {"ddpg.critic_lr", "0.001", "critic step size"},
        {"ddpg.ou_theta", "0.15", "exploration noise mean reversion"},
        {"ddpg.ou_sigma", "0.2", "exploration noise scale"},
        {"ddpg.batch_size", "16", "environment-agent minibatch size"},
        {"ddpg.final_init_scale", "0.003", "output layer init range"},

        {"buffer.capacity", "100000", "environment-agent replay capacity"},
        {"buffer.warmup", "1000", "transitions required before replay starts"},

        {"tutor.batch_size", "10", "tutor minibatch size"},
        {"tutor.gamma", "0.9", "tutor discount factor"},
        {"tutor.capacity", "100000", "tutor replay capacity"},
        {"tutor.warmup", "100", "tutor transitions before replay starts"},
        {"tutor.sigma0", "0.1", "tutor exploration noise, start of training"},
        {"tutor.sigma1", "0.01", "tutor exploration noise after the first half"},
        {"tutor.zero_init", "false", "diagnostic: zero-init tutor actor (constant 0.5 policy)"},

        {"graft.n_ext", "10", "extraction positions per trajectory"},
        {"graft.n_gft", "10", "grafting positions per trajectory"},
        {"graft.theta", "5", "synthetic trajectory cap per trajectory"},

        {"lib.bin_size", "1.0", "library grid cell edge length"},
        {"lib.bin_capacity", "1000", "segments per grid cell"},

        {"autoeg.horizon", "10", "tutor reward horizon in episodes"},

        {"env.reset_jitter", "0.05", "uniform reset perturbation per dimension"},

        {"env.linewalker.max_steps", "200", "episode step limit"},
        {"env.linewalker.thrust_gain", "0.1", "velocity gain per unit thrust"},
        {"env.linewalker.drag", "0.01", "velocity decay"},
        {"env.linewalker.v_limit", "2.0", "velocity clamp"},
        {"env.linewalker.pos_gain", "0.1", "position gain per unit velocity"},
        {"env.linewalker.balance_gain", "0.05", "tilt gain per unit balance action"},
        {"env.linewalker.coupling", "0.01", "tilt gain per unit velocity"},
        {"env.linewalker.action_cost", "0.01", "quadratic action penalty"},
        {"env.linewalker.fall_limit", "1.0", "tilt magnitude that ends the episode"},
        {"env.linewalker.fall_penalty", "1.0", "reward subtracted on a fall"},

        {"env.pointgoal.max_steps", "150", "episode step limit"},
        {"env.pointgoal.accel_gain", "0.1", "velocity gain per unit action"},
        {"env.pointgoal.v_limit", "1.0", "velocity clamp"},
        {"env.pointgoal.pos_gain", "0.1", "position gain per unit velocity"},
        {"env.pointgoal.goal_x", "5.0", "goal x coordinate"},
        {"env.pointgoal.goal_y", "5.0", "goal y coordinate"},
        {"env.pointgoal.goal_radius", "0.2", "distance that counts as reaching the goal"},
        {"env.pointgoal.goal_bonus", "5.0", "terminal bonus"},

        {"env.pendulum.max_steps", "200", "episode step limit"},
        {"env.pendulum.dt", "0.05", "integration step"},
        {"env.pendulum.gravity", "9.8", "gravitational acceleration"},
        {"env.pendulum.length_scale", "1.5", "gravity torque scale"},
        {"env.pendulum.torque_gain", "3.0", "action torque scale"},
        {"env.pendulum.omega_limit", "8.0", "angular velocity clamp"},
        {"env.pendulum.angle_cost", "1.0", "squared angle penalty"},
        {"env.pendulum.omega_cost", "0.1", "squared angular velocity penalty"},
        {"env.pendulum.torque_cost", "0.001", "squared torque penalty"},
    };
    return keys;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const Config::KeySpec* find_spec(const std::string& key) {
    for (const Config::KeySpec& spec : Config::schema()) {
        if (spec.key == key) {
            return &spec;
        }
    }
    return nullptr;
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("config: cannot open " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: line " + std::to_string(line_no) +
                                     ": expected key = value");
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
    if (!find_spec(key)) {
        throw std::runtime_error("config: unknown key '" + key + "'");
    }
    values_[key] = value;
}

bool Config::has(const std::string& key) const {
    auto it = values_.find(key);
    return it != values_.end() && !it->second.empty();
}

std::string Config::lookup(const std::string& key) const {
    auto it = values_.find(key);
    if (it != values_.end()) {
        return it->second;
    }
    const KeySpec* spec = find_spec(key);
    if (!spec) {
        throw std::runtime_error("config: unknown key '" + key + "'");
    }
    return spec->default_value;
}

std::string Config::get_string(const std::string& key) const { return lookup(key); }

double Config::get_double(const std::string& key) const {
    const std::string v = lookup(key);
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw std::runtime_error("config: key '" + key + "' is not a number: '" + v + "'");
    }
    return out;
}

int Config::get_int(const std::string& key) const {
    const std::string v = lookup(key);
    int out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw std::runtime_error("config: key '" + key + "' is not an integer: '" + v + "'");
    }
    return out;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const std::string v = lookup(key);
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw std::runtime_error("config: key '" + key + "' is not an unsigned integer: '" + v +
                                 "'");
    }
    return out;
}

bool Config::get_bool(const std::string& key) const {
    std::string v = lookup(key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw std::runtime_error("config: key '" + key + "' is not a boolean: '" + v + "'");
}

}  // namespace graftrl
