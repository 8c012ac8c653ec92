#include "graftrl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "graftrl/csv.hpp"
#include "graftrl/rng.hpp"

namespace graftrl {

double auc(const std::vector<double>& returns) {
    if (returns.empty()) {
        throw std::invalid_argument("auc: empty return series");
    }
    double sum = 0.0;
    for (double r : returns) {
        sum += r;
    }
    return sum;
}

double auc_improvement(double a, double b) {
    if (b == 0.0) {
        throw std::invalid_argument("auc_improvement: baseline is zero");
    }
    return (a - b) / std::abs(b);
}

double policy_quality(const std::vector<double>& returns, std::size_t k) {
    if (k == 0 || returns.size() < k) {
        throw std::invalid_argument("policy_quality: need at least k returns");
    }
    double sum = 0.0;
    for (std::size_t i = returns.size() - k; i < returns.size(); ++i) {
        sum += returns[i];
    }
    return sum / static_cast<double>(k);
}

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::NoEg:
            return "noeg";
        case Mode::Eg:
            return "eg";
        case Mode::AutoEg:
            return "autoeg";
    }
    return "?";
}

Mode mode_from_string(const std::string& name) {
    if (name == "noeg") {
        return Mode::NoEg;
    }
    if (name == "eg") {
        return Mode::Eg;
    }
    if (name == "autoeg") {
        return Mode::AutoEg;
    }
    throw std::runtime_error("unknown mode '" + name + "' (expected noeg|eg|autoeg)");
}

ExperimentConfig experiment_from_config(const Config& cfg) {
    ExperimentConfig out;
    out.raw = cfg;
    out.env_name = cfg.get_string("run.env");
    out.mode = mode_from_string(cfg.get_string("run.mode"));
    out.episodes = cfg.get_int("run.episodes");
    out.policy_window = static_cast<std::size_t>(cfg.get_int("run.policy_window"));
    out.out_dir = cfg.get_string("run.out");
    if (cfg.has("run.epsilon")) {
        out.epsilon = cfg.get_double("run.epsilon");
    }

    out.seeds.clear();
    for (const std::string& field : csv::split(cfg.get_string("run.seeds"), ',')) {
        if (field.empty()) {
            continue;
        }
        out.seeds.push_back(std::stoull(field));
    }

    if (out.seeds.empty()) {
        throw std::runtime_error("config: run.seeds must list at least one seed");
    }
    if (out.episodes <= 0) {
        throw std::runtime_error("config: run.episodes must be positive");
    }
    if (out.mode == Mode::Eg && !out.epsilon) {
        throw std::runtime_error("config: eg mode requires run.epsilon");
    }
    if (out.mode != Mode::Eg && out.epsilon) {
        throw std::runtime_error("config: run.epsilon only applies to eg mode");
    }
    if (out.epsilon && !(*out.epsilon >= 0.0)) {
        throw std::runtime_error("config: run.epsilon must be non-negative");
    }
    return out;
}

RunConfig run_config_from(const Config& cfg) {
    RunConfig rc;
    rc.ddpg.hidden1 = cfg.get_int("ddpg.hidden1");
    rc.ddpg.hidden2 = cfg.get_int("ddpg.hidden2");
    rc.ddpg.gamma = cfg.get_double("ddpg.gamma");
    rc.ddpg.tau = cfg.get_double("ddpg.tau");
    rc.ddpg.actor_lr = cfg.get_double("ddpg.actor_lr");
    rc.ddpg.critic_lr = cfg.get_double("ddpg.critic_lr");
    rc.ddpg.ou_theta = cfg.get_double("ddpg.ou_theta");
    rc.ddpg.ou_sigma = cfg.get_double("ddpg.ou_sigma");
    rc.ddpg.final_init_scale = cfg.get_double("ddpg.final_init_scale");
    rc.eg_batch = static_cast<std::size_t>(cfg.get_int("ddpg.batch_size"));
    rc.buffer_capacity = static_cast<std::size_t>(cfg.get_u64("buffer.capacity"));
    rc.buffer_warmup = static_cast<std::size_t>(cfg.get_u64("buffer.warmup"));
    rc.tutor_batch = static_cast<std::size_t>(cfg.get_int("tutor.batch_size"));
    rc.tutor_gamma = cfg.get_double("tutor.gamma");
    rc.tutor_capacity = static_cast<std::size_t>(cfg.get_u64("tutor.capacity"));
    rc.tutor_warmup = static_cast<std::size_t>(cfg.get_u64("tutor.warmup"));
    rc.tutor_sigma0 = cfg.get_double("tutor.sigma0");
    rc.tutor_sigma1 = cfg.get_double("tutor.sigma1");
    rc.tutor_zero_init = cfg.get_bool("tutor.zero_init");
    rc.graft.n_ext = static_cast<std::size_t>(cfg.get_int("graft.n_ext"));
    rc.graft.n_gft = static_cast<std::size_t>(cfg.get_int("graft.n_gft"));
    rc.graft.theta = static_cast<std::size_t>(cfg.get_int("graft.theta"));
    rc.lib_bin_size = cfg.get_double("lib.bin_size");
    rc.lib_bin_capacity = static_cast<std::size_t>(cfg.get_u64("lib.bin_capacity"));
    rc.horizon = static_cast<std::size_t>(cfg.get_int("autoeg.horizon"));
    if (rc.horizon == 0) {
        throw std::runtime_error("config: autoeg.horizon must be positive");
    }
    return rc;
}

void write_run_csv(std::ostream& out, const RunLog& log) {
    out << "episode,return,epsilon_used,n_synth_generated,n_synth_stored,synth_ratio,"
           "tutor_reward\n";
    for (const EpisodeRecord& rec : log.episodes) {
        out << rec.episode << ',' << csv::format_double(rec.ret) << ','
            << csv::format_optional(rec.epsilon_used) << ','
            << csv::format_optional(rec.n_synth_generated) << ','
            << csv::format_optional(rec.n_synth_stored) << ','
            << csv::format_optional(rec.synth_ratio) << ','
            << csv::format_optional(rec.tutor_reward) << '\n';
    }
}

RunLog read_run_csv(std::istream& in) {
    RunLog log;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("run csv: empty file");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = csv::split(line, ',');
        if (fields.size() != 7) {
            throw std::runtime_error("run csv: expected 7 fields, got " +
                                     std::to_string(fields.size()));
        }
        EpisodeRecord rec;
        rec.episode = static_cast<int>(csv::parse_double(fields[0]));
        rec.ret = csv::parse_double(fields[1]);
        if (!fields[2].empty()) {
            rec.epsilon_used = csv::parse_double(fields[2]);
        }
        if (!fields[3].empty()) {
            rec.n_synth_generated = static_cast<std::size_t>(csv::parse_double(fields[3]));
        }
        if (!fields[4].empty()) {
            rec.n_synth_stored = static_cast<std::size_t>(csv::parse_double(fields[4]));
        }
        if (!fields[5].empty()) {
            rec.synth_ratio = csv::parse_double(fields[5]);
        }
        if (!fields[6].empty()) {
            rec.tutor_reward = csv::parse_double(fields[6]);
        }
        log.episodes.push_back(rec);
    }
    return log;
}

std::vector<double> returns_of(const RunLog& log) {
    std::vector<double> out;
    out.reserve(log.episodes.size());
    for (const EpisodeRecord& rec : log.episodes) {
        out.push_back(rec.ret);
    }
    return out;
}

namespace {

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};

MeanStd mean_stddev(const std::vector<double>& xs) {
    MeanStd out;
    if (xs.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double sq = 0.0;
        for (double x : xs) {
            sq += (x - out.mean) * (x - out.mean);
        }
        out.stddev = std::sqrt(sq / static_cast<double>(xs.size() - 1));
    }
    return out;
}

void finalize_report(ExperimentReport& report) {
    std::vector<double> aucs;
    std::vector<double> pqs;
    for (const RunSummary& run : report.runs) {
        aucs.push_back(run.auc);
        pqs.push_back(run.policy_quality);
    }
    const MeanStd a = mean_stddev(aucs);
    const MeanStd p = mean_stddev(pqs);
    report.auc_mean = a.mean;
    report.auc_stddev = a.stddev;
    report.policy_quality_mean = p.mean;
    report.policy_quality_stddev = p.stddev;
}

std::string run_file_name(const ExperimentConfig& cfg, std::uint64_t seed) {
    std::string name = "run_" + mode_name(cfg.mode);
    if (cfg.mode == Mode::Eg) {
        name += "_eps" + csv::format_double(*cfg.epsilon);
    }
    name += "_seed" + std::to_string(seed) + ".csv";
    return name;
}

RunLog execute_run(const ExperimentConfig& cfg, std::uint64_t seed) {
    const auto env = make_env(cfg.env_name, cfg.raw);
    const RunConfig rc = run_config_from(cfg.raw);
    Rng rng(seed);
    switch (cfg.mode) {
        case Mode::NoEg:
            return ddpg_train(rc, *env, cfg.episodes, rng);
        case Mode::Eg:
            return eg_train(rc, *env, cfg.episodes, *cfg.epsilon, rng);
        case Mode::AutoEg:
            return autoeg_train(rc, *env, cfg.episodes, rng);
    }
    throw std::logic_error("execute_run: bad mode");
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    run_config_from(cfg.raw);  // validate module keys up front
    std::filesystem::create_directories(cfg.out_dir);

    std::vector<RunLog> logs(cfg.seeds.size());
    std::vector<std::exception_ptr> errors(cfg.seeds.size());

    // Share-nothing seed runs, at most hardware_concurrency at a time.
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(cfg.seeds.size(),
                                                       std::thread::hardware_concurrency()));
    std::size_t next = 0;
    while (next < cfg.seeds.size()) {
        const std::size_t batch = std::min(workers, cfg.seeds.size() - next);
        std::vector<std::thread> threads;
        threads.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            const std::size_t idx = next + i;
            threads.emplace_back([&, idx] {
                try {
                    logs[idx] = execute_run(cfg, cfg.seeds[idx]);
                } catch (...) {
                    errors[idx] = std::current_exception();
                }
            });
        }
        for (std::thread& t : threads) {
            t.join();
        }
        next += batch;
    }

    ExperimentReport report;
    std::exception_ptr first_error;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        if (errors[i]) {
            if (!first_error) {
                first_error = errors[i];
            }
            continue;
        }
        const std::filesystem::path path = cfg.out_dir / run_file_name(cfg, cfg.seeds[i]);
        std::ofstream out(path, std::ios::trunc);
        if (!out) {
            throw std::runtime_error("run_experiment: cannot write " + path.string());
        }
        write_run_csv(out, logs[i]);

        const std::vector<double> returns = returns_of(logs[i]);
        RunSummary summary;
        summary.seed = cfg.seeds[i];
        summary.auc = auc(returns);
        summary.policy_quality =
            policy_quality(returns, std::min<std::size_t>(cfg.policy_window, returns.size()));
        summary.csv_path = path;
        report.runs.push_back(summary);
    }
    if (first_error) {
        // Partial CSVs for completed seeds stay on disk; the failure surfaces.
        std::rethrow_exception(first_error);
    }

    finalize_report(report);
    std::ofstream agg(cfg.out_dir / "aggregate.csv", std::ios::trunc);
    if (!agg) {
        throw std::runtime_error("run_experiment: cannot write aggregate.csv");
    }
    write_aggregate_csv(agg, report);
    return report;
}

void write_aggregate_csv(std::ostream& out, const ExperimentReport& report) {
    const std::size_t n = report.runs.size();
    out << "metric,mean,stddev,n_seeds\n";
    out << "auc," << csv::format_double(report.auc_mean) << ','
        << csv::format_double(report.auc_stddev) << ',' << n << '\n';
    out << "policy_quality," << csv::format_double(report.policy_quality_mean) << ','
        << csv::format_double(report.policy_quality_stddev) << ',' << n << '\n';
}

ExperimentReport report_from_dir(const std::filesystem::path& dir, std::size_t policy_window) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with("run_") && name.ends_with(".csv")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw std::runtime_error("report: no run_*.csv files in " + dir.string());
    }

    ExperimentReport report;
    for (const std::filesystem::path& path : files) {
        std::ifstream in(path);
        if (!in) {
            throw std::runtime_error("report: cannot read " + path.string());
        }
        const RunLog log = read_run_csv(in);
        const std::vector<double> returns = returns_of(log);
        RunSummary summary;
        const std::string stem = path.stem().string();
        const std::size_t seed_pos = stem.rfind("_seed");
        summary.seed = seed_pos == std::string::npos
                           ? 0
                           : std::stoull(stem.substr(seed_pos + 5));
        summary.auc = auc(returns);
        summary.policy_quality =
            policy_quality(returns, std::min<std::size_t>(policy_window, returns.size()));
        summary.csv_path = path;
        report.runs.push_back(summary);
    }
    finalize_report(report);
    return report;
}

}  // namespace graftrl
