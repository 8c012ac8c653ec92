// Experiment runner: trains no-EG / EG / AutoEG agents on the bundled
// environments, recomputes aggregates, and replays the two-trial splice demo.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "graftrl/csv.hpp"
#include "graftrl/fixtures.hpp"
#include "graftrl/harness.hpp"

namespace {

void print_report(const graftrl::ExperimentReport& report) {
    std::cout << "seed,auc,policy_quality\n";
    for (const graftrl::RunSummary& run : report.runs) {
        std::cout << run.seed << ',' << graftrl::csv::format_double(run.auc) << ','
                  << graftrl::csv::format_double(run.policy_quality) << '\n';
    }
    std::ostringstream agg;
    graftrl::write_aggregate_csv(agg, report);
    std::cout << agg.str();
}

int run_command(const std::string& config_path,
                const std::vector<std::pair<std::string, std::string>>& overrides) {
    graftrl::Config cfg = config_path.empty() ? graftrl::Config()
                                              : graftrl::Config::from_file(config_path);
    for (const auto& [key, value] : overrides) {
        cfg.set(key, value);
    }
    const graftrl::ExperimentConfig exp = graftrl::experiment_from_config(cfg);
    const graftrl::ExperimentReport report = graftrl::run_experiment(exp);
    std::cout << "wrote " << report.runs.size() << " run file(s) to " << exp.out_dir.string()
              << "\n";
    print_report(report);
    return 0;
}

int report_command(const std::string& dir, int policy_window) {
    const graftrl::ExperimentReport report =
        graftrl::report_from_dir(dir, static_cast<std::size_t>(policy_window));
    print_report(report);
    return 0;
}

int graft_demo_command() {
    const graftrl::SpliceDemo demo = graftrl::make_splice_demo();
    graftrl::SegmentLibrary lib(1.0, 1000);
    graftrl::GraftStats stats;
    const auto synthetic = graftrl::run_splice_demo(demo, lib, &stats);

    std::cout << "fall trial quality:  "
              << graftrl::csv::format_double(graftrl::quality(demo.fall_trial.transitions))
              << "\n";
    std::cout << "slow trial quality:  "
              << graftrl::csv::format_double(graftrl::quality(demo.slow_trial.transitions))
              << "\n";
    std::cout << "candidates found: " << stats.candidates_found
              << ", qualified: " << stats.candidates_qualified
              << ", returned: " << stats.returned << "\n\n";

    for (const graftrl::SyntheticTrajectory& st : synthetic) {
        std::cout << "synthetic trajectory: quality "
                  << graftrl::csv::format_double(st.quality) << ", junction error "
                  << graftrl::csv::format_double(st.junction_error) << ", head length "
                  << st.head_length << "\n";
        graftrl::Trajectory out;
        out.transitions = st.transitions;
        graftrl::write_trajectory_csv(std::cout, {out});
    }
    return synthetic.empty() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experience-grafting reinforcement learning toolkit"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Train one condition across seeds");
    std::string env_name;
    std::string mode;
    std::string epsilon;
    std::string episodes;
    std::string seeds;
    std::string out_dir;
    std::string config_path;
    run->add_option("--env", env_name, "linewalker | pointgoal | pendulum");
    run->add_option("--mode", mode, "noeg | eg | autoeg");
    run->add_option("--epsilon", epsilon, "fixed grafting threshold (eg mode)");
    run->add_option("--episodes", episodes, "episodes per run");
    run->add_option("--seeds", seeds, "comma-separated seed list");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--config", config_path, "flat key=value config file");

    // report
    auto* report = app.add_subcommand("report", "Recompute aggregates from run CSVs");
    std::string report_dir;
    int policy_window = 100;
    report->add_option("--in", report_dir, "directory with run_*.csv files")->required();
    report->add_option("--policy-window", policy_window, "episodes averaged for policy quality");

    // graft-demo
    auto* demo = app.add_subcommand("graft-demo", "Replay the two-trial splice demo");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            std::vector<std::pair<std::string, std::string>> overrides;
            if (!env_name.empty()) overrides.emplace_back("run.env", env_name);
            if (!mode.empty()) overrides.emplace_back("run.mode", mode);
            if (!epsilon.empty()) overrides.emplace_back("run.epsilon", epsilon);
            if (!episodes.empty()) overrides.emplace_back("run.episodes", episodes);
            if (!seeds.empty()) overrides.emplace_back("run.seeds", seeds);
            if (!out_dir.empty()) overrides.emplace_back("run.out", out_dir);
            return run_command(config_path, overrides);
        }
        if (*report) {
            return report_command(report_dir, policy_window);
        }
        if (*demo) {
            return graft_demo_command();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
