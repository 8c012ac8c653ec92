#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graftrl/autoeg.hpp"
#include "graftrl/config.hpp"

namespace graftrl {

// Area under the learning curve: the plain sum of per-episode returns.
double auc(const std::vector<double>& returns);

// (a - b) / |b|; the baseline b must be nonzero.
double auc_improvement(double a, double b);

// Mean of the final k returns.
double policy_quality(const std::vector<double>& returns, std::size_t k);

enum class Mode { NoEg, Eg, AutoEg };

std::string mode_name(Mode m);
Mode mode_from_string(const std::string& name);

struct ExperimentConfig {
    std::string env_name = "linewalker";
    Mode mode = Mode::NoEg;
    std::optional<double> epsilon;  // required exactly when mode == Eg
    int episodes = 2000;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::size_t policy_window = 100;
    std::filesystem::path out_dir = "runs";
    Config raw;  // module defaults and overrides
};

// Reads the run.* keys out of a flat config and validates them.
ExperimentConfig experiment_from_config(const Config& cfg);

// Module parameters for one training run.
RunConfig run_config_from(const Config& cfg);

struct RunSummary {
    std::uint64_t seed = 0;
    double auc = 0.0;
    double policy_quality = 0.0;
    std::filesystem::path csv_path;
};

struct ExperimentReport {
    std::vector<RunSummary> runs;
    double auc_mean = 0.0;
    double auc_stddev = 0.0;
    double policy_quality_mean = 0.0;
    double policy_quality_stddev = 0.0;
};

// One run per seed (seeds may execute concurrently; runs share nothing).
// Writes one curve CSV per run plus aggregate.csv into the output directory.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Per-run curve file: episode,return,epsilon_used,n_synth_generated,
// n_synth_stored,synth_ratio,tutor_reward with empty fields where a column
// does not apply to the mode.
void write_run_csv(std::ostream& out, const RunLog& log);
RunLog read_run_csv(std::istream& in);

// Aggregate file: metric,mean,stddev,n_seeds (sample standard deviation).
void write_aggregate_csv(std::ostream& out, const ExperimentReport& report);

// Recomputes the aggregate from the run_*.csv files found in a directory.
ExperimentReport report_from_dir(const std::filesystem::path& dir, std::size_t policy_window);

std::vector<double> returns_of(const RunLog& log);

}  // namespace graftrl
