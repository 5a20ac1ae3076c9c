#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qenc/metrics.hpp"
#include "qenc/model.hpp"
#include "qenc/tdvp.hpp"

namespace qenc {

enum class Method { closed, lindblad_analytic, lindblad_rk4, mps, exact_oracle };
enum class EnsembleKind { bell_grid, logical_grid, single };

std::string to_string(Method m);
std::string to_string(EnsembleKind e);

struct ExperimentConfig {
    ModelParams model;
    TdvpOptions tdvp;
    Method method = Method::mps;
    EnsembleKind ensemble = EnsembleKind::bell_grid;
    int ensemble_thin = 1;  // keep realizations 0, k, 2k, ... of the full grid
    std::vector<std::string> strategies = {"AF"};
    std::string logical_strategy = "AF";  // spans the logical-grid states
    std::string single_state = "S";       // name or 8 comma-separated reals
    std::string single_basis = "bell";    // bell | eigen
    int observe_every = 1;
    std::string out_dir;
    int workers = 0;
    bool write_realizations = false;
    bool write_rho = false;
    bool fit = false;
    bool allow_unspecified_coherences = false;
    long dim_cap = 4096;

    void validate() const;
};

// All recognized config keys, in serialization order.
const std::vector<std::string>& config_keys();

// Applies one key = value pair; throws std::invalid_argument on unknown keys
// or unparsable values.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);

// Strict flat key = value format; '#' starts a comment.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Initial states of the configured ensemble with their grid indices.
struct Ensemble {
    std::vector<int> ids;
    std::vector<TwoQubitState> states;
};
Ensemble build_ensemble(const ExperimentConfig& cfg);

struct RunResult {
    std::vector<double> times;
    // metric -> strategy -> aggregated series
    std::map<std::string, std::map<std::string, TimeSeries>> series;
    std::vector<std::string> files_written;
};

// Executes the configured experiment and writes CSV + metadata into
// cfg.out_dir. Deterministic: identical configs produce byte-identical CSV
// files for any worker count.
RunResult run_experiment(const ExperimentConfig& cfg);

// Recomputes encoded-qubit metrics for new strategies from the stored open
// trajectories of an existing run directory (requires write_rho = true).
RunResult encode_metrics(const std::string& run_dir,
                         const std::vector<std::string>& strategies);

struct CompareReport {
    std::vector<std::string> columns;
    std::vector<double> max_abs_diff;
    std::string report_path;
};

// Per-time absolute differences of all common metric columns (and density
// matrix elements when both runs stored them); grids must match.
CompareReport compare_runs(const std::string& dir_a, const std::string& dir_b,
                           const std::string& out_path);

}  // namespace qenc
