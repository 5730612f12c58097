#pragma once

#include "xbed/bed/config.hpp"
#include "xbed/bed/truth.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace xbed::bed {

struct IterationRecord {
    Eigen::Index iteration = 0;
    Eigen::Index n_samples = 0;
    double error = 0.0;        // log-PDF error against the frozen truth
    double wall_time = 0.0;    // seconds spent on this iteration
    Matrix batch;              // points added in this iteration (initial design for iteration 0)
    Vector batch_qoi;
    std::uint64_t fit_seed = 0;
    bool retried = false;      // first training attempt failed
    bool short_batch = false;  // fewer points than requested were added
    std::size_t failures = 0;  // batch points the system could not evaluate
    std::size_t off_grid = 0;  // surrogate outputs outside the p_mu grid
    std::size_t nonfinite = 0; // floored acquisition scores
};

enum class RunStatus { Complete, Aborted, Exhausted, Interrupted };
std::string to_string(RunStatus s);

struct ExperimentLog {
    std::vector<IterationRecord> records;
    Matrix inputs;   // full dataset in acquisition order
    Vector outputs;
    RunStatus status = RunStatus::Complete;
    std::string message;
    std::filesystem::path checkpoint;  // model of the last record
    std::filesystem::path directory;
};

/// Surrogate fitted to one dataset, with what is needed to restore it.
struct FittedSurrogate {
    std::shared_ptr<const Surrogate> model;
    nlohmann::json checkpoint;
};

FittedSurrogate fit_surrogate(const ExperimentConfig& cfg, const systems::SystemPtr& system, const Matrix& inputs,
                              const Vector& outputs, std::uint64_t seed, const FittedSurrogate* previous = nullptr);

/// Rebuilds a surrogate from fit_surrogate's checkpoint on the same data.
FittedSurrogate restore_surrogate(const ExperimentConfig& cfg, const systems::SystemPtr& system, const Matrix& inputs,
                                  const Vector& outputs, const nlohmann::json& checkpoint);

/// Log-PDF error of the surrogate mean against the truth, both scaled by e0.
double surrogate_error(const Surrogate& surrogate, const TruthData& truth, double e0);

struct RunOptions {
    bool resume = false;                 // continue from the state in the output directory
    std::optional<Eigen::Index> stop_after;  // stop (as if interrupted) once this iteration is logged
    systems::SystemPtr system;           // built from the config when null
    std::shared_ptr<const TruthData> truth;  // built (or read from cache) when null
    std::function<void(const IterationRecord&)> on_iteration;
};

/// Initial design, then n_iter rounds of select, evaluate, augment, refit and
/// score. Output files are rewritten after every iteration:
///   log.csv, samples.csv, state.json, model.json, manifest.json, pdf.csv (at the end).
ExperimentLog run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Reads log.csv-equivalent data back from state.json in a run directory.
ExperimentLog load_experiment(const std::filesystem::path& dir);

/// Seeds used by the driver, all functions of (experiment seed, iteration).
namespace seeds {
std::uint64_t init(std::uint64_t seed);
std::uint64_t fit(std::uint64_t seed, Eigen::Index iteration, bool retry = false);
std::uint64_t probes(std::uint64_t seed, Eigen::Index iteration);
std::uint64_t candidates(std::uint64_t seed, Eigen::Index iteration);
std::uint64_t baseline(std::uint64_t seed, Eigen::Index iteration);
}  // namespace seeds

}  // namespace xbed::bed
