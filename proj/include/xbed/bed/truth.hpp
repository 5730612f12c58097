#pragma once

#include "xbed/stats/kde.hpp"
#include "xbed/systems/system.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace xbed::bed {

struct Evaluations {
    Vector values;                    // NaN where the system failed
    std::vector<Eigen::Index> failed;
    std::vector<std::string> messages;
};

/// Evaluates every row of xs, spreading rows over `workers` threads
/// (0: hardware concurrency). NumericalFailure at a point is recorded, not thrown.
Evaluations evaluate_all(const systems::System& system, const Matrix& xs, int workers = 0);

struct TruthData {
    Matrix inputs;
    Vector outputs;           // raw QoIs of the surviving test points
    Vector weights;           // prior weights of the surviving test points
    stats::PdfEstimate pdf;   // weighted KDE of outputs / e0
    std::size_t failures = 0;
    bool from_cache = false;
    std::string key;
};

inline constexpr double kMaxFailureFraction = 1e-3;

/// Prior-weighted KDE of the QoI over an LHS test design in the system's
/// bounds. Systems with a stored pool use the pool (a random subset when it
/// is larger than n_test). With a cache directory, raw test outputs are stored
/// under a key derived from the fingerprint, n_test and seed, and reused.
TruthData build_truth_pdf(const systems::System& system, Eigen::Index n_test, std::uint64_t seed, double e0,
                          Eigen::Index grid_points, const std::filesystem::path& cache_dir = {}, int workers = 0);

/// Surrogate-implied PDF on the truth grid: weighted KDE of mean(test inputs) / e0.
stats::PdfEstimate approximate_pdf(const Vector& predictions, const TruthData& truth, double e0);

std::string truth_cache_key(const systems::System& system, Eigen::Index n_test, std::uint64_t seed);

/// Writes y, truth density and any extra named densities on the truth grid.
void write_pdf_table(const std::filesystem::path& path, const stats::PdfEstimate& truth,
                     const std::vector<std::pair<std::string, const stats::PdfEstimate*>>& others = {});

}  // namespace xbed::bed
