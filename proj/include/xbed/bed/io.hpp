#pragma once

#include "xbed/bed/experiment.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace xbed::bed {

inline constexpr const char* kVersion = "0.1.0";

/// Writes to a sibling temporary file, then renames over the target.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// iteration,n_samples,error,wall_time_s,batch_size,fit_seed,retried,short_batch,failures,off_grid,nonfinite
void write_log_csv(const std::filesystem::path& path, const ExperimentLog& log);

/// iteration,x0,...,x{D-1},qoi with iteration 0 for the initial design.
void write_samples_csv(const std::filesystem::path& path, const ExperimentLog& log);

/// Minimal reader for the numeric tables written here: header names and rows.
/// Empty fields read as NaN.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;  // InvalidArgument when absent
};
Table read_csv(const std::filesystem::path& path);

/// Shortest decimal that round-trips, "nan"/"inf" spelled out.
std::string format_double(double v);

}  // namespace xbed::bed
