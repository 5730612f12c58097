#pragma once

#include "xbed/bed/experiment.hpp"

#include <optional>

namespace xbed::bed {

/// Surrogate mean, variance, danger score and acquisition value on a regular
/// grid over a 2D parameter box. Rows run over x0 fastest.
struct FieldGrid {
    Matrix points;   // n_grid^2 x 2
    Vector mean, variance, danger, acquisition;  // acquisition is NaN for the LHS baseline
    Eigen::Index iteration = 0;
};

/// The fields seen when choosing the batch after `iteration` (the last logged
/// iteration by default). The last iteration's model is read from the
/// checkpoint; earlier ones are refitted with their recorded seeds.
FieldGrid export_field(const std::filesystem::path& run_dir, std::optional<Eigen::Index> iteration, Eigen::Index n_grid);

/// x0,x1,mu,var,w,a
void write_field_csv(const std::filesystem::path& path, const FieldGrid& field);

}  // namespace xbed::bed
