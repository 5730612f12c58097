#pragma once

#include "xbed/systems/system.hpp"

#include <filesystem>
#include <optional>

namespace xbed::systems {

struct TabulatedData {
    Matrix inputs;   // n x D
    Vector outputs;  // n
};

/// Reads a delimited dataset: a header row naming D input columns and one QoI
/// column, then one sample per row. Comma, tab or whitespace separated.
TabulatedData load_tabulated(const std::filesystem::path& path);
void save_tabulated(const std::filesystem::path& path, const TabulatedData& data);

/// A precomputed dataset queried only at its stored inputs.
class TabulatedSystem final : public System {
public:
    TabulatedSystem(TabulatedData data, double match_tolerance, std::optional<stats::Bounds> bounds = std::nullopt);

    std::string name() const override { return "tabulated"; }
    Eigen::Index dimension() const override { return data_.inputs.cols(); }
    const stats::Bounds& bounds() const override { return bounds_; }
    double evaluate(const Eigen::Ref<const Vector>& x) const override;
    Matrix features(const Matrix& xs) const override { return xs; }
    std::string fingerprint() const override;
    const Matrix* candidate_pool() const override { return &data_.inputs; }

    /// Row index of the stored input nearest to x, if within tolerance.
    std::optional<Eigen::Index> find(const Eigen::Ref<const Vector>& x) const;
    double match_tolerance() const { return tolerance_; }
    Eigen::Index size() const { return data_.inputs.rows(); }

private:
    TabulatedData data_;
    double tolerance_;
    stats::Bounds bounds_;
};

double tabulated_qoi(const Eigen::Ref<const Vector>& x, const TabulatedSystem& sys);

}  // namespace xbed::systems
