#pragma once

#include "xbed/dno/network.hpp"
#include "xbed/surrogate.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace xbed::dno {

/// Per-column affine map sending [lo, hi] to [-1, 1]. Columns with zero range
/// are only centred.
struct AffineScaler {
    Vector lo;
    Vector hi;

    static AffineScaler fit(const Eigen::MatrixXd& data);
    Eigen::MatrixXd forward(const Eigen::MatrixXd& data) const;
    Eigen::MatrixXd inverse(const Eigen::MatrixXd& scaled) const;
    Vector scale() const;  // multiplicative factor applied by forward()
};

struct DnoConfig {
    int ensemble_size = 2;
    int branch_layers = 5;
    Eigen::Index width = 200;
    Eigen::Index trunk_dim = 200;
    int epochs = 1000;
    AdamOptions adam;
    std::uint64_t seed = 0;
    // Explicit per-member initialization seeds; derived from `seed` when empty.
    std::vector<std::uint64_t> member_seeds;
};

struct MemberDiagnostics {
    std::uint64_t seed = 0;
    TrainingTrace trace;
};

class DnoEnsemble {
public:
    DnoEnsemble(std::vector<OperatorNet> members, AffineScaler input_scaler, AffineScaler output_scaler);

    std::size_t size() const { return members_.size(); }
    const OperatorNet& member(std::size_t i) const { return members_.at(i); }
    const AffineScaler& input_scaler() const { return input_scaler_; }
    const AffineScaler& output_scaler() const { return output_scaler_; }

    /// Ensemble mean and unbiased across-member variance, original units.
    Prediction predict(const Eigen::MatrixXd& features) const;
    /// One member's prediction, original units.
    Vector member_predict(std::size_t index, const Eigen::MatrixXd& features) const;
    /// All members, one column each, original units.
    Eigen::MatrixXd member_predictions(const Eigen::MatrixXd& features) const;

    nlohmann::json to_json() const;
    static DnoEnsemble from_json(const nlohmann::json& j);

    std::vector<MemberDiagnostics> diagnostics;

private:
    std::vector<OperatorNet> members_;
    AffineScaler input_scaler_;
    AffineScaler output_scaler_;
};

/// Unbiased variance across the columns of `member_outputs` (one row per point).
Prediction ensemble_statistics(const Eigen::MatrixXd& member_outputs);

/// Trains each member from its own random initialization on the same scaled
/// data. Members with a non-finite loss are dropped; fewer than two survivors
/// is a TrainingFailure. With `warm_start`, member i starts from the weights
/// of warm_start->member(i) instead (shapes must match).
DnoEnsemble dno_train(const Eigen::MatrixXd& features, const Vector& targets, const DnoConfig& cfg,
                      const DnoEnsemble* warm_start = nullptr);

void save_checkpoint(const std::filesystem::path& path, const DnoEnsemble& ens);
DnoEnsemble load_checkpoint(const std::filesystem::path& path);

/// Surrogate over the parameter space: features(x) feeds the ensemble.
class DnoSurrogate final : public Surrogate {
public:
    using FeatureMap = std::function<Matrix(const Matrix&)>;

    DnoSurrogate(DnoEnsemble ensemble, FeatureMap features, Eigen::Index chunk = 8192);

    Prediction predict(const Matrix& xs) const override;
    Vector density_map(const Matrix& xs) const override;
    Evaluation evaluate(const Matrix& xs) const override;

    const DnoEnsemble& ensemble() const { return ensemble_; }

private:
    DnoEnsemble ensemble_;
    FeatureMap features_;
    Eigen::Index chunk_;
};

}  // namespace xbed::dno
