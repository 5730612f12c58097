#pragma once

#include "xbed/common.hpp"

#include <cstdint>
#include <vector>

namespace xbed::dno {

/// Branch network: `branch_layers` dense layers, all of width `width` with
/// ReLU except the last, which is linear and of size `trunk_dim`. The trunk
/// is a learned constant vector of the same size; the prediction is
/// dot(branch(u), trunk) + bias.
struct NetworkShape {
    Eigen::Index inputs = 0;
    int branch_layers = 5;
    Eigen::Index width = 200;
    Eigen::Index trunk_dim = 200;

    bool operator==(const NetworkShape&) const = default;
};

class OperatorNet {
public:
    OperatorNet() = default;
    /// He-uniform weights, zero biases, Glorot-uniform trunk.
    OperatorNet(const NetworkShape& shape, std::uint64_t seed);
    OperatorNet(const NetworkShape& shape, Vector parameters);

    const NetworkShape& shape() const { return shape_; }
    Eigen::Index parameter_count() const { return params_.size(); }
    const Vector& parameters() const { return params_; }
    void set_parameters(const Vector& p);

    /// Inputs are already scaled; one row per sample.
    Vector forward(const Eigen::MatrixXd& inputs) const;

    /// Mean squared error against `targets`, with its gradient with respect
    /// to parameters() written to `grad` when non-null.
    double loss(const Eigen::MatrixXd& inputs, const Vector& targets, Vector* grad) const;

    // Views into the flat parameter vector (layer l maps width_in -> width_out).
    Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
    Eigen::Map<const Vector> bias(int layer) const;
    Eigen::Map<const Vector> trunk() const;
    double output_bias() const { return params_(params_.size() - 1); }

private:
    struct Layout {
        std::vector<Eigen::Index> in, out, w_offset, b_offset;
        Eigen::Index trunk_offset = 0;
        Eigen::Index total = 0;
    };
    static Layout make_layout(const NetworkShape& shape);

    NetworkShape shape_;
    Layout layout_;
    Vector params_;
};

/// Full-batch Adam.
struct AdamOptions {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainingTrace {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    bool finite = true;
};

TrainingTrace train_adam(OperatorNet& net, const Eigen::MatrixXd& inputs, const Vector& targets, int epochs,
                         const AdamOptions& opts);

}  // namespace xbed::dno
