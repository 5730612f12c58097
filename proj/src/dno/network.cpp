#include "xbed/dno/network.hpp"

#include "xbed/stats/random.hpp"

#include <cmath>

namespace xbed::dno {

OperatorNet::Layout OperatorNet::make_layout(const NetworkShape& shape) {
    require(shape.inputs >= 1 && shape.branch_layers >= 1 && shape.width >= 1 && shape.trunk_dim >= 1,
            "OperatorNet: invalid shape");
    Layout l;
    Eigen::Index offset = 0;
    Eigen::Index fan_in = shape.inputs;
    for (int i = 0; i < shape.branch_layers; ++i) {
        const Eigen::Index fan_out = i + 1 == shape.branch_layers ? shape.trunk_dim : shape.width;
        l.in.push_back(fan_in);
        l.out.push_back(fan_out);
        l.w_offset.push_back(offset);
        offset += fan_in * fan_out;
        l.b_offset.push_back(offset);
        offset += fan_out;
        fan_in = fan_out;
    }
    l.trunk_offset = offset;
    offset += shape.trunk_dim;
    l.total = offset + 1;  // output bias
    return l;
}

OperatorNet::OperatorNet(const NetworkShape& shape, std::uint64_t seed)
    : shape_(shape), layout_(make_layout(shape)), params_(Vector::Zero(layout_.total)) {
    stats::Rng rng(seed);
    for (int i = 0; i < shape_.branch_layers; ++i) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layout_.in[i]));
        const Eigen::Index n = layout_.in[i] * layout_.out[i];
        for (Eigen::Index k = 0; k < n; ++k) params_(layout_.w_offset[i] + k) = rng.uniform(-limit, limit);
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(shape_.trunk_dim + 1));
    for (Eigen::Index k = 0; k < shape_.trunk_dim; ++k) params_(layout_.trunk_offset + k) = rng.uniform(-limit, limit);
}

OperatorNet::OperatorNet(const NetworkShape& shape, Vector parameters)
    : shape_(shape), layout_(make_layout(shape)), params_(std::move(parameters)) {
    require(params_.size() == layout_.total, "OperatorNet: parameter count does not match shape");
}

void OperatorNet::set_parameters(const Vector& p) {
    require(p.size() == layout_.total, "OperatorNet: parameter count does not match shape");
    params_ = p;
}

Eigen::Map<const Eigen::MatrixXd> OperatorNet::weight(int layer) const {
    const auto i = static_cast<std::size_t>(layer);
    return {params_.data() + layout_.w_offset[i], layout_.out[i], layout_.in[i]};
}

Eigen::Map<const Vector> OperatorNet::bias(int layer) const {
    const auto i = static_cast<std::size_t>(layer);
    return {params_.data() + layout_.b_offset[i], layout_.out[i]};
}

Eigen::Map<const Vector> OperatorNet::trunk() const { return {params_.data() + layout_.trunk_offset, shape_.trunk_dim}; }

Vector OperatorNet::forward(const Eigen::MatrixXd& inputs) const {
    require(inputs.cols() == shape_.inputs, "OperatorNet: input width mismatch");
    Eigen::MatrixXd a = inputs;
    for (int l = 0; l < shape_.branch_layers; ++l) {
        Eigen::MatrixXd z = a * weight(l).transpose();
        z.rowwise() += bias(l).transpose();
        if (l + 1 < shape_.branch_layers) z = z.cwiseMax(0.0);
        a = std::move(z);
    }
    return (a * trunk()).array() + output_bias();
}

double OperatorNet::loss(const Eigen::MatrixXd& inputs, const Vector& targets, Vector* grad) const {
    require(inputs.cols() == shape_.inputs && inputs.rows() == targets.size() && targets.size() > 0,
            "OperatorNet: training data shape mismatch");
    const int n_layers = shape_.branch_layers;
    std::vector<Eigen::MatrixXd> acts;  // acts[l] is the input to layer l
    acts.reserve(static_cast<std::size_t>(n_layers) + 1);
    acts.push_back(inputs);
    for (int l = 0; l < n_layers; ++l) {
        Eigen::MatrixXd z = acts.back() * weight(l).transpose();
        z.rowwise() += bias(l).transpose();
        if (l + 1 < n_layers) z = z.cwiseMax(0.0);
        acts.push_back(std::move(z));
    }
    const Eigen::MatrixXd& branch = acts.back();
    const Vector residual = ((branch * trunk()).array() + output_bias()).matrix() - targets;
    const double n = static_cast<double>(targets.size());
    const double mse = residual.squaredNorm() / n;
    if (!grad) return mse;

    grad->setZero(layout_.total);
    const Vector g = (2.0 / n) * residual;
    (*grad)(layout_.total - 1) = g.sum();
    grad->segment(layout_.trunk_offset, shape_.trunk_dim) = branch.transpose() * g;
    Eigen::MatrixXd delta = g * trunk().transpose();  // d loss / d layer output
    for (int l = n_layers - 1; l >= 0; --l) {
        const auto i = static_cast<std::size_t>(l);
        if (l + 1 < n_layers) delta = delta.cwiseProduct((acts[i + 1].array() > 0.0).cast<double>().matrix());
        Eigen::Map<Eigen::MatrixXd> gw(grad->data() + layout_.w_offset[i], layout_.out[i], layout_.in[i]);
        gw.noalias() = delta.transpose() * acts[i];
        grad->segment(layout_.b_offset[i], layout_.out[i]) = delta.colwise().sum().transpose();
        if (l > 0) delta = delta * weight(l);
    }
    return mse;
}

TrainingTrace train_adam(OperatorNet& net, const Eigen::MatrixXd& inputs, const Vector& targets, int epochs,
                         const AdamOptions& opts) {
    TrainingTrace trace;
    Vector params = net.parameters();
    Vector m = Vector::Zero(params.size());
    Vector v = Vector::Zero(params.size());
    Vector grad;
    double b1t = 1.0, b2t = 1.0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const double l = net.loss(inputs, targets, &grad);
        if (epoch == 0) trace.initial_loss = l;
        if (!std::isfinite(l) || !grad.allFinite()) {
            trace.finite = false;
            trace.final_loss = l;
            return trace;
        }
        b1t *= opts.beta1;
        b2t *= opts.beta2;
        m = opts.beta1 * m + (1.0 - opts.beta1) * grad;
        v = opts.beta2 * v + (1.0 - opts.beta2) * grad.cwiseAbs2();
        const double step = opts.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
        params.array() -= step * m.array() / (v.array().sqrt() + opts.epsilon * std::sqrt(1.0 - b2t));
        net.set_parameters(params);
    }
    trace.final_loss = net.loss(inputs, targets, nullptr);
    trace.finite = std::isfinite(trace.final_loss);
    if (epochs == 0) trace.initial_loss = trace.final_loss;
    return trace;
}

}  // namespace xbed::dno
