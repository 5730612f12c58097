#include "xbed/dno/ensemble.hpp"

#include <cmath>
#include <fstream>

namespace xbed::dno {

AffineScaler AffineScaler::fit(const Eigen::MatrixXd& data) {
    require(data.rows() >= 1, "AffineScaler: no data");
    return {data.colwise().minCoeff().transpose(), data.colwise().maxCoeff().transpose()};
}

Vector AffineScaler::scale() const {
    Vector s(lo.size());
    for (Eigen::Index c = 0; c < lo.size(); ++c) s(c) = hi(c) > lo(c) ? 2.0 / (hi(c) - lo(c)) : 1.0;
    return s;
}

Eigen::MatrixXd AffineScaler::forward(const Eigen::MatrixXd& data) const {
    require(data.cols() == lo.size(), "AffineScaler: column count mismatch");
    const Vector s = scale();
    const Vector mid = 0.5 * (lo + hi);
    return (data.rowwise() - mid.transpose()) * s.asDiagonal();
}

Eigen::MatrixXd AffineScaler::inverse(const Eigen::MatrixXd& scaled) const {
    require(scaled.cols() == lo.size(), "AffineScaler: column count mismatch");
    const Vector s = scale();
    const Vector mid = 0.5 * (lo + hi);
    return (scaled * s.cwiseInverse().asDiagonal()).rowwise() + mid.transpose();
}

DnoEnsemble::DnoEnsemble(std::vector<OperatorNet> members, AffineScaler input_scaler, AffineScaler output_scaler)
    : members_(std::move(members)), input_scaler_(std::move(input_scaler)), output_scaler_(std::move(output_scaler)) {
    require(members_.size() >= 2, "DnoEnsemble: need at least two members for a variance");
    for (const auto& m : members_)
        require(m.shape() == members_.front().shape(), "DnoEnsemble: members must share one architecture");
    require(input_scaler_.lo.size() == members_.front().shape().inputs, "DnoEnsemble: input scaler width mismatch");
    require(output_scaler_.lo.size() == 1, "DnoEnsemble: output scaler must be scalar");
}

Eigen::MatrixXd DnoEnsemble::member_predictions(const Eigen::MatrixXd& features) const {
    const Eigen::MatrixXd scaled = input_scaler_.forward(features);
    Eigen::MatrixXd out(features.rows(), static_cast<Eigen::Index>(members_.size()));
    for (std::size_t i = 0; i < members_.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = members_[i].forward(scaled);
    const double s = output_scaler_.scale()(0);
    const double mid = 0.5 * (output_scaler_.lo(0) + output_scaler_.hi(0));
    return (out.array() / s + mid).matrix();
}

Prediction ensemble_statistics(const Eigen::MatrixXd& member_outputs) {
    const Eigen::Index n = member_outputs.cols();
    require(n >= 2, "ensemble_statistics: need at least two members");
    Prediction p;
    p.mean = member_outputs.rowwise().mean();
    p.variance = (member_outputs.colwise() - p.mean).rowwise().squaredNorm() / static_cast<double>(n - 1);
    return p;
}

Prediction DnoEnsemble::predict(const Eigen::MatrixXd& features) const {
    return ensemble_statistics(member_predictions(features));
}

Vector DnoEnsemble::member_predict(std::size_t index, const Eigen::MatrixXd& features) const {
    require(index < members_.size(), "dno_member_predict: member index out of range");
    const Eigen::MatrixXd scaled = input_scaler_.forward(features);
    Eigen::MatrixXd out = members_[index].forward(scaled);
    return output_scaler_.inverse(out).col(0);
}

nlohmann::json DnoEnsemble::to_json() const {
    nlohmann::json j;
    j["format"] = "xbed-dno-ensemble";
    j["version"] = 1;
    const auto& s = members_.front().shape();
    j["shape"] = {{"inputs", s.inputs}, {"branch_layers", s.branch_layers}, {"width", s.width}, {"trunk_dim", s.trunk_dim}};
    auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    j["input_scaler"] = {{"lo", vec(input_scaler_.lo)}, {"hi", vec(input_scaler_.hi)}};
    j["output_scaler"] = {{"lo", vec(output_scaler_.lo)}, {"hi", vec(output_scaler_.hi)}};
    j["members"] = nlohmann::json::array();
    for (const auto& m : members_) j["members"].push_back(vec(m.parameters()));
    return j;
}

DnoEnsemble DnoEnsemble::from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "xbed-dno-ensemble" || j.value("version", 0) != 1)
        throw InvalidArgument("checkpoint: unsupported format or version");
    NetworkShape s;
    s.inputs = j["shape"]["inputs"].get<Eigen::Index>();
    s.branch_layers = j["shape"]["branch_layers"].get<int>();
    s.width = j["shape"]["width"].get<Eigen::Index>();
    s.trunk_dim = j["shape"]["trunk_dim"].get<Eigen::Index>();
    auto vec = [](const nlohmann::json& a) {
        const auto v = a.get<std::vector<double>>();
        return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    std::vector<OperatorNet> members;
    for (const auto& m : j["members"]) members.emplace_back(s, vec(m));
    return DnoEnsemble(std::move(members), {vec(j["input_scaler"]["lo"]), vec(j["input_scaler"]["hi"])},
                       {vec(j["output_scaler"]["lo"]), vec(j["output_scaler"]["hi"])});
}

DnoEnsemble dno_train(const Eigen::MatrixXd& features, const Vector& targets, const DnoConfig& cfg,
                      const DnoEnsemble* warm_start) {
    require(features.rows() >= 2 && features.rows() == targets.size(), "dno_train: need at least two observations");
    require(cfg.ensemble_size >= 2, "dno_train: ensemble needs at least two members");
    require(cfg.member_seeds.empty() || cfg.member_seeds.size() == static_cast<std::size_t>(cfg.ensemble_size),
            "dno_train: member seed count does not match ensemble size");

    AffineScaler in_scaler = AffineScaler::fit(features);
    AffineScaler out_scaler = AffineScaler::fit(targets);
    const Eigen::MatrixXd x = in_scaler.forward(features);
    const Vector y = out_scaler.forward(targets).col(0);

    NetworkShape shape{features.cols(), cfg.branch_layers, cfg.width, cfg.trunk_dim};
    if (warm_start) {
        require(warm_start->size() >= static_cast<std::size_t>(cfg.ensemble_size) && warm_start->member(0).shape() == shape,
                "dno_train: warm start ensemble does not match the configuration");
    }
    std::vector<OperatorNet> members;
    std::vector<MemberDiagnostics> diag;
    for (int i = 0; i < cfg.ensemble_size; ++i) {
        const std::uint64_t seed = cfg.member_seeds.empty() ? derive_seed(cfg.seed, 0x6d656d62, static_cast<std::uint64_t>(i))
                                                            : cfg.member_seeds[static_cast<std::size_t>(i)];
        OperatorNet net = warm_start ? OperatorNet(shape, warm_start->member(static_cast<std::size_t>(i)).parameters())
                                     : OperatorNet(shape, seed);
        const TrainingTrace trace = train_adam(net, x, y, cfg.epochs, cfg.adam);
        diag.push_back({seed, trace});
        if (trace.finite) members.push_back(std::move(net));
    }
    if (members.size() < 2)
        throw TrainingFailure("dno_train: only " + std::to_string(members.size()) +
                              " members finished with a finite loss");
    DnoEnsemble ens(std::move(members), std::move(in_scaler), std::move(out_scaler));
    ens.diagnostics = std::move(diag);
    return ens;
}

void save_checkpoint(const std::filesystem::path& path, const DnoEnsemble& ens) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("checkpoint: cannot write " + path.string());
    out << ens.to_json().dump() << '\n';
}

DnoEnsemble load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("checkpoint: cannot open " + path.string());
    return DnoEnsemble::from_json(nlohmann::json::parse(in));
}

DnoSurrogate::DnoSurrogate(DnoEnsemble ensemble, FeatureMap features, Eigen::Index chunk)
    : ensemble_(std::move(ensemble)), features_(std::move(features)), chunk_(chunk) {
    require(chunk_ >= 1, "DnoSurrogate: chunk must be positive");
}

Prediction DnoSurrogate::predict(const Matrix& xs) const {
    Prediction p;
    p.mean.resize(xs.rows());
    p.variance.resize(xs.rows());
    for (Eigen::Index start = 0; start < xs.rows(); start += chunk_) {
        const Eigen::Index n = std::min(chunk_, xs.rows() - start);
        const Prediction part = ensemble_.predict(features_(xs.middleRows(start, n)));
        p.mean.segment(start, n) = part.mean;
        p.variance.segment(start, n) = part.variance;
    }
    return p;
}

Vector DnoSurrogate::density_map(const Matrix& xs) const {
    Vector out(xs.rows());
    for (Eigen::Index start = 0; start < xs.rows(); start += chunk_) {
        const Eigen::Index n = std::min(chunk_, xs.rows() - start);
        out.segment(start, n) = ensemble_.member_predict(0, features_(xs.middleRows(start, n)));
    }
    return out;
}

Surrogate::Evaluation DnoSurrogate::evaluate(const Matrix& xs) const {
    Evaluation ev;
    ev.prediction.mean.resize(xs.rows());
    ev.prediction.variance.resize(xs.rows());
    ev.density_map.resize(xs.rows());
    for (Eigen::Index start = 0; start < xs.rows(); start += chunk_) {
        const Eigen::Index n = std::min(chunk_, xs.rows() - start);
        const Eigen::MatrixXd members = ensemble_.member_predictions(features_(xs.middleRows(start, n)));
        const Prediction part = ensemble_statistics(members);
        ev.prediction.mean.segment(start, n) = part.mean;
        ev.prediction.variance.segment(start, n) = part.variance;
        ev.density_map.segment(start, n) = members.col(0);
    }
    return ev;
}

}  // namespace xbed::dno
