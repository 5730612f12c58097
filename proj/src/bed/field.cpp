#include "xbed/bed/field.hpp"

#include "xbed/bed/io.hpp"
#include "xbed/stats/kde.hpp"
#include "xbed/stats/lhs.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace xbed::bed {

FieldGrid export_field(const std::filesystem::path& run_dir, std::optional<Eigen::Index> iteration, Eigen::Index n_grid) {
    require(n_grid >= 2, "export_field: grid needs at least 2 points per axis");
    std::ifstream in(run_dir / "state.json");
    if (!in) throw InvalidArgument("no run state in " + run_dir.string());
    const ExperimentConfig cfg = config_from_json(nlohmann::json::parse(in).at("config"));
    const ExperimentLog log = load_experiment(run_dir);
    require(!log.records.empty(), "export_field: the run has no iterations");
    const systems::SystemPtr system = make_system(cfg.system);
    if (system->dimension() != 2)
        throw InvalidArgument("export_field: unsupported dimension " + std::to_string(system->dimension()) +
                              " (fields are exported for 2D parameter spaces only)");

    const Eigen::Index last = log.records.back().iteration;
    const Eigen::Index k = iteration.value_or(last);
    require(k >= 0 && k <= last, "export_field: iteration " + std::to_string(k) + " is not in the log");

    Matrix xs(0, 2);
    Vector ys;
    const IterationRecord* rec_k = nullptr;
    for (const auto& r : log.records) {
        if (r.iteration > k) break;
        Matrix grown(xs.rows() + r.batch.rows(), 2);
        grown << xs, r.batch;
        xs = std::move(grown);
        Vector gy(ys.size() + r.batch_qoi.size());
        gy.head(ys.size()) = ys;
        gy.tail(r.batch_qoi.size()) = r.batch_qoi;
        ys = std::move(gy);
        rec_k = &r;
    }
    require(rec_k && rec_k->iteration == k, "export_field: iteration " + std::to_string(k) + " is not in the log");
    require(std::isfinite(rec_k->error), "export_field: iteration " + std::to_string(k) + " has no trained model");

    FittedSurrogate fs;
    if (k == last) {
        std::ifstream min(run_dir / "model.json");
        if (!min) throw InvalidArgument("no model checkpoint in " + run_dir.string());
        fs = restore_surrogate(cfg, system, xs, ys, nlohmann::json::parse(min));
    } else {
        require(!cfg.surrogate.warm_start, "export_field: warm-started runs can only export their last iteration");
        fs = fit_surrogate(cfg, system, xs, ys, rec_k->fit_seed);
    }

    FieldGrid f;
    f.iteration = k;
    const auto& b = system->bounds();
    const Vector g0 = stats::linspace(b.lower(0), b.upper(0), n_grid);
    const Vector g1 = stats::linspace(b.lower(1), b.upper(1), n_grid);
    f.points.resize(n_grid * n_grid, 2);
    for (Eigen::Index j = 0; j < n_grid; ++j)
        for (Eigen::Index i = 0; i < n_grid; ++i) f.points.row(j * n_grid + i) << g0(i), g1(j);

    const Surrogate::Evaluation ev = fs.model->evaluate(f.points);
    f.mean = ev.prediction.mean;
    f.variance = ev.prediction.variance;
    const stats::StandardNormalPrior prior(2);
    const double e0 = cfg.error_scale();
    const Matrix probes = stats::lhs_sample(cfg.acquisition.n_probe, b, seeds::probes(cfg.seed, k + 1));
    const stats::PdfEstimate p_mu = acquisition::output_density(*fs.model, probes, prior, e0, cfg.acquisition.pdf_grid);
    const Vector log10_w = acquisition::log10_danger(prior.log_density(f.points), ev.density_map / e0, p_mu);
    f.danger = log10_w.unaryExpr([](double v) { return std::pow(10.0, v); });
    switch (cfg.acquisition.kind) {
        case AcquisitionKind::Us: f.acquisition = f.variance; break;
        case AcquisitionKind::Uslw: f.acquisition = f.danger.cwiseProduct(f.variance); break;
        case AcquisitionKind::Lhs:
            f.acquisition = Vector::Constant(f.points.rows(), std::numeric_limits<double>::quiet_NaN());
            break;
    }
    return f;
}

void write_field_csv(const std::filesystem::path& path, const FieldGrid& field) {
    std::ostringstream os;
    os << "x0,x1,mu,var,w,a\n";
    for (Eigen::Index i = 0; i < field.points.rows(); ++i)
        os << format_double(field.points(i, 0)) << ',' << format_double(field.points(i, 1)) << ','
           << format_double(field.mean(i)) << ',' << format_double(field.variance(i)) << ','
           << format_double(field.danger(i)) << ',' << format_double(field.acquisition(i)) << '\n';
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_text_atomic(path, os.str());
}

}  // namespace xbed::bed
