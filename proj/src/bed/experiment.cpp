#include "xbed/bed/experiment.hpp"

#include "xbed/acquisition/optimize.hpp"
#include "xbed/bed/io.hpp"
#include "xbed/stats/lhs.hpp"
#include "xbed/stats/random.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace xbed::bed {

using nlohmann::json;

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Complete: return "complete";
        case RunStatus::Aborted: return "aborted";
        case RunStatus::Exhausted: return "exhausted";
        case RunStatus::Interrupted: return "interrupted";
    }
    return "?";
}

namespace seeds {
std::uint64_t init(std::uint64_t seed) { return derive_seed(seed, 0x696e6974); }
std::uint64_t fit(std::uint64_t seed, Eigen::Index iteration, bool retry) {
    return derive_seed(seed, retry ? 0x72657472 : 0x66697474, static_cast<std::uint64_t>(iteration));
}
std::uint64_t probes(std::uint64_t seed, Eigen::Index iteration) {
    return derive_seed(seed, 0x70726f62, static_cast<std::uint64_t>(iteration));
}
std::uint64_t candidates(std::uint64_t seed, Eigen::Index iteration) {
    return derive_seed(seed, 0x63616e64, static_cast<std::uint64_t>(iteration));
}
std::uint64_t baseline(std::uint64_t seed, Eigen::Index iteration) {
    return derive_seed(seed, 0x6c687362, static_cast<std::uint64_t>(iteration));
}
}  // namespace seeds

FittedSurrogate fit_surrogate(const ExperimentConfig& cfg, const systems::SystemPtr& system, const Matrix& inputs,
                              const Vector& outputs, std::uint64_t seed, const FittedSurrogate* previous) {
    FittedSurrogate fs;
    if (cfg.surrogate.kind == SurrogateKind::Gp) {
        auto model = std::make_shared<gp::GpModel>(gp::gp_fit(inputs, outputs, cfg.surrogate.gp, seed));
        const auto& h = model->hyperparameters();
        fs.checkpoint = {{"type", "gp"},
                         {"lengthscales2", std::vector<double>(h.lengthscales2.data(), h.lengthscales2.data() + h.lengthscales2.size())},
                         {"signal_variance", h.signal_variance},
                         {"noise_variance", h.noise_variance},
                         {"mean", h.mean}};
        fs.model = std::move(model);
        return fs;
    }
    dno::DnoConfig dcfg = cfg.surrogate.dno;
    dcfg.seed = seed;
    const dno::DnoEnsemble* warm = nullptr;
    if (cfg.surrogate.warm_start && previous && previous->model)
        if (const auto* p = dynamic_cast<const dno::DnoSurrogate*>(previous->model.get())) warm = &p->ensemble();
    dno::DnoEnsemble ens = dno::dno_train(system->features(inputs), outputs, dcfg, warm);
    fs.checkpoint = {{"type", "dno"}, {"ensemble", ens.to_json()}};
    fs.model = std::make_shared<dno::DnoSurrogate>(std::move(ens), [system](const Matrix& xs) { return system->features(xs); });
    return fs;
}

FittedSurrogate restore_surrogate(const ExperimentConfig& cfg, const systems::SystemPtr& system, const Matrix& inputs,
                                  const Vector& outputs, const json& checkpoint) {
    FittedSurrogate fs;
    fs.checkpoint = checkpoint;
    const std::string type = checkpoint.at("type").get<std::string>();
    require(type == to_string(cfg.surrogate.kind), "model checkpoint type does not match the configuration");
    if (type == "gp") {
        gp::GpHyperparameters h;
        const auto l2 = checkpoint.at("lengthscales2").get<std::vector<double>>();
        h.lengthscales2 = Eigen::Map<const Vector>(l2.data(), static_cast<Eigen::Index>(l2.size()));
        h.signal_variance = checkpoint.at("signal_variance").get<double>();
        h.noise_variance = checkpoint.at("noise_variance").get<double>();
        h.mean = checkpoint.at("mean").get<double>();
        fs.model = std::make_shared<gp::GpModel>(inputs, outputs, h);
    } else {
        fs.model = std::make_shared<dno::DnoSurrogate>(dno::DnoEnsemble::from_json(checkpoint.at("ensemble")),
                                                       [system](const Matrix& xs) { return system->features(xs); });
    }
    return fs;
}

double surrogate_error(const Surrogate& surrogate, const TruthData& truth, double e0) {
    return stats::log_pdf_error(approximate_pdf(surrogate.predict(truth.inputs).mean, truth, e0), truth.pdf);
}

namespace {

json record_to_json(const IterationRecord& r) {
    json b = json::array();
    for (Eigen::Index i = 0; i < r.batch.rows(); ++i)
        b.push_back(std::vector<double>(r.batch.row(i).data(), r.batch.row(i).data() + r.batch.cols()));
    return {{"iteration", r.iteration},
            {"n_samples", r.n_samples},
            {"error", std::isfinite(r.error) ? json(r.error) : json(nullptr)},
            {"wall_time", r.wall_time},
            {"fit_seed", r.fit_seed},
            {"retried", r.retried},
            {"short_batch", r.short_batch},
            {"failures", r.failures},
            {"off_grid", r.off_grid},
            {"nonfinite", r.nonfinite},
            {"batch", b},
            {"batch_qoi", std::vector<double>(r.batch_qoi.data(), r.batch_qoi.data() + r.batch_qoi.size())}};
}

IterationRecord record_from_json(const json& j, Eigen::Index dim) {
    IterationRecord r;
    r.iteration = j.at("iteration").get<Eigen::Index>();
    r.n_samples = j.at("n_samples").get<Eigen::Index>();
    r.error = j.at("error").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("error").get<double>();
    r.wall_time = j.at("wall_time").get<double>();
    r.fit_seed = j.at("fit_seed").get<std::uint64_t>();
    r.retried = j.at("retried").get<bool>();
    r.short_batch = j.at("short_batch").get<bool>();
    r.failures = j.at("failures").get<std::size_t>();
    r.off_grid = j.at("off_grid").get<std::size_t>();
    r.nonfinite = j.at("nonfinite").get<std::size_t>();
    const auto& b = j.at("batch");
    r.batch.resize(static_cast<Eigen::Index>(b.size()), dim);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto row = b[i].get<std::vector<double>>();
        require(static_cast<Eigen::Index>(row.size()) == dim, "run state: batch point has the wrong dimension");
        r.batch.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(row.data(), dim).transpose();
    }
    const auto q = j.at("batch_qoi").get<std::vector<double>>();
    r.batch_qoi = Eigen::Map<const Vector>(q.data(), static_cast<Eigen::Index>(q.size()));
    return r;
}

// Settings that must agree for a resumed run to continue the same trajectory.
json resume_signature(const ExperimentConfig& cfg) {
    json j = config_to_json(cfg);
    j["experiment"].erase("n_iter");
    j["experiment"].erase("output_dir");
    j["experiment"].erase("cache_dir");
    j["experiment"].erase("workers");
    return j;
}

void append_rows(Matrix& m, const Matrix& rows) {
    if (rows.rows() == 0) return;
    Matrix out(m.rows() + rows.rows(), rows.cols());
    if (m.rows() > 0) out.topRows(m.rows()) = m;
    out.bottomRows(rows.rows()) = rows;
    m = std::move(out);
}

void append(Vector& v, const Vector& tail) {
    Vector out(v.size() + tail.size());
    out.head(v.size()) = v;
    out.tail(tail.size()) = tail;
    v = std::move(out);
}

class RunWriter {
public:
    RunWriter(const ExperimentConfig& cfg, const TruthData& truth, Eigen::Index dim)
        : cfg_(cfg), dir_(cfg.output_dir), truth_(truth), dim_(dim) {
        std::filesystem::create_directories(dir_);
    }

    void write(const ExperimentLog& log, const json& model) const {
        write_text_atomic(dir_ / "model.json", model.dump());
        json state = {{"format", "xbed-run-state"},
                      {"version", 1},
                      {"dimension", dim_},
                      {"config", config_to_json(cfg_)},
                      {"status", to_string(log.status)},
                      {"message", log.message},
                      {"records", json::array()}};
        for (const auto& r : log.records) state["records"].push_back(record_to_json(r));
        write_text_atomic(dir_ / "state.json", state.dump());
        write_log_csv(dir_ / "log.csv", log);
        write_samples_csv(dir_ / "samples.csv", log);
        manifest(log);
    }

    void manifest(const ExperimentLog& log) const {
        json m = {{"program", "xbed"},
                  {"version", kVersion},
                  {"config", config_to_json(cfg_)},
                  {"warnings", cfg_.warnings()},
                  {"seeds",
                   {{"experiment", cfg_.seed},
                    {"init", seeds::init(cfg_.seed)},
                    {"test", cfg_.test_seed},
                    {"fit", json::array()}}},
                  {"truth", {{"key", truth_.key}, {"points", truth_.inputs.rows()}, {"failures", truth_.failures}}},
                  {"status", to_string(log.status)},
                  {"message", log.message},
                  {"iterations", log.records.empty() ? -1 : log.records.back().iteration},
                  {"files", {"log.csv", "samples.csv", "state.json", "model.json", "pdf.csv"}}};
        for (const auto& r : log.records) m["seeds"]["fit"].push_back(r.fit_seed);
        write_text_atomic(dir_ / "manifest.json", m.dump(2));
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    const ExperimentConfig& cfg_;
    std::filesystem::path dir_;
    const TruthData& truth_;
    Eigen::Index dim_;
};

struct Selection {
    Matrix points;
    std::size_t off_grid = 0;
    std::size_t nonfinite = 0;
};

std::vector<Eigen::Index> unused_pool_rows(const Matrix& pool, const Matrix& data) {
    std::vector<char> used(static_cast<std::size_t>(pool.rows()), 0);
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        for (Eigen::Index p = 0; p < pool.rows(); ++p)
            if (!used[static_cast<std::size_t>(p)] && pool.row(p) == data.row(i)) {
                used[static_cast<std::size_t>(p)] = 1;
                break;
            }
    std::vector<Eigen::Index> free;
    for (Eigen::Index p = 0; p < pool.rows(); ++p)
        if (!used[static_cast<std::size_t>(p)]) free.push_back(p);
    return free;
}

Matrix random_rows(const Matrix& pool, std::vector<Eigen::Index> rows, Eigen::Index n, std::uint64_t seed) {
    stats::Rng rng(seed);
    n = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(rows.size()));
    Matrix out(n, pool.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i) + rng.below(rows.size() - static_cast<std::size_t>(i));
        std::swap(rows[static_cast<std::size_t>(i)], rows[j]);
        out.row(i) = pool.row(rows[static_cast<std::size_t>(i)]);
    }
    return out;
}

Matrix initial_design(const ExperimentConfig& cfg, const systems::System& system) {
    const std::uint64_t s = seeds::init(cfg.seed);
    if (const Matrix* pool = system.candidate_pool()) {
        std::vector<Eigen::Index> all(static_cast<std::size_t>(pool->rows()));
        std::iota(all.begin(), all.end(), Eigen::Index{0});
        return random_rows(*pool, std::move(all), cfg.n_init, s);
    }
    return cfg.init == InitMode::Lhs ? stats::lhs_sample(cfg.n_init, system.bounds(), s)
                                     : stats::prior_sample(cfg.n_init, system.bounds(), s);
}

Selection select_batch(const ExperimentConfig& cfg, const systems::System& system,
                       const std::shared_ptr<const Surrogate>& surrogate, const Matrix& data, Eigen::Index iteration) {
    const auto& a = cfg.acquisition;
    const Matrix* pool = system.candidate_pool();
    Selection sel;
    if (a.kind == AcquisitionKind::Lhs) {
        if (pool) {
            sel.points = random_rows(*pool, unused_pool_rows(*pool, data), a.batch_size, seeds::baseline(cfg.seed, iteration));
        } else {
            const Eigen::Index remaining = (cfg.n_iter - iteration + 1) * a.batch_size;
            sel.points = stats::lhs_sample(std::max(remaining, a.batch_size), system.bounds(), seeds::baseline(cfg.seed, iteration))
                             .topRows(a.batch_size);
        }
        return sel;
    }

    const stats::StandardNormalPrior prior(system.dimension());
    std::unique_ptr<acquisition::Acquisition> acq;
    const acquisition::LikelihoodWeightedUS* lw = nullptr;
    if (a.kind == AcquisitionKind::Us) {
        acq = std::make_unique<acquisition::UncertaintySampling>(surrogate);
    } else {
        const Matrix probes = stats::lhs_sample(a.n_probe, system.bounds(), seeds::probes(cfg.seed, iteration));
        auto p = std::make_unique<acquisition::LikelihoodWeightedUS>(
            surrogate, acquisition::output_density(*surrogate, probes, prior, cfg.error_scale(), a.pdf_grid), prior,
            cfg.error_scale());
        lw = p.get();
        acq = std::move(p);
    }

    acquisition::AcquisitionField field;
    if (pool) {
        const auto free = unused_pool_rows(*pool, data);
        if (free.empty()) return sel;
        Matrix cands(static_cast<Eigen::Index>(free.size()), pool->cols());
        for (std::size_t i = 0; i < free.size(); ++i) cands.row(static_cast<Eigen::Index>(i)) = pool->row(free[i]);
        field = acquisition::score_candidates(*acq, std::move(cands));
    } else {
        field = acquisition::mc_optimize(*acq, system.bounds(), a.n_q, seeds::candidates(cfg.seed, iteration), a.candidates);
    }
    const acquisition::Batch batch =
        acquisition::batch_select(field, a.batch_size, acquisition::exclusion_radius(system.bounds(), a.r_l));
    sel.points = batch.points;
    sel.nonfinite = field.nonfinite;
    if (lw) sel.off_grid = lw->off_grid_count();
    return sel;
}

}  // namespace

ExperimentLog load_experiment(const std::filesystem::path& dir) {
    std::ifstream in(dir / "state.json");
    if (!in) throw InvalidArgument("no run state in " + dir.string());
    const json state = json::parse(in);
    require(state.value("format", "") == "xbed-run-state", "not a run state file: " + (dir / "state.json").string());
    const auto dim = state.at("dimension").get<Eigen::Index>();
    ExperimentLog log;
    log.directory = dir;
    log.checkpoint = dir / "model.json";
    log.message = state.value("message", "");
    const std::string status = state.value("status", "complete");
    for (RunStatus s : {RunStatus::Complete, RunStatus::Aborted, RunStatus::Exhausted, RunStatus::Interrupted})
        if (to_string(s) == status) log.status = s;
    log.inputs.resize(0, dim);
    for (const auto& rj : state.at("records")) {
        IterationRecord r = record_from_json(rj, dim);
        append_rows(log.inputs, r.batch);
        append(log.outputs, r.batch_qoi);
        log.records.push_back(std::move(r));
    }
    return log;
}

ExperimentLog run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    const systems::SystemPtr system = opts.system ? opts.system : make_system(cfg.system);
    const double e0 = cfg.error_scale();
    std::shared_ptr<const TruthData> truth = opts.truth;
    if (!truth)
        truth = std::make_shared<TruthData>(
            build_truth_pdf(*system, cfg.n_test, cfg.test_seed, e0, cfg.pdf_grid, cfg.cache_dir, cfg.workers));
    const Eigen::Index dim = system->dimension();
    require(truth->inputs.cols() == dim, "truth PDF dimension does not match the system");

    RunWriter writer(cfg, *truth, dim);
    ExperimentLog log;
    log.directory = writer.dir();
    log.checkpoint = writer.dir() / "model.json";
    log.inputs.resize(0, dim);
    FittedSurrogate current;

    using clock = std::chrono::steady_clock;
    auto seconds_since = [](clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); };

    // Trains with the iteration's seed, once more with a fresh seed on failure.
    auto train = [&](IterationRecord& rec) -> bool {
        const FittedSurrogate* prev = current.model ? &current : nullptr;
        for (bool retry : {false, true}) {
            rec.fit_seed = seeds::fit(cfg.seed, rec.iteration, retry);
            rec.retried = retry;
            try {
                current = fit_surrogate(cfg, system, log.inputs, log.outputs, rec.fit_seed, prev);
                return true;
            } catch (const TrainingFailure& e) {
                log.message = e.what();
            } catch (const NumericalFailure& e) {
                log.message = e.what();
            }
        }
        return false;
    };

    auto finish_iteration = [&](IterationRecord rec) {
        log.records.push_back(std::move(rec));
        writer.write(log, current.checkpoint);
        if (opts.on_iteration) opts.on_iteration(log.records.back());
    };

    auto abort_run = [&](IterationRecord& rec, clock::time_point t0) {
        log.status = RunStatus::Aborted;
        log.message = "training failed at iteration " + std::to_string(rec.iteration) + ": " + log.message;
        rec.error = std::numeric_limits<double>::quiet_NaN();
        rec.wall_time = seconds_since(t0);
        // The record's data stays in the state so the partial run is inspectable.
        log.records.push_back(rec);
        writer.write(log, current.checkpoint);
        return log;
    };

    Eigen::Index first_iteration = 1;
    if (opts.resume && std::filesystem::exists(writer.dir() / "state.json")) {
        std::ifstream in(writer.dir() / "state.json");
        const json state = json::parse(in);
        require(state.at("config").is_object(), "run state has no configuration");
        ExperimentConfig saved = config_from_json(state.at("config"));
        require(resume_signature(saved) == resume_signature(cfg),
                "resume: configuration differs from the one recorded in " + writer.dir().string());
        ExperimentLog prior = load_experiment(writer.dir());
        require(!prior.records.empty(), "resume: run state holds no iterations");
        require(prior.status != RunStatus::Aborted, "resume: the recorded run was aborted");
        std::ifstream min(writer.dir() / "model.json");
        const json model = json::parse(min);
        log.records = std::move(prior.records);
        log.inputs = std::move(prior.inputs);
        log.outputs = std::move(prior.outputs);
        current = restore_surrogate(cfg, system, log.inputs, log.outputs, model);
        first_iteration = log.records.back().iteration + 1;
        if (prior.status == RunStatus::Exhausted) first_iteration = cfg.n_iter + 1;
        log.status = prior.status == RunStatus::Exhausted ? RunStatus::Exhausted : RunStatus::Complete;
    } else {
        const auto t0 = clock::now();
        IterationRecord rec;
        rec.iteration = 0;
        const Matrix design = initial_design(cfg, *system);
        const Evaluations ev = evaluate_all(*system, design, cfg.workers);
        rec.failures = ev.failed.size();
        for (Eigen::Index i = 0; i < design.rows(); ++i) {
            if (std::isnan(ev.values(i))) continue;
            append_rows(rec.batch, design.row(i));
            append(rec.batch_qoi, Vector::Constant(1, ev.values(i)));
        }
        if (rec.batch.rows() == 0) rec.batch.resize(0, dim);
        rec.short_batch = rec.batch.rows() < cfg.n_init;
        append_rows(log.inputs, rec.batch);
        append(log.outputs, rec.batch_qoi);
        rec.n_samples = log.inputs.rows();
        if (!train(rec)) return abort_run(rec, t0);
        rec.error = surrogate_error(*current.model, *truth, e0);
        rec.wall_time = seconds_since(t0);
        finish_iteration(std::move(rec));
        if (opts.stop_after && *opts.stop_after <= 0) {
            log.status = RunStatus::Interrupted;
            writer.manifest(log);
            return log;
        }
    }

    for (Eigen::Index it = first_iteration; it <= cfg.n_iter; ++it) {
        const auto t0 = clock::now();
        IterationRecord rec;
        rec.iteration = it;
        const Selection sel = select_batch(cfg, *system, current.model, log.inputs, it);
        if (sel.points.rows() == 0) {
            log.status = RunStatus::Exhausted;
            log.message = "no candidates left at iteration " + std::to_string(it);
            writer.manifest(log);
            break;
        }
        rec.off_grid = sel.off_grid;
        rec.nonfinite = sel.nonfinite;
        const Evaluations ev = evaluate_all(*system, sel.points, cfg.workers);
        rec.failures = ev.failed.size();
        rec.batch.resize(0, dim);
        for (Eigen::Index i = 0; i < sel.points.rows(); ++i) {
            if (std::isnan(ev.values(i))) continue;
            append_rows(rec.batch, sel.points.row(i));
            append(rec.batch_qoi, Vector::Constant(1, ev.values(i)));
        }
        rec.short_batch = rec.batch.rows() < cfg.acquisition.batch_size;
        append_rows(log.inputs, rec.batch);
        append(log.outputs, rec.batch_qoi);
        rec.n_samples = log.inputs.rows();
        if (!train(rec)) return abort_run(rec, t0);
        rec.error = surrogate_error(*current.model, *truth, e0);
        rec.wall_time = seconds_since(t0);
        finish_iteration(std::move(rec));
        if (opts.stop_after && it >= *opts.stop_after && it < cfg.n_iter) {
            log.status = RunStatus::Interrupted;
            writer.manifest(log);
            return log;
        }
    }

    const stats::PdfEstimate approx = approximate_pdf(current.model->predict(truth->inputs).mean, *truth, e0);
    write_pdf_table(writer.dir() / "pdf.csv", truth->pdf, {{"surrogate", &approx}});
    writer.write(log, current.checkpoint);
    return log;
}

}  // namespace xbed::bed
