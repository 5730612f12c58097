#include "xbed/bed/truth.hpp"

#include "xbed/acquisition/acquisition.hpp"
#include "xbed/stats/lhs.hpp"
#include "xbed/stats/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace xbed::bed {

Evaluations evaluate_all(const systems::System& system, const Matrix& xs, int workers) {
    const Eigen::Index n = xs.rows();
    Evaluations ev;
    ev.values = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> errors(static_cast<std::size_t>(n));
    std::atomic<Eigen::Index> next{0};
    auto work = [&] {
        for (Eigen::Index i = next++; i < n; i = next++) {
            try {
                const double v = system.evaluate(xs.row(i).transpose());
                if (std::isfinite(v))
                    ev.values(i) = v;
                else
                    errors[static_cast<std::size_t>(i)] = "non-finite QoI";
            } catch (const NumericalFailure& e) {
                errors[static_cast<std::size_t>(i)] = e.what();
            }
        }
    };
    unsigned count = workers > 0 ? static_cast<unsigned>(workers) : std::max(1u, std::thread::hardware_concurrency());
    count = static_cast<unsigned>(std::min<Eigen::Index>(count, std::max<Eigen::Index>(n, 1)));
    if (count <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!errors[static_cast<std::size_t>(i)].empty()) {
            ev.failed.push_back(i);
            ev.messages.push_back(errors[static_cast<std::size_t>(i)]);
        }
    }
    return ev;
}

std::string truth_cache_key(const systems::System& system, Eigen::Index n_test, std::uint64_t seed) {
    const std::string fp = system.fingerprint();
    std::uint64_t h = fnv1a(fp.data(), fp.size());
    h = fnv1a(&n_test, sizeof n_test, h);
    h = fnv1a(&seed, sizeof seed, h);
    return system.name() + "-" + hex64(h);
}

namespace {

constexpr char kMagic[8] = {'X', 'B', 'E', 'D', 'T', 'R', 'U', '1'};

struct RawTruth {
    Matrix inputs;
    Vector outputs;
    std::uint64_t failures = 0;
};

bool read_cache(const std::filesystem::path& path, RawTruth& raw) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char magic[8];
    std::int64_t rows = 0, cols = 0;
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&cols), sizeof cols);
    in.read(reinterpret_cast<char*>(&raw.failures), sizeof raw.failures);
    if (!in || !std::equal(magic, magic + 8, kMagic) || rows < 0 || cols < 1) return false;
    raw.inputs.resize(rows, cols);
    raw.outputs.resize(rows);
    in.read(reinterpret_cast<char*>(raw.inputs.data()), static_cast<std::streamsize>(sizeof(double) * rows * cols));
    in.read(reinterpret_cast<char*>(raw.outputs.data()), static_cast<std::streamsize>(sizeof(double) * rows));
    return static_cast<bool>(in);
}

void write_cache(const std::filesystem::path& path, const RawTruth& raw) {
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw InvalidArgument("truth cache: cannot write " + tmp.string());
        const std::int64_t rows = raw.inputs.rows(), cols = raw.inputs.cols();
        out.write(kMagic, 8);
        out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
        out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
        out.write(reinterpret_cast<const char*>(&raw.failures), sizeof raw.failures);
        out.write(reinterpret_cast<const char*>(raw.inputs.data()), static_cast<std::streamsize>(sizeof(double) * rows * cols));
        out.write(reinterpret_cast<const char*>(raw.outputs.data()), static_cast<std::streamsize>(sizeof(double) * rows));
    }
    std::filesystem::rename(tmp, path);
}

Matrix pool_subset(const Matrix& pool, Eigen::Index n, std::uint64_t seed) {
    if (n >= pool.rows()) return pool;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(pool.rows()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    stats::Rng rng(seed);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(pool.rows() - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    std::sort(idx.begin(), idx.begin() + n);
    Matrix out(n, pool.cols());
    for (Eigen::Index i = 0; i < n; ++i) out.row(i) = pool.row(idx[static_cast<std::size_t>(i)]);
    return out;
}

RawTruth compute_raw(const systems::System& system, Eigen::Index n_test, std::uint64_t seed, int workers) {
    const Matrix xs = system.candidate_pool() ? pool_subset(*system.candidate_pool(), n_test, seed)
                                              : stats::lhs_sample(n_test, system.bounds(), seed);
    const Evaluations ev = evaluate_all(system, xs, workers);
    const auto n_failed = static_cast<double>(ev.failed.size());
    if (n_failed > kMaxFailureFraction * static_cast<double>(xs.rows()))
        throw NumericalFailure("truth PDF: system failed at " + std::to_string(ev.failed.size()) + " of " +
                               std::to_string(xs.rows()) + " test points (first: " + ev.messages.front() + ")");
    RawTruth raw;
    raw.failures = ev.failed.size();
    raw.inputs.resize(xs.rows() - static_cast<Eigen::Index>(ev.failed.size()), xs.cols());
    raw.outputs.resize(raw.inputs.rows());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        if (std::isnan(ev.values(i))) continue;
        raw.inputs.row(k) = xs.row(i);
        raw.outputs(k++) = ev.values(i);
    }
    return raw;
}

}  // namespace

TruthData build_truth_pdf(const systems::System& system, Eigen::Index n_test, std::uint64_t seed, double e0,
                          Eigen::Index grid_points, const std::filesystem::path& cache_dir, int workers) {
    require(n_test >= 2, "build_truth_pdf: n_test must be at least 2");
    require(e0 > 0.0, "build_truth_pdf: e0 must be positive");
    TruthData truth;
    truth.key = truth_cache_key(system, n_test, seed);
    RawTruth raw;
    const std::filesystem::path cache = cache_dir.empty() ? std::filesystem::path{} : cache_dir / (truth.key + ".bin");
    if (!cache.empty() && read_cache(cache, raw)) {
        truth.from_cache = true;
    } else {
        raw = compute_raw(system, n_test, seed, workers);
        if (!cache.empty()) write_cache(cache, raw);
    }
    require(raw.inputs.rows() >= 2, "build_truth_pdf: fewer than two test points survived");
    truth.inputs = std::move(raw.inputs);
    truth.outputs = std::move(raw.outputs);
    truth.failures = raw.failures;
    truth.weights = acquisition::prior_weights(truth.inputs, stats::StandardNormalPrior(truth.inputs.cols()));
    const Vector scaled = truth.outputs / e0;
    truth.pdf = stats::weighted_kde(scaled, truth.weights, stats::kde_grid(scaled, truth.weights, grid_points));
    return truth;
}

stats::PdfEstimate approximate_pdf(const Vector& predictions, const TruthData& truth, double e0) {
    require(predictions.size() == truth.weights.size(), "approximate_pdf: one prediction per test point expected");
    return stats::weighted_kde(predictions / e0, truth.weights, truth.pdf.grid);
}

void write_pdf_table(const std::filesystem::path& path, const stats::PdfEstimate& truth,
                     const std::vector<std::pair<std::string, const stats::PdfEstimate*>>& others) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out.precision(17);
    out << "y,truth";
    for (const auto& [name, pdf] : others) {
        require(pdf->grid.size() == truth.grid.size(), "write_pdf_table: grids differ");
        out << ',' << name;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < truth.grid.size(); ++i) {
        out << truth.grid(i) << ',' << truth.density(i);
        for (const auto& [name, pdf] : others) out << ',' << pdf->density(i);
        out << '\n';
    }
}

}  // namespace xbed::bed
