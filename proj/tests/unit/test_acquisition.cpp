#include "helpers.hpp"

#include "xbed/acquisition/optimize.hpp"
#include "xbed/gp/gp.hpp"
#include "xbed/stats/lhs.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

using namespace xbed;
using namespace xbed::acquisition;

namespace {

// a(x) = 10^(-|x - x*|^2)
class Bowl final : public Acquisition {
public:
    explicit Bowl(Vector centre) : centre_(std::move(centre)) {}
    std::string name() const override { return "bowl"; }
    Vector log10_score(const Matrix& xs) const override {
        return -(xs.rowwise() - centre_.transpose()).rowwise().squaredNorm();
    }

private:
    Vector centre_;
};

// Score falls along the first coordinate.
class Slope final : public Acquisition {
public:
    std::string name() const override { return "slope"; }
    Vector log10_score(const Matrix& xs) const override { return -xs.col(0); }
};

stats::PdfEstimate tent_pdf() {
    stats::PdfEstimate p;
    p.grid = stats::linspace(-5.0, 5.0, 11);
    p.density = (1.0 - p.grid.array().abs() / 5.0).matrix() * 0.2;
    p.density(0) = p.density(10) = 1e-320;
    return p;
}

double normal_pdf_2d(const Vector& x) { return std::exp(-0.5 * x.squaredNorm()) / (2.0 * std::numbers::pi); }

double hand_interp(const stats::PdfEstimate& p, double y) {
    for (Eigen::Index i = 0; i + 1 < p.grid.size(); ++i) {
        if (y >= p.grid(i) && y <= p.grid(i + 1)) {
            const double t = (y - p.grid(i)) / (p.grid(i + 1) - p.grid(i));
            return p.density(i) + t * (p.density(i + 1) - p.density(i));
        }
    }
    return y < p.grid(0) ? p.density(0) : p.density(p.grid.size() - 1);
}

bool spaced(const Matrix& pts, double r_min) {
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        for (Eigen::Index j = i + 1; j < pts.rows(); ++j)
            if ((pts.row(i) - pts.row(j)).norm() < r_min) return false;
    return true;
}

}  // namespace

TEST_SUITE("acquisition") {

TEST_CASE("danger score is constant for constant mean and density") {
    const Vector lw = log10_danger(Vector::Constant(50, -3.0), Vector::Constant(50, 0.7), tent_pdf());
    CHECK((lw.array() - lw(0)).abs().maxCoeff() < 1e-10);
}

TEST_CASE("equal means give danger ratios equal to prior ratios") {
    const test::FunctionSurrogate s([](const Vector&) { return 1.3; }, [](const Vector&) { return 1.0; });
    const stats::StandardNormalPrior prior(2);
    const Matrix xs = test::random_matrix(20, 2, 4, -3.0, 3.0);
    const Vector w = danger_score(xs, s, tent_pdf(), prior);
    for (Eigen::Index i = 1; i < 20; ++i)
        CHECK(w(i) / w(0) == doctest::Approx(prior.density_at(xs.row(i).transpose()) / prior.density_at(xs.row(0).transpose()))
                                 .epsilon(1e-10));
}

TEST_CASE("likelihood-weighted score is the hand-computed product") {
    auto mu = [](const Vector& x) { return x(0) + 2.0 * x(1); };
    auto var = [](const Vector& x) { return 1.0 + x(0) * x(0); };
    const test::FunctionSurrogate s(mu, var);
    const stats::StandardNormalPrior prior(2);
    const Matrix xs = test::random_matrix(10, 2, 9, -2.0, 2.0);
    const Vector a = uslw_scores(s, xs, tent_pdf(), prior);
    const LikelihoodWeightedUS acq(std::make_shared<test::FunctionSurrogate>(s), tent_pdf(), prior);
    const Vector la = acq.log10_score(xs);
    for (Eigen::Index i = 0; i < 10; ++i) {
        const Vector x = xs.row(i).transpose();
        const double expect = normal_pdf_2d(x) / std::max(hand_interp(tent_pdf(), mu(x)), 1e-300) * var(x);
        CHECK(std::abs(a(i) - expect) <= 1e-10 * expect);
        CHECK(std::abs(la(i) - std::log10(expect)) < 1e-10);
    }
}

TEST_CASE("zero variance gives zero score whatever the danger") {
    const test::FunctionSurrogate s([](const Vector& x) { return x(0); }, [](const Vector&) { return 0.0; });
    const Matrix xs = test::random_matrix(10, 2, 1);
    CHECK(uslw_scores(s, xs, tent_pdf(), stats::StandardNormalPrior(2)).isZero());
    CHECK(us_scores(s, xs).isZero());
}

TEST_CASE("constant danger ranks like uncertainty sampling") {
    auto s = std::make_shared<test::FunctionSurrogate>([](const Vector&) { return 0.4; },
                                                       [](const Vector& x) { return 5.0 + std::atan2(x(1), x(0)); });
    // Candidates on a circle have equal prior density.
    Matrix c(360, 2);
    for (Eigen::Index i = 0; i < 360; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / 360.0;
        c(i, 0) = 1.5 * std::cos(t);
        c(i, 1) = 1.5 * std::sin(t);
    }
    const AcquisitionField us = score_candidates(UncertaintySampling(s), c);
    const AcquisitionField lw = score_candidates(LikelihoodWeightedUS(s, tent_pdf(), stats::StandardNormalPrior(2)), c);
    CHECK(us.candidates == lw.candidates);
}

TEST_CASE("scaling the prior leaves the selected candidate unchanged") {
    const test::FunctionSurrogate s([](const Vector& x) { return x(0) * x(1); },
                                    [](const Vector& x) { return 0.5 + x(1) * x(1); });
    const stats::StandardNormalPrior prior(2);
    const Matrix xs = stats::uniform_sample(5000, stats::Bounds::uniform(2, -4, 4), 3);
    const Vector lp = prior.log_density(xs);
    const stats::PdfEstimate p_mu = output_density(s, stats::lhs_sample(2000, stats::Bounds::uniform(2, -4, 4), 5), prior, 1.0, 256);
    const Vector var = s.predict(xs).variance.array().log10();
    Eigen::Index best = 0, best_scaled = 0;
    (log10_danger(lp, s.density_map(xs), p_mu) + var).maxCoeff(&best);
    (log10_danger((lp.array() + std::log(37.0)).matrix(), s.density_map(xs), p_mu) + var).maxCoeff(&best_scaled);
    CHECK(best == best_scaled);

    // The probe weights are normalized, so p_mu itself does not move either.
    const Matrix probes = test::random_matrix(100, 2, 6);
    const Vector w = prior_weights(probes, prior);
    CHECK(w.maxCoeff() == 1.0);
    const Vector mu = s.density_map(probes);
    const Vector grid = stats::kde_grid(mu, w, 64);
    CHECK((stats::weighted_kde(mu, w, grid).density - stats::weighted_kde(mu, (w * 37.0).eval(), grid).density).norm() < 1e-12);
}

TEST_CASE("output density is the prior-weighted KDE of the scaled density map") {
    const test::FunctionSurrogate s([](const Vector& x) { return 1e7 * (2.0 + x(0)); }, [](const Vector&) { return 1.0; });
    const stats::StandardNormalPrior prior(2);
    const Matrix probes = stats::lhs_sample(500, stats::Bounds::uniform(2, -6, 6), 2);
    const stats::PdfEstimate p = output_density(s, probes, prior, 1e7, 300);
    const Vector mu = (probes.col(0).array() + 2.0).matrix();
    const stats::PdfEstimate expect = stats::weighted_kde(mu, prior.density(probes), p.grid);
    CHECK((p.density - expect.density).cwiseAbs().maxCoeff() < 1e-10 * expect.density.maxCoeff());
    CHECK_THROWS_AS(output_density(s, probes, prior, 0.0, 300), InvalidArgument);
}

TEST_CASE("danger is positive in the box and off-grid means are counted") {
    const test::FunctionSurrogate s([](const Vector& x) { return 3.0 * x(0); }, [](const Vector&) { return 1.0; });
    const Matrix xs = stats::uniform_sample(2000, stats::Bounds::uniform(2, -6, 6), 8);
    DangerStats st;
    const Vector w = danger_score(xs, s, tent_pdf(), stats::StandardNormalPrior(2), 1.0, &st);
    CHECK(w.minCoeff() > 0.0);
    CHECK(w.allFinite());
    std::size_t outside = 0;
    for (Eigen::Index i = 0; i < xs.rows(); ++i) outside += std::abs(3.0 * xs(i, 0)) > 5.0;
    CHECK(st.off_grid == outside);
}

TEST_CASE("uncertainty sampling finds the grid maximum of a GP variance") {
    const Matrix x = test::random_matrix(12, 2, 40, -5.0, 5.0);
    const Vector y = (x.col(0).array().sin() * x.col(1).array().cos()).matrix();
    gp::GpHyperparameters h;
    h.lengthscales2 = (Vector(2) << 1.2, 2.0).finished();
    h.signal_variance = 1.5;
    h.noise_variance = 1e-6;
    auto gp = std::make_shared<gp::GpModel>(x, y, h);
    Matrix grid(51 * 51, 2);
    for (Eigen::Index i = 0; i < 51; ++i)
        for (Eigen::Index j = 0; j < 51; ++j) grid.row(i * 51 + j) << -6.0 + 0.24 * j, -6.0 + 0.24 * i;
    double best = -1.0;
    Eigen::Index arg = -1;
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        const double v = gp->posterior(grid.row(r).transpose()).second;
        if (v > best) {
            best = v;
            arg = r;
        }
    }
    const AcquisitionField f = score_candidates(UncertaintySampling(gp), grid, 100);
    CHECK(f.candidates.row(0) == grid.row(arg));

    // Training points carry no variance; far away the variance is the prior's.
    const Vector at_data = us_scores(*gp, x);
    CHECK(at_data.maxCoeff() < 1e-5);
    CHECK(us_scores(*gp, Matrix::Constant(1, 2, 60.0))(0) == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("non-finite scores are floored and counted") {
    class Broken final : public Acquisition {
    public:
        std::string name() const override { return "broken"; }
        Vector log10_score(const Matrix& xs) const override {
            Vector v = xs.col(0);
            v(0) = std::nan("");
            v(1) = -std::numeric_limits<double>::infinity();
            v(2) = std::numeric_limits<double>::infinity();
            return v;
        }
    };
    const AcquisitionField f = score_candidates(Broken(), test::random_matrix(10, 2, 1));
    CHECK(f.nonfinite == 3);
    CHECK(f.neg_log10_scores.allFinite());
    CHECK(f.neg_log10_scores(0) == -300.0);
    CHECK(f.neg_log10_scores(9) == 300.0);
}

TEST_CASE("MC optimizer lands near an analytic optimum") {
    // On the unit square 1e5 draws leave no gap wider than 0.02 in practice.
    const Vector centre = (Vector(2) << 0.1234, 0.75).finished();
    const Bowl bowl(centre);
    const stats::Bounds b = stats::Bounds::uniform(2, 0, 1);
    const AcquisitionField f = mc_optimize(bowl, b, 100000, 3);
    CHECK((f.candidates.row(0).transpose() - centre).norm() < 0.02);
    for (Eigen::Index i = 1; i < f.neg_log10_scores.size(); ++i) REQUIRE(f.neg_log10_scores(i - 1) <= f.neg_log10_scores(i));
    for (Eigen::Index i = 0; i < f.candidates.rows(); i += 997) CHECK(b.contains(f.candidates.row(i).transpose()));
}

TEST_CASE("MC optimizer edge cases, determinism and prefix monotonicity") {
    const Bowl bowl(Vector::Constant(3, 0.5));
    const stats::Bounds b = stats::Bounds::uniform(3, -6, 6);
    const AcquisitionField one = mc_optimize(bowl, b, 1, 9);
    CHECK(one.candidates.rows() == 1);
    CHECK(one.candidates == stats::uniform_sample(1, b, 9));

    const AcquisitionField a = mc_optimize(bowl, b, 5000, 4);
    CHECK(a.candidates == mc_optimize(bowl, b, 5000, 4).candidates);
    double prev = a.neg_log10_scores(0);
    for (Eigen::Index n : {10000, 20000, 40000}) {
        const double best = mc_optimize(bowl, b, n, 4).neg_log10_scores(0);
        CHECK(best <= prev);
        prev = best;
    }
    const AcquisitionField p = mc_optimize(bowl, b, 4000, 4, CandidateDistribution::Prior);
    CHECK(p.candidates.cwiseAbs().maxCoeff() <= 6.0);
    CHECK(p.candidates.cwiseAbs().mean() < 1.0);
    CHECK_THROWS_AS(mc_optimize(bowl, b, 0, 1), InvalidArgument);
}

TEST_CASE("exclusion radius is a fraction of the box diagonal") {
    CHECK(exclusion_radius(stats::Bounds::uniform(2, -6, 6), 0.025) == doctest::Approx(0.4243).epsilon(1e-4));
    CHECK(exclusion_radius(stats::Bounds::uniform(2, -6, 6), 0.0) == 0.0);
    CHECK_THROWS_AS(exclusion_radius(stats::Bounds::uniform(2, -6, 6), 1.0), InvalidArgument);
    CHECK_THROWS_AS(exclusion_radius(stats::Bounds::uniform(2, -6, 6), -0.1), InvalidArgument);
}

TEST_CASE("batch selection on a line takes every other candidate") {
    const double r_min = 0.5;  // exact in binary, so the spacing is too
    Matrix c(21, 2);
    for (Eigen::Index i = 0; i < 21; ++i) c.row(i) << 0.5 * r_min * static_cast<double>(i), 0.0;
    const AcquisitionField f = score_candidates(Slope(), c);
    const Batch b = batch_select(f, 6, r_min);
    REQUIRE(b.points.rows() == 6);
    CHECK_FALSE(b.exhausted);
    for (Eigen::Index j = 0; j < 6; ++j) CHECK(b.points(j, 0) == doctest::Approx(r_min * static_cast<double>(j)));
}

TEST_CASE("zero exclusion radius gives the top candidates") {
    const Matrix c = test::random_matrix(500, 3, 5);
    const AcquisitionField f = score_candidates(Slope(), c);
    const Batch b = batch_select(f, 7, 0.0);
    CHECK(b.points == f.candidates.topRows(7));
    CHECK(b.log10_scores == -f.neg_log10_scores.head(7));
}

TEST_CASE("batches respect the exclusion radius in several dimensions") {
    for (Eigen::Index d = 2; d <= 8; ++d) {
        const stats::Bounds box = stats::Bounds::uniform(d, -6, 6);
        const AcquisitionField f = score_candidates(Bowl(Vector::Zero(d)), stats::uniform_sample(20000, box, 10 + d));
        const double r_min = exclusion_radius(box, 0.025);
        const Batch b = batch_select(f, 10, r_min);
        REQUIRE(b.points.rows() == 10);
        CHECK(spaced(b.points, r_min));
        for (Eigen::Index j = 1; j < 10; ++j) CHECK(b.log10_scores(j) <= b.log10_scores(j - 1));
    }
}

TEST_CASE("an exhausted pool yields a short batch") {
    const Matrix c = test::random_matrix(50, 2, 3, -0.1, 0.1);
    const Batch b = batch_select(score_candidates(Slope(), c), 5, 1.0);
    CHECK(b.points.rows() == 1);
    CHECK(b.exhausted);
    CHECK_THROWS_AS(batch_select(score_candidates(Slope(), c), 0, 1.0), InvalidArgument);
}

}  // TEST_SUITE
