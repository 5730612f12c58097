#include "helpers.hpp"

#include "xbed/bed/campaign.hpp"
#include "xbed/bed/field.hpp"
#include "xbed/bed/io.hpp"
#include "xbed/systems/tabulated.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

using namespace xbed;
using namespace xbed::bed;
using nlohmann::json;

namespace {

ExperimentConfig small_sir_gp(const std::filesystem::path& out) {
    json j = json::parse(R"({
        "system": {"type": "sir"},
        "surrogate": {"type": "gp", "restarts": 2},
        "acquisition": {"type": "uslw", "n_q": 2000, "n_probe": 2000, "batch_size": 2, "pdf_grid": 128},
        "experiment": {"n_init": 4, "n_iter": 3, "seed": 1, "n_test": 500, "pdf_grid": 256}
    })");
    j["experiment"]["output_dir"] = out.string();
    return config_from_json(j);
}

// Cheap analytic runs: the system and truth are injected.
struct AnalyticSetup {
    std::shared_ptr<test::AnalyticSystem> system = std::make_shared<test::AnalyticSystem>(2, 1.0, 0.5, 0.3);
    std::shared_ptr<const TruthData> truth =
        std::make_shared<TruthData>(build_truth_pdf(*system, 1000, 3, 1.0, 256));

    ExperimentConfig config(const std::filesystem::path& out, SurrogateKind kind = SurrogateKind::Gp) const {
        ExperimentConfig cfg;
        cfg.system.kind = SystemKind::Mmt;  // e0 = 1; the system itself is injected
        cfg.surrogate.kind = kind;
        cfg.surrogate.gp.restarts = 2;
        cfg.surrogate.dno.branch_layers = 2;
        cfg.surrogate.dno.width = 8;
        cfg.surrogate.dno.trunk_dim = 4;
        cfg.surrogate.dno.epochs = 40;
        cfg.acquisition.n_q = 1000;
        cfg.acquisition.n_probe = 1000;
        cfg.acquisition.pdf_grid = 128;
        cfg.acquisition.batch_size = 3;
        cfg.n_init = 5;
        cfg.n_iter = 4;
        cfg.seed = 11;
        cfg.output_dir = out;
        return cfg;
    }

    RunOptions options() const {
        RunOptions o;
        o.system = system;
        o.truth = truth;
        return o;
    }
};

void check_same_records(const ExperimentLog& a, const ExperimentLog& b) {
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].iteration == b.records[i].iteration);
        CHECK(a.records[i].n_samples == b.records[i].n_samples);
        CHECK(a.records[i].error == b.records[i].error);
        CHECK(a.records[i].batch == b.records[i].batch);
        CHECK(a.records[i].batch_qoi == b.records[i].batch_qoi);
        CHECK(a.records[i].fit_seed == b.records[i].fit_seed);
    }
}

double weighted_quantile(const Vector& v, const Vector& w, double q) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v(a) < v(b); });
    const double total = w.sum();
    double acc = 0.0;
    for (auto i : idx) {
        acc += w(i);
        if (acc >= q * total) return v(i);
    }
    return v(idx.back());
}

}  // namespace

TEST_SUITE("bed") {

TEST_CASE("config defaults, round trip and strict keys") {
    const ExperimentConfig d = config_from_json(json::object());
    CHECK(d.system.kind == SystemKind::Sir);
    CHECK(d.surrogate.kind == SurrogateKind::Dno);
    CHECK(d.surrogate.dno.ensemble_size == 2);
    CHECK(d.acquisition.kind == AcquisitionKind::Uslw);
    CHECK(d.acquisition.r_l == 0.025);
    CHECK(d.n_test == 20000);
    CHECK(d.error_scale() == 1e7);

    const ExperimentConfig c = small_sir_gp("somewhere");
    CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));
    CHECK(c.acquisition.batch_size == 2);

    auto error_of = [](const std::string& text) -> std::string {
        try {
            config_from_json(json::parse(text));
        } catch (const InvalidArgument& e) {
            return e.what();
        }
        return {};
    };
    CHECK(error_of(R"({"experiment": {"n_itr": 3}})").find("n_itr") != std::string::npos);
    CHECK(error_of(R"({"sistem": {}})").find("sistem") != std::string::npos);
    CHECK(error_of(R"({"system": {"type": "lorenz"}})").find("system.type") != std::string::npos);
    try {
        make_system(config_from_json(json::parse(R"({"system": {"params": {"gama": 0.2}}})")).system);
        FAIL("expected an error");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("gama") != std::string::npos);
    }
    CHECK_FALSE(error_of(R"({"acquisition": {"r_l": 1.0}})").empty());
    CHECK_FALSE(error_of(R"({"experiment": {"n_init": 0}})").empty());
    CHECK_FALSE(error_of(R"({"experiment": {"n_init": "three"}})").empty());
}

TEST_CASE("config files allow comments and LHS runs warn about ignored fields") {
    const auto dir = test::scratch("config");
    std::ofstream(dir / "c.json") << "// baseline\n{\"acquisition\": {\"type\": \"lhs\", \"n_q\": 5 /* unused */}}\n";
    const ExperimentConfig c = load_config(dir / "c.json");
    CHECK(c.acquisition.kind == AcquisitionKind::Lhs);
    REQUIRE(c.warnings().size() == 1);
    CHECK(c.warnings()[0].find("ignores") != std::string::npos);
    CHECK(config_from_json(json::object()).warnings().empty());
    CHECK_THROWS_AS(load_config(dir / "missing.json"), InvalidArgument);
}

TEST_CASE("systems are built from their specs") {
    ExperimentConfig c = config_from_json(json::parse(R"({"system": {"type": "sir", "modes": 3, "half_width": 4}})"));
    auto sir = make_system(c.system);
    CHECK(sir->dimension() == 3);
    CHECK(sir->bounds().upper(2) == 4.0);
    c = config_from_json(json::parse(R"({"system": {"type": "mmt", "modes": 2, "params": {"horizon": 0.1}}})"));
    CHECK(make_system(c.system)->dimension() == 4);
    CHECK(c.error_scale() == 1.0);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"system": {"type": "tabulated"}})")), InvalidArgument);
}

TEST_CASE("truth PDF of a constant system is one bump") {
    const test::AnalyticSystem flat(2, 5.0, 0.0, 0.0);
    const TruthData t = build_truth_pdf(flat, 200, 1, 2.0, 201);
    CHECK(t.pdf.bandwidth == doctest::Approx(1e-3 * 2.5));
    Eigen::Index peak = 0;
    t.pdf.density.maxCoeff(&peak);
    CHECK(std::abs(t.pdf.grid(peak) - 2.5) <= t.pdf.grid(1) - t.pdf.grid(0));
    const double h = t.pdf.bandwidth;
    for (Eigen::Index i = 0; i < t.pdf.grid.size(); i += 10) {
        const double z = (t.pdf.grid(i) - 2.5) / h;
        CHECK(t.pdf.density(i) == doctest::Approx(std::exp(-0.5 * z * z) / (h * std::sqrt(2.0 * std::numbers::pi))));
    }
}

TEST_CASE("truth PDFs are cached bitwise under a seed-dependent key") {
    const auto dir = test::scratch("truth-cache");
    test::AnalyticSystem sys(2, 0.0, 1.0, 0.2);
    const TruthData a = build_truth_pdf(sys, 300, 4, 1.0, 128, dir);
    CHECK_FALSE(a.from_cache);
    const std::size_t calls = sys.calls;
    const TruthData b = build_truth_pdf(sys, 300, 4, 1.0, 128, dir);
    CHECK(b.from_cache);
    CHECK(sys.calls == calls);
    CHECK(b.key == a.key);
    CHECK(b.inputs == a.inputs);
    CHECK(b.outputs == a.outputs);
    CHECK(b.pdf.density == a.pdf.density);
    CHECK(truth_cache_key(sys, 300, 5) != a.key);
    CHECK(truth_cache_key(test::AnalyticSystem(2, 0.0, 1.0, 0.3), 300, 4) != a.key);
}

TEST_CASE("truth PDF tolerates rare failures and aborts on frequent ones") {
    test::AnalyticSystem sys(2, 0.0, 1.0, 0.0);
    sys.fail_above = 5.99;  // about 0.08% of an LHS design in [-6, 6]
    const TruthData t = build_truth_pdf(sys, 10000, 2, 1.0, 128);
    CHECK(t.failures > 0);
    CHECK(t.inputs.rows() == 10000 - static_cast<Eigen::Index>(t.failures));
    sys.fail_above = 5.9;
    CHECK_THROWS_AS(build_truth_pdf(sys, 10000, 2, 1.0, 128), NumericalFailure);
}

TEST_CASE("parallel evaluation matches serial evaluation") {
    test::AnalyticSystem sys(3, 0.5, -1.0, 2.0);
    sys.fail_above = 0.5;
    const Matrix xs = test::random_matrix(257, 3, 7);
    const Evaluations a = evaluate_all(sys, xs, 1);
    const Evaluations b = evaluate_all(sys, xs, 4);
    CHECK(a.failed == b.failed);
    CHECK(a.values.array().isNaN().count() == static_cast<Eigen::Index>(a.failed.size()));
    for (Eigen::Index i = 0; i < xs.rows(); ++i)
        if (!std::isnan(a.values(i))) CHECK(a.values(i) == b.values(i));
}

TEST_CASE("SIR truth has a heavy right tail") {
    const auto sir = make_system(config_from_json(json::object()).system);
    const TruthData t = build_truth_pdf(*sir, 20000, 12345, 1e7, 1024);
    const Vector y = t.outputs / 1e7;
    Eigen::Index mode = 0;
    t.pdf.density.maxCoeff(&mode);
    const double q = weighted_quantile(y, t.weights, 0.9999);
    CHECK(q > t.pdf.grid(mode));
    CHECK(t.pdf.density(mode) / t.pdf.interpolate(q) >= 1e3);
}

TEST_CASE("zero iterations log only the initial fit") {
    const auto dir = test::scratch("run-zero");
    const AnalyticSetup s;
    ExperimentConfig cfg = s.config(dir);
    cfg.n_iter = 0;
    const ExperimentLog log = run_experiment(cfg, s.options());
    REQUIRE(log.records.size() == 1);
    CHECK(log.records[0].iteration == 0);
    CHECK(log.records[0].n_samples == cfg.n_init);
    CHECK(std::isfinite(log.records[0].error));
    CHECK(log.status == RunStatus::Complete);
    for (const char* f : {"log.csv", "samples.csv", "state.json", "model.json", "manifest.json", "pdf.csv"})
        CHECK(std::filesystem::exists(dir / f));
}

TEST_CASE("runs grow the dataset by whole batches inside the box") {
    const AnalyticSetup s;
    for (AcquisitionKind kind : {AcquisitionKind::Lhs, AcquisitionKind::Us, AcquisitionKind::Uslw}) {
        const auto dir = test::scratch("run-growth-" + to_string(kind));
        ExperimentConfig cfg = s.config(dir);
        cfg.acquisition.kind = kind;
        const ExperimentLog log = run_experiment(cfg, s.options());
        REQUIRE(log.records.size() == 5);
        for (std::size_t i = 0; i < log.records.size(); ++i) {
            const auto& r = log.records[i];
            CHECK(r.iteration == static_cast<Eigen::Index>(i));
            CHECK(r.n_samples == cfg.n_init + r.iteration * cfg.acquisition.batch_size);
            CHECK_FALSE(r.short_batch);
            for (Eigen::Index p = 0; p < r.batch.rows(); ++p) CHECK(s.system->bounds().contains(r.batch.row(p).transpose()));
            if (i > 0) CHECK(r.n_samples > log.records[i - 1].n_samples);
            if (i > 0 && kind != AcquisitionKind::Lhs) {
                const double r_min = acquisition::exclusion_radius(s.system->bounds(), cfg.acquisition.r_l);
                for (Eigen::Index p = 0; p < r.batch.rows(); ++p)
                    for (Eigen::Index q = p + 1; q < r.batch.rows(); ++q)
                        CHECK((r.batch.row(p) - r.batch.row(q)).norm() >= r_min);
            }
        }
        CHECK(log.inputs.rows() == cfg.n_init + 4 * cfg.acquisition.batch_size);

        const Table t = read_csv(dir / "log.csv");
        CHECK(t.rows.size() == 5);
        CHECK(t.rows.back()[t.column("error")] == log.records.back().error);
        const Table samples = read_csv(dir / "samples.csv");
        CHECK(samples.rows.size() == static_cast<std::size_t>(log.inputs.rows()));
        CHECK(samples.columns == std::vector<std::string>{"iteration", "x0", "x1", "qoi"});
    }
}

TEST_CASE("identical configurations give identical logs") {
    const AnalyticSetup s;
    for (SurrogateKind kind : {SurrogateKind::Gp, SurrogateKind::Dno}) {
        const ExperimentLog a = run_experiment(s.config(test::scratch("det-a"), kind), s.options());
        const ExperimentLog b = run_experiment(s.config(test::scratch("det-b"), kind), s.options());
        check_same_records(a, b);
        ExperimentConfig other = s.config(test::scratch("det-c"), kind);
        other.seed = 12;
        CHECK(run_experiment(other, s.options()).records[1].batch != a.records[1].batch);
    }
}

TEST_CASE("a resumed run continues the uninterrupted trajectory") {
    const AnalyticSetup s;
    for (SurrogateKind kind : {SurrogateKind::Gp, SurrogateKind::Dno}) {
        const ExperimentLog full = run_experiment(s.config(test::scratch("resume-full"), kind), s.options());

        const auto dir = test::scratch("resume-part");
        RunOptions first = s.options();
        first.stop_after = 2;
        const ExperimentLog part = run_experiment(s.config(dir, kind), first);
        CHECK(part.status == RunStatus::Interrupted);
        CHECK(part.records.size() == 3);

        RunOptions again = s.options();
        again.resume = true;
        const ExperimentLog resumed = run_experiment(s.config(dir, kind), again);
        CHECK(resumed.status == RunStatus::Complete);
        check_same_records(full, resumed);
        check_same_records(full, load_experiment(dir));

        ExperimentConfig changed = s.config(dir, kind);
        changed.acquisition.batch_size = 1;
        CHECK_THROWS_AS(run_experiment(changed, again), InvalidArgument);
    }
}

TEST_CASE("training failure retries once and then aborts with a partial log") {
    const AnalyticSetup s;
    const auto dir = test::scratch("abort");
    ExperimentConfig cfg = s.config(dir, SurrogateKind::Dno);
    cfg.surrogate.dno.adam.learning_rate = std::numeric_limits<double>::infinity();
    const ExperimentLog log = run_experiment(cfg, s.options());
    CHECK(log.status == RunStatus::Aborted);
    REQUIRE(log.records.size() == 1);
    CHECK(log.records[0].retried);
    CHECK(std::isnan(log.records[0].error));
    CHECK(log.message.find("training failed") != std::string::npos);
    const ExperimentLog back = load_experiment(dir);
    CHECK(back.status == RunStatus::Aborted);
    CHECK(std::isnan(back.records[0].error));
    CHECK(back.inputs.rows() == cfg.n_init);
}

TEST_CASE("failed evaluations shorten the batch and are counted") {
    AnalyticSetup s;
    s.system->fail_above = 0.0;
    const auto dir = test::scratch("short-batch");
    ExperimentConfig cfg = s.config(dir);
    cfg.acquisition.kind = AcquisitionKind::Lhs;
    cfg.n_init = 8;
    const ExperimentLog log = run_experiment(cfg, s.options());
    std::size_t failures = 0;
    for (const auto& r : log.records) {
        failures += r.failures;
        const Eigen::Index asked = r.iteration == 0 ? cfg.n_init : cfg.acquisition.batch_size;
        CHECK(r.batch.rows() + static_cast<Eigen::Index>(r.failures) == asked);
        CHECK(r.short_batch == (r.failures > 0));
        for (Eigen::Index p = 0; p < r.batch.rows(); ++p) CHECK(r.batch(p, 0) <= 0.0);
    }
    CHECK(failures > 0);
    CHECK(log.inputs.rows() == log.records.back().n_samples);
}

TEST_CASE("pool systems acquire only stored inputs and stop when the pool is used up") {
    const auto dir = test::scratch("pool");
    const test::AnalyticSystem g(2, 0.0, 1.0, 0.5);
    systems::TabulatedData data;
    data.inputs = test::random_matrix(14, 2, 3, -3.0, 3.0);
    data.outputs.resize(14);
    for (Eigen::Index i = 0; i < 14; ++i) data.outputs(i) = g.evaluate(data.inputs.row(i).transpose());
    systems::save_tabulated(dir / "pool.csv", data);

    json j = json::parse(R"({
        "system": {"type": "tabulated"},
        "surrogate": {"type": "gp", "restarts": 1},
        "acquisition": {"type": "uslw", "n_probe": 500, "batch_size": 3, "r_l": 0.0},
        "experiment": {"n_init": 4, "n_iter": 6, "n_test": 100}
    })");
    j["system"]["data"] = (dir / "pool.csv").string();
    j["experiment"]["output_dir"] = (dir / "run").string();
    const ExperimentConfig cfg = config_from_json(j);
    const ExperimentLog log = run_experiment(cfg);
    CHECK(log.status == RunStatus::Exhausted);
    CHECK(log.inputs.rows() == 14);
    std::set<std::pair<double, double>> seen;
    for (Eigen::Index i = 0; i < log.inputs.rows(); ++i) {
        CHECK(seen.insert({log.inputs(i, 0), log.inputs(i, 1)}).second);
        bool stored = false;
        for (Eigen::Index p = 0; p < 14; ++p) stored |= data.inputs.row(p) == log.inputs.row(i);
        CHECK(stored);
    }
}

TEST_CASE("campaign summaries: single repeat, identical columns, missing entries") {
    const AnalyticSetup s;
    const ExperimentLog a = run_experiment(s.config(test::scratch("camp-a")), s.options());
    const CampaignColumn one = summarize_repeats("one", {a});
    REQUIRE(one.median.size() == a.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(*one.median[i] == a.records[i].error);
        CHECK(*one.stddev[i] == 0.0);
        CHECK(*one.n_samples[i] == static_cast<double>(a.records[i].n_samples));
    }

    ExperimentLog shorter = a;
    shorter.records.resize(2);
    ExperimentLog aborted = a;
    aborted.status = RunStatus::Aborted;
    const CampaignColumn mixed = summarize_repeats("mixed", {a, shorter});
    CHECK(mixed.median[1].has_value());
    CHECK_FALSE(mixed.median[2].has_value());
    CHECK_FALSE(summarize_repeats("ab", {a, aborted}).median[0].has_value());

    ExperimentLog b = a;
    for (auto& r : b.records) r.error *= 3.0;
    const CampaignColumn two = summarize_repeats("two", {a, b});
    CHECK(*two.median[1] == doctest::Approx(2.0 * a.records[1].error));
    CHECK(*two.stddev[1] == doctest::Approx(std::sqrt(2.0) * a.records[1].error));
}

TEST_CASE("campaigns run every variant and seed and write a table") {
    const auto dir = test::scratch("campaign");
    json base = config_to_json(small_sir_gp(dir));
    base["experiment"]["n_iter"] = 2;
    base["experiment"]["n_test"] = 300;
    const json spec_json = {{"base", base},
                            {"variants",
                             {{{"label", "uslw"}},
                              {{"label", "uslw_again"}},
                              {{"label", "lhs"}, {"override", {{"acquisition", {{"type", "lhs"}}}}}}}},
                            {"seeds", {1, 2}},
                            {"output_dir", (dir / "runs").string()}};
    const CampaignSpec spec = campaign_from_json(spec_json);
    REQUIRE(spec.entries.size() == 3);
    CHECK(spec.entries[2].config.acquisition.kind == AcquisitionKind::Lhs);
    const CampaignTable t = compare_campaign(spec);
    REQUIRE(t.columns.size() == 3);
    CHECK(t.iterations.size() == 3);
    CHECK(t.columns[0].median == t.columns[1].median);
    CHECK(t.columns[0].stddev == t.columns[1].stddev);
    CHECK(std::filesystem::exists(dir / "runs" / "lhs" / "seed-2" / "log.csv"));

    write_campaign_csv(dir / "c.csv", t);
    const Table back = read_csv(dir / "c.csv");
    CHECK(back.columns == std::vector<std::string>{"iteration", "uslw_n_samples", "uslw_median", "uslw_std",
                                                   "uslw_again_n_samples", "uslw_again_median", "uslw_again_std",
                                                   "lhs_n_samples", "lhs_median", "lhs_std"});
    CHECK(back.rows.size() == 3);
    CHECK(back.rows[2][back.column("lhs_median")] == *t.columns[2].median[2]);

    CampaignTable gap = t;
    gap.columns[0].median[1].reset();
    write_campaign_csv(dir / "gap.csv", gap);
    CHECK(std::isnan(read_csv(dir / "gap.csv").rows[1][2]));

    CHECK_THROWS_AS(campaign_from_json(json::parse(R"({"variants": [{"label": "a"}, {"label": "a"}]})")), InvalidArgument);
    CHECK_THROWS_AS(campaign_from_json(json::parse(R"({"variants": [], "seeds": [1]})")), InvalidArgument);
    CHECK_THROWS_AS(campaign_from_json(json::parse(R"({"variants": [{"label": "a"}], "repeat": 3})")), InvalidArgument);
}

TEST_CASE("field export covers the grid for 2D runs only") {
    const auto dir = test::scratch("field");
    const ExperimentConfig cfg = small_sir_gp(dir / "run");
    run_experiment(cfg);
    const FieldGrid f = export_field(dir / "run", std::nullopt, 21);
    CHECK(f.iteration == 3);
    CHECK(f.points.rows() == 21 * 21);
    CHECK(f.points(0, 0) == -6.0);
    CHECK(f.points(1, 0) > f.points(0, 0));
    CHECK(f.points(1, 1) == f.points(0, 1));
    CHECK(f.variance.minCoeff() >= 0.0);
    CHECK(f.danger.minCoeff() > 0.0);
    CHECK((f.acquisition - f.danger.cwiseProduct(f.variance)).cwiseAbs().maxCoeff() <= 1e-12 * f.acquisition.cwiseAbs().maxCoeff());

    const FieldGrid early = export_field(dir / "run", 1, 11);
    CHECK(early.iteration == 1);
    CHECK(early.points.rows() == 121);
    CHECK_THROWS_AS(export_field(dir / "run", 7, 11), InvalidArgument);

    write_field_csv(dir / "f.csv", f);
    const Table t = read_csv(dir / "f.csv");
    CHECK(t.columns == std::vector<std::string>{"x0", "x1", "mu", "var", "w", "a"});
    CHECK(t.rows.size() == 441);

    json j = config_to_json(cfg);
    j["system"]["modes"] = 3;
    j["experiment"]["n_iter"] = 0;
    j["experiment"]["output_dir"] = (dir / "run3").string();
    run_experiment(config_from_json(j));
    try {
        export_field(dir / "run3", std::nullopt, 11);
        FAIL("expected an error");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("unsupported dimension") != std::string::npos);
    }
}

TEST_CASE("number formatting and CSV reading") {
    for (double v : {0.1, 1e-300, 12345678.9, -2.5e17, 1.0 / 3.0}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    const auto dir = test::scratch("csv");
    std::ofstream(dir / "t.csv") << "a,b,c\n1,,3\nnan,2,\n";
    const Table t = read_csv(dir / "t.csv");
    CHECK(t.rows.size() == 2);
    CHECK(std::isnan(t.rows[0][1]));
    CHECK(std::isnan(t.rows[1][0]));
    CHECK(std::isnan(t.rows[1][2]));
    CHECK(t.rows[0][2] == 3.0);
    CHECK_THROWS_AS(t.column("d"), InvalidArgument);
    std::ofstream(dir / "bad.csv") << "a,b\n1,2,3\n";
    CHECK_THROWS_AS(read_csv(dir / "bad.csv"), InvalidArgument);
}

}  // TEST_SUITE
