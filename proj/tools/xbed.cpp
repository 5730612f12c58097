// Command-line front end: truth PDFs, single experiments, campaigns and field export.

#include "xbed/bed/campaign.hpp"
#include "xbed/bed/field.hpp"
#include "xbed/bed/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace xbed;

void print_record(const bed::IterationRecord& r) {
    std::fprintf(stderr, "iter %4ld  n=%5ld  error=%.6g  (%.2fs)%s%s\n", static_cast<long>(r.iteration),
                 static_cast<long>(r.n_samples), r.error, r.wall_time, r.short_batch ? "  short batch" : "",
                 r.retried ? "  retrained" : "");
    if (r.off_grid > 0) std::fprintf(stderr, "          %zu surrogate outputs fell outside the p_mu grid\n", r.off_grid);
    if (r.failures > 0) std::fprintf(stderr, "          %zu batch points failed to evaluate\n", r.failures);
}

int cmd_truth(const std::string& config_path, const std::string& out) {
    const bed::ExperimentConfig cfg = bed::load_config(config_path);
    const auto system = bed::make_system(cfg.system);
    const bed::TruthData truth = bed::build_truth_pdf(*system, cfg.n_test, cfg.test_seed, cfg.error_scale(), cfg.pdf_grid,
                                                      cfg.cache_dir, cfg.workers);
    std::fprintf(stderr, "%s: %ld test points (%zu failed), key %s%s\n", system->name().c_str(),
                 static_cast<long>(truth.inputs.rows()), truth.failures, truth.key.c_str(),
                 truth.from_cache ? " (cached)" : "");
    std::fprintf(stderr, "QoI range [%.6g, %.6g], bandwidth %.3g (scaled by e0 = %g)\n", truth.outputs.minCoeff(),
                 truth.outputs.maxCoeff(), truth.pdf.bandwidth, cfg.error_scale());
    if (!out.empty()) bed::write_pdf_table(out, truth.pdf);
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& output, std::optional<std::uint64_t> seed,
            std::optional<long> iterations, bool resume) {
    bed::ExperimentConfig cfg = bed::load_config(config_path);
    if (!output.empty()) cfg.output_dir = output;
    if (seed) cfg.seed = *seed;
    if (iterations) cfg.n_iter = *iterations;
    for (const auto& w : cfg.warnings()) std::fprintf(stderr, "warning: %s\n", w.c_str());
    bed::RunOptions opts;
    opts.resume = resume;
    opts.on_iteration = print_record;
    const bed::ExperimentLog log = bed::run_experiment(cfg, opts);
    std::fprintf(stderr, "%s: %s%s%s\n", cfg.output_dir.c_str(), bed::to_string(log.status).c_str(),
                 log.message.empty() ? "" : ": ", log.message.c_str());
    return log.status == bed::RunStatus::Aborted ? 2 : 0;
}

int cmd_campaign(const std::string& path, const std::string& output, const std::string& table) {
    bed::CampaignSpec spec = bed::load_campaign(path);
    if (!output.empty()) spec.output_dir = output;
    for (const auto& e : spec.entries)
        for (const auto& w : e.config.warnings()) std::fprintf(stderr, "warning (%s): %s\n", e.label.c_str(), w.c_str());
    const bed::CampaignTable t = bed::compare_campaign(spec, [](const std::string& label, std::uint64_t seed, const bed::ExperimentLog& log) {
        const double err = log.records.empty() ? std::nan("") : log.records.back().error;
        std::fprintf(stderr, "%-16s seed %-6llu %-10s final error %.6g%s%s\n", label.c_str(),
                     static_cast<unsigned long long>(seed), bed::to_string(log.status).c_str(), err,
                     log.message.empty() ? "" : "  ", log.message.c_str());
    });
    const std::filesystem::path out = table.empty() ? spec.output_dir / "campaign.csv" : std::filesystem::path(table);
    bed::write_campaign_csv(out, t);
    std::fprintf(stderr, "wrote %s\n", out.c_str());
    return 0;
}

int cmd_export(const std::string& run_dir, std::optional<long> iteration, long grid, const std::string& out) {
    const bed::FieldGrid f = bed::export_field(run_dir, iteration ? std::optional<Eigen::Index>(*iteration) : std::nullopt, grid);
    const std::filesystem::path path =
        out.empty() ? std::filesystem::path(run_dir) / ("field-" + std::to_string(f.iteration) + ".csv") : std::filesystem::path(out);
    bed::write_field_csv(path, f);
    std::fprintf(stderr, "wrote %s\n", path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Likelihood-weighted active sampling of rare-event statistics"};
    app.require_subcommand(1);

    std::string config, output, table, run_dir, out;
    std::optional<std::uint64_t> seed;
    std::optional<long> iterations, iteration;
    bool resume = false;
    long grid = 101;

    auto* truth = app.add_subcommand("truth", "Build (or load from cache) the reference QoI density");
    truth->add_option("-c,--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    truth->add_option("-o,--out", out, "Write the density table (y,truth) here");

    auto* run = app.add_subcommand("run", "Run one experiment");
    run->add_option("-c,--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", output, "Output directory (overrides the config)");
    run->add_option("-s,--seed", seed, "Experiment seed (overrides the config)");
    run->add_option("-n,--iterations", iterations, "Number of iterations (overrides the config)")->check(CLI::NonNegativeNumber);
    run->add_flag("--resume", resume, "Continue from the state in the output directory");

    auto* campaign = app.add_subcommand("campaign", "Repeat several configurations and tabulate median errors");
    campaign->add_option("-c,--config", config, "Campaign file (JSON)")->required()->check(CLI::ExistingFile);
    campaign->add_option("-o,--output", output, "Root directory for the runs");
    campaign->add_option("-t,--table", table, "Summary table path (default <output>/campaign.csv)");

    auto* exportf = app.add_subcommand("export-field", "Write mean/variance/danger/acquisition on a 2D grid");
    exportf->add_option("-r,--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    exportf->add_option("-i,--iteration", iteration, "Iteration whose model is used (default: last)");
    exportf->add_option("-g,--grid", grid, "Points per axis")->check(CLI::Range(2, 4001));
    exportf->add_option("-o,--out", out, "Output CSV (default <run>/field-<iteration>.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*truth) return cmd_truth(config, out);
        if (*run) return cmd_run(config, output, seed, iterations, resume);
        if (*campaign) return cmd_campaign(config, output, table);
        if (*exportf) return cmd_export(run_dir, iteration, grid, out);
    } catch (const xbed::InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
