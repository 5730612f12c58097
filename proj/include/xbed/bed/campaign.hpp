#pragma once

#include "xbed/bed/experiment.hpp"

#include <optional>

namespace xbed::bed {

struct CampaignEntry {
    std::string label;
    ExperimentConfig config;
};

struct CampaignSpec {
    std::vector<CampaignEntry> entries;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path output_dir = "xbed-campaign";
};

/// {"base": config, "variants": [{"label": ..., "override": partial config}],
///  "seeds": [...], "output_dir": ...}. Overrides are merged into the base.
CampaignSpec campaign_from_json(const nlohmann::json& j);
CampaignSpec load_campaign(const std::filesystem::path& path);

struct CampaignColumn {
    std::string label;
    std::vector<std::optional<double>> median;  // nullopt: some repeat has no value here
    std::vector<std::optional<double>> stddev;
    std::vector<std::optional<double>> n_samples;
    std::vector<RunStatus> statuses;             // one per repeat
};

struct CampaignTable {
    std::vector<Eigen::Index> iterations;
    std::vector<CampaignColumn> columns;
};

/// Per-iteration median and standard deviation (n - 1 denominator, 0 for a
/// single repeat) of the error across repeats.
CampaignColumn summarize_repeats(const std::string& label, const std::vector<ExperimentLog>& repeats);

/// Runs every entry once per seed under output_dir/<label>/seed-<seed> and
/// summarizes. A repeat that throws or aborts leaves its column entries missing.
CampaignTable compare_campaign(const CampaignSpec& spec,
                               const std::function<void(const std::string&, std::uint64_t, const ExperimentLog&)>& on_run = {});

/// iteration,<label>_n_samples,<label>_median,<label>_std,... with empty fields for missing entries.
void write_campaign_csv(const std::filesystem::path& path, const CampaignTable& table);

}  // namespace xbed::bed
