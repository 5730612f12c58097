#include "xbed/bed/campaign.hpp"

#include "xbed/bed/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace xbed::bed {

using nlohmann::json;

CampaignSpec campaign_from_json(const json& j) {
    require(j.is_object(), "campaign: expected a table");
    for (const auto& [key, value] : j.items())
        if (key != "base" && key != "variants" && key != "seeds" && key != "output_dir")
            throw InvalidArgument("campaign: unknown key '" + key + "'");
    CampaignSpec spec;
    const json base = j.value("base", json::object());
    require(j.contains("variants") && j.at("variants").is_array() && !j.at("variants").empty(),
            "campaign: 'variants' must be a non-empty array");
    std::set<std::string> labels;
    for (const auto& v : j.at("variants")) {
        require(v.is_object() && v.contains("label") && v.at("label").is_string(), "campaign: every variant needs a label");
        const std::string label = v.at("label").get<std::string>();
        require(!label.empty() && label.find_first_of(",/\\\n") == std::string::npos,
                "campaign: label '" + label + "' must be non-empty without commas or slashes");
        require(labels.insert(label).second, "campaign: duplicate label '" + label + "'");
        json merged = base;
        if (v.contains("override")) merged.merge_patch(v.at("override"));
        try {
            spec.entries.push_back({label, config_from_json(merged)});
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("campaign variant '" + label + "': " + e.what());
        }
    }
    if (j.contains("seeds")) {
        require(j.at("seeds").is_array() && !j.at("seeds").empty(), "campaign: 'seeds' must be a non-empty array");
        spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
        spec.seeds = {0};
    }
    if (j.contains("output_dir")) spec.output_dir = j.at("output_dir").get<std::string>();
    return spec;
}

CampaignSpec load_campaign(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open campaign " + path.string());
    try {
        return campaign_from_json(json::parse(in, nullptr, true, true));
    } catch (const json::exception& e) {
        throw InvalidArgument("campaign " + path.string() + ": " + e.what());
    }
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

CampaignColumn summarize_repeats(const std::string& label, const std::vector<ExperimentLog>& repeats) {
    require(!repeats.empty(), "summarize_repeats: no repeats");
    CampaignColumn col;
    col.label = label;
    Eigen::Index last = -1;
    for (const auto& r : repeats) {
        col.statuses.push_back(r.status);
        for (const auto& rec : r.records) last = std::max(last, rec.iteration);
    }
    for (Eigen::Index it = 0; it <= last; ++it) {
        std::vector<double> err, n;
        for (const auto& r : repeats) {
            if (r.status == RunStatus::Aborted) continue;
            for (const auto& rec : r.records)
                if (rec.iteration == it && std::isfinite(rec.error)) {
                    err.push_back(rec.error);
                    n.push_back(static_cast<double>(rec.n_samples));
                }
        }
        if (err.size() == repeats.size()) {
            col.median.emplace_back(median(err));
            col.stddev.emplace_back(stddev(err));
            col.n_samples.emplace_back(median(n));
        } else {
            col.median.emplace_back();
            col.stddev.emplace_back();
            col.n_samples.emplace_back();
        }
    }
    return col;
}

CampaignTable compare_campaign(const CampaignSpec& spec,
                               const std::function<void(const std::string&, std::uint64_t, const ExperimentLog&)>& on_run) {
    require(!spec.entries.empty(), "compare_campaign: no configurations");
    require(!spec.seeds.empty(), "compare_campaign: no seeds");
    std::map<std::string, systems::SystemPtr> systems_by_spec;
    std::map<std::string, std::shared_ptr<const TruthData>> truths;
    CampaignTable table;
    std::size_t rows = 0;
    for (const auto& entry : spec.entries) {
        const std::string sys_key = config_to_json(entry.config)["system"].dump();
        auto& system = systems_by_spec[sys_key];
        if (!system) system = make_system(entry.config.system);
        const auto& c = entry.config;
        const std::string truth_key = truth_cache_key(*system, c.n_test, c.test_seed) + "/" +
                                      format_double(c.error_scale()) + "/" + std::to_string(c.pdf_grid);
        auto& truth = truths[truth_key];
        if (!truth)
            truth = std::make_shared<TruthData>(
                build_truth_pdf(*system, c.n_test, c.test_seed, c.error_scale(), c.pdf_grid, c.cache_dir, c.workers));

        std::vector<ExperimentLog> repeats;
        for (std::uint64_t seed : spec.seeds) {
            ExperimentConfig cfg = entry.config;
            cfg.seed = seed;
            cfg.output_dir = spec.output_dir / entry.label / ("seed-" + std::to_string(seed));
            RunOptions opts;
            opts.system = system;
            opts.truth = truth;
            ExperimentLog log;
            try {
                log = run_experiment(cfg, opts);
            } catch (const std::exception& e) {
                log.status = RunStatus::Aborted;
                log.message = e.what();
                log.directory = cfg.output_dir;
            }
            if (on_run) on_run(entry.label, seed, log);
            repeats.push_back(std::move(log));
        }
        table.columns.push_back(summarize_repeats(entry.label, repeats));
        rows = std::max(rows, table.columns.back().median.size());
    }
    for (auto& col : table.columns) {
        col.median.resize(rows);
        col.stddev.resize(rows);
        col.n_samples.resize(rows);
    }
    for (std::size_t i = 0; i < rows; ++i) table.iterations.push_back(static_cast<Eigen::Index>(i));
    return table;
}

void write_campaign_csv(const std::filesystem::path& path, const CampaignTable& table) {
    std::ostringstream os;
    os << "iteration";
    for (const auto& c : table.columns) os << ',' << c.label << "_n_samples," << c.label << "_median," << c.label << "_std";
    os << '\n';
    auto field = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
    for (std::size_t i = 0; i < table.iterations.size(); ++i) {
        os << table.iterations[i];
        for (const auto& c : table.columns)
            os << ',' << field(c.n_samples[i]) << ',' << field(c.median[i]) << ',' << field(c.stddev[i]);
        os << '\n';
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_text_atomic(path, os.str());
}

}  // namespace xbed::bed
