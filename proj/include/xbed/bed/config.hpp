#pragma once

#include "xbed/acquisition/optimize.hpp"
#include "xbed/dno/ensemble.hpp"
#include "xbed/gp/gp.hpp"
#include "xbed/systems/system.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace xbed::bed {

enum class SystemKind { Sir, Mmt, Tabulated };
enum class SurrogateKind { Dno, Gp };
enum class AcquisitionKind { Lhs, Us, Uslw };
enum class InitMode { Lhs, Prior };

struct SystemSpec {
    SystemKind kind = SystemKind::Sir;
    Eigen::Index modes = 2;         // KL modes; MMT parameter dimension is twice this
    double half_width = 6.0;        // box [-half_width, half_width]^D unless lower/upper given
    std::optional<Vector> lower, upper;
    nlohmann::json params = nlohmann::json::object();  // physical overrides, see README
    std::filesystem::path data;     // tabulated dataset
    double match_tolerance = 1e-9;
};

struct SurrogateSpec {
    SurrogateKind kind = SurrogateKind::Dno;
    dno::DnoConfig dno;
    bool warm_start = false;
    gp::GpFitOptions gp;
};

struct AcquisitionSpec {
    AcquisitionKind kind = AcquisitionKind::Uslw;
    Eigen::Index n_q = 100000;
    Eigen::Index n_probe = 100000;
    Eigen::Index batch_size = 1;
    double r_l = 0.025;
    acquisition::CandidateDistribution candidates = acquisition::CandidateDistribution::Uniform;
    Eigen::Index pdf_grid = 512;  // points of the p_mu grid
};

struct ExperimentConfig {
    SystemSpec system;
    SurrogateSpec surrogate;
    AcquisitionSpec acquisition;
    Eigen::Index n_init = 3;
    InitMode init = InitMode::Lhs;
    Eigen::Index n_iter = 60;
    std::uint64_t seed = 0;
    Eigen::Index n_test = 20000;
    std::uint64_t test_seed = 12345;
    std::optional<double> e0;    // per-system default when absent
    Eigen::Index pdf_grid = 1024;  // points of the truth PDF grid
    std::filesystem::path output_dir = "xbed-run";
    std::filesystem::path cache_dir;  // empty: no truth cache
    int workers = 0;                  // 0: hardware concurrency

    double error_scale() const;
    std::vector<std::string> warnings() const;
    void validate() const;
};

std::string to_string(SystemKind k);
std::string to_string(SurrogateKind k);
std::string to_string(AcquisitionKind k);
std::string to_string(InitMode k);

/// Unknown keys and malformed values raise InvalidArgument naming the key.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Builds the described system; KL bases are computed here.
systems::SystemPtr make_system(const SystemSpec& spec);

/// Default e0: 1e7 for SIR, 1 otherwise.
double default_error_scale(SystemKind kind);

}  // namespace xbed::bed
