#include "xbed/bed/config.hpp"

#include "xbed/systems/mmt.hpp"
#include "xbed/systems/sir.hpp"
#include "xbed/systems/tabulated.hpp"

#include <fstream>
#include <set>

namespace xbed::bed {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw InvalidArgument(where + ": expected a table");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw InvalidArgument(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidArgument(where + "." + key + ": " + e.what());
    }
}

Vector read_vector(const json& j, const std::string& where) {
    if (!j.is_array()) throw InvalidArgument(where + ": expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InvalidArgument(where + ": expected numbers");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

template <class E>
E parse_enum(const json& j, const char* key, E fallback, const std::vector<std::pair<std::string, E>>& names,
             const std::string& where) {
    if (!j.contains(key)) return fallback;
    const std::string s = j.at(key).is_string() ? j.at(key).get<std::string>() : std::string{};
    for (const auto& [n, e] : names)
        if (n == s) return e;
    std::string options;
    for (const auto& [n, e] : names) options += (options.empty() ? "" : " | ") + n;
    throw InvalidArgument(where + "." + key + ": expected one of " + options);
}

const std::vector<std::pair<std::string, SystemKind>> kSystemNames = {
    {"sir", SystemKind::Sir}, {"mmt", SystemKind::Mmt}, {"tabulated", SystemKind::Tabulated}};
const std::vector<std::pair<std::string, SurrogateKind>> kSurrogateNames = {{"dno", SurrogateKind::Dno},
                                                                            {"gp", SurrogateKind::Gp}};
const std::vector<std::pair<std::string, AcquisitionKind>> kAcquisitionNames = {
    {"lhs", AcquisitionKind::Lhs}, {"us", AcquisitionKind::Us}, {"uslw", AcquisitionKind::Uslw}};
const std::vector<std::pair<std::string, InitMode>> kInitNames = {{"lhs", InitMode::Lhs}, {"prior", InitMode::Prior}};
const std::vector<std::pair<std::string, acquisition::CandidateDistribution>> kCandidateNames = {
    {"uniform", acquisition::CandidateDistribution::Uniform}, {"prior", acquisition::CandidateDistribution::Prior}};

template <class E>
std::string enum_name(E e, const std::vector<std::pair<std::string, E>>& names) {
    for (const auto& [n, v] : names)
        if (v == e) return n;
    return "?";
}

}  // namespace

std::string to_string(SystemKind k) { return enum_name(k, kSystemNames); }
std::string to_string(SurrogateKind k) { return enum_name(k, kSurrogateNames); }
std::string to_string(AcquisitionKind k) { return enum_name(k, kAcquisitionNames); }
std::string to_string(InitMode k) { return enum_name(k, kInitNames); }

double default_error_scale(SystemKind kind) { return kind == SystemKind::Sir ? 1e7 : 1.0; }

double ExperimentConfig::error_scale() const { return e0 ? *e0 : default_error_scale(system.kind); }

std::vector<std::string> ExperimentConfig::warnings() const {
    std::vector<std::string> w;
    if (acquisition.kind == AcquisitionKind::Lhs) {
        const AcquisitionSpec d;
        if (acquisition.n_q != d.n_q || acquisition.n_probe != d.n_probe || acquisition.r_l != d.r_l ||
            acquisition.candidates != d.candidates || acquisition.pdf_grid != d.pdf_grid)
            w.push_back("acquisition 'lhs' ignores n_q, n_probe, r_l, candidates and pdf_grid");
    }
    if (system.kind == SystemKind::Tabulated && acquisition.kind != AcquisitionKind::Lhs &&
        acquisition.candidates != acquisition::CandidateDistribution::Uniform)
        w.push_back("tabulated systems score their stored pool; 'candidates' is ignored");
    return w;
}

void ExperimentConfig::validate() const {
    require(n_init >= 1, "experiment.n_init must be at least 1");
    require(n_iter >= 0, "experiment.n_iter must be non-negative");
    require(n_test >= 2, "experiment.n_test must be at least 2");
    require(pdf_grid >= 2, "experiment.pdf_grid must be at least 2");
    require(error_scale() > 0.0, "experiment.e0 must be positive");
    require(acquisition.batch_size >= 1, "acquisition.batch_size must be at least 1");
    require(acquisition.n_q >= 1, "acquisition.n_q must be at least 1");
    require(acquisition.n_probe >= 2, "acquisition.n_probe must be at least 2");
    require(acquisition.pdf_grid >= 2, "acquisition.pdf_grid must be at least 2");
    require(acquisition.r_l >= 0.0 && acquisition.r_l < 1.0, "acquisition.r_l must lie in [0, 1)");
    require(system.modes >= 1, "system.modes must be at least 1");
    require(system.half_width > 0.0, "system.half_width must be positive");
    require(system.lower.has_value() == system.upper.has_value(), "system.lower and system.upper go together");
    require(workers >= 0, "experiment.workers must be non-negative");
    if (surrogate.kind == SurrogateKind::Dno) {
        const auto& d = surrogate.dno;
        require(d.ensemble_size >= 2, "surrogate.ensemble_size must be at least 2");
        require(d.branch_layers >= 1 && d.width >= 1 && d.trunk_dim >= 1, "surrogate network sizes must be positive");
        require(d.epochs >= 1, "surrogate.epochs must be at least 1");
        require(d.adam.learning_rate > 0.0, "surrogate.learning_rate must be positive");
        require(n_init >= 2, "experiment.n_init must be at least 2 for an operator ensemble");
    } else {
        require(surrogate.gp.restarts >= 1 && surrogate.gp.max_iterations >= 1, "surrogate GP options must be positive");
    }
    if (system.kind == SystemKind::Tabulated) require(!system.data.empty(), "system.data is required for tabulated systems");
}

ExperimentConfig config_from_json(const json& j) {
    check_keys(j, "config", {"system", "surrogate", "acquisition", "experiment"});
    ExperimentConfig cfg;

    if (j.contains("system")) {
        const json& s = j.at("system");
        check_keys(s, "system", {"type", "modes", "half_width", "lower", "upper", "params", "data", "match_tolerance"});
        cfg.system.kind = parse_enum(s, "type", cfg.system.kind, kSystemNames, "system");
        read(s, "modes", cfg.system.modes, "system");
        read(s, "half_width", cfg.system.half_width, "system");
        if (s.contains("lower")) cfg.system.lower = read_vector(s.at("lower"), "system.lower");
        if (s.contains("upper")) cfg.system.upper = read_vector(s.at("upper"), "system.upper");
        if (s.contains("params")) cfg.system.params = s.at("params");
        std::string data;
        read(s, "data", data, "system");
        cfg.system.data = data;
        read(s, "match_tolerance", cfg.system.match_tolerance, "system");
    }

    if (j.contains("surrogate")) {
        const json& s = j.at("surrogate");
        check_keys(s, "surrogate", {"type", "ensemble_size", "branch_layers", "width", "trunk_dim", "epochs", "learning_rate",
                                    "warm_start", "restarts", "max_iterations", "gradient_tolerance"});
        cfg.surrogate.kind = parse_enum(s, "type", cfg.surrogate.kind, kSurrogateNames, "surrogate");
        auto& d = cfg.surrogate.dno;
        read(s, "ensemble_size", d.ensemble_size, "surrogate");
        read(s, "branch_layers", d.branch_layers, "surrogate");
        read(s, "width", d.width, "surrogate");
        read(s, "trunk_dim", d.trunk_dim, "surrogate");
        read(s, "epochs", d.epochs, "surrogate");
        read(s, "learning_rate", d.adam.learning_rate, "surrogate");
        read(s, "warm_start", cfg.surrogate.warm_start, "surrogate");
        read(s, "restarts", cfg.surrogate.gp.restarts, "surrogate");
        read(s, "max_iterations", cfg.surrogate.gp.max_iterations, "surrogate");
        read(s, "gradient_tolerance", cfg.surrogate.gp.gradient_tolerance, "surrogate");
    }

    if (j.contains("acquisition")) {
        const json& a = j.at("acquisition");
        check_keys(a, "acquisition", {"type", "n_q", "n_probe", "batch_size", "r_l", "candidates", "pdf_grid"});
        cfg.acquisition.kind = parse_enum(a, "type", cfg.acquisition.kind, kAcquisitionNames, "acquisition");
        read(a, "n_q", cfg.acquisition.n_q, "acquisition");
        read(a, "n_probe", cfg.acquisition.n_probe, "acquisition");
        read(a, "batch_size", cfg.acquisition.batch_size, "acquisition");
        read(a, "r_l", cfg.acquisition.r_l, "acquisition");
        cfg.acquisition.candidates = parse_enum(a, "candidates", cfg.acquisition.candidates, kCandidateNames, "acquisition");
        read(a, "pdf_grid", cfg.acquisition.pdf_grid, "acquisition");
    }

    if (j.contains("experiment")) {
        const json& e = j.at("experiment");
        check_keys(e, "experiment", {"n_init", "init", "n_iter", "seed", "n_test", "test_seed", "e0", "pdf_grid",
                                     "output_dir", "cache_dir", "workers"});
        read(e, "n_init", cfg.n_init, "experiment");
        cfg.init = parse_enum(e, "init", cfg.init, kInitNames, "experiment");
        read(e, "n_iter", cfg.n_iter, "experiment");
        read(e, "seed", cfg.seed, "experiment");
        read(e, "n_test", cfg.n_test, "experiment");
        read(e, "test_seed", cfg.test_seed, "experiment");
        if (e.contains("e0")) {
            double e0 = 0.0;
            read(e, "e0", e0, "experiment");
            cfg.e0 = e0;
        }
        read(e, "pdf_grid", cfg.pdf_grid, "experiment");
        std::string out, cache;
        read(e, "output_dir", out, "experiment");
        read(e, "cache_dir", cache, "experiment");
        if (!out.empty()) cfg.output_dir = out;
        cfg.cache_dir = cache;
        read(e, "workers", cfg.workers, "experiment");
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json s = {{"type", to_string(cfg.system.kind)},
              {"modes", cfg.system.modes},
              {"half_width", cfg.system.half_width},
              {"params", cfg.system.params}};
    if (cfg.system.lower) {
        s["lower"] = std::vector<double>(cfg.system.lower->data(), cfg.system.lower->data() + cfg.system.lower->size());
        s["upper"] = std::vector<double>(cfg.system.upper->data(), cfg.system.upper->data() + cfg.system.upper->size());
    }
    if (cfg.system.kind == SystemKind::Tabulated) {
        s["data"] = cfg.system.data.string();
        s["match_tolerance"] = cfg.system.match_tolerance;
    }
    const auto& d = cfg.surrogate.dno;
    json sur = {{"type", to_string(cfg.surrogate.kind)}};
    if (cfg.surrogate.kind == SurrogateKind::Dno) {
        sur.update({{"ensemble_size", d.ensemble_size},
                    {"branch_layers", d.branch_layers},
                    {"width", d.width},
                    {"trunk_dim", d.trunk_dim},
                    {"epochs", d.epochs},
                    {"learning_rate", d.adam.learning_rate},
                    {"warm_start", cfg.surrogate.warm_start}});
    } else {
        sur.update({{"restarts", cfg.surrogate.gp.restarts},
                    {"max_iterations", cfg.surrogate.gp.max_iterations},
                    {"gradient_tolerance", cfg.surrogate.gp.gradient_tolerance}});
    }
    const auto& a = cfg.acquisition;
    json acq = {{"type", to_string(a.kind)},
                {"n_q", a.n_q},
                {"n_probe", a.n_probe},
                {"batch_size", a.batch_size},
                {"r_l", a.r_l},
                {"candidates", enum_name(a.candidates, kCandidateNames)},
                {"pdf_grid", a.pdf_grid}};
    json exp = {{"n_init", cfg.n_init},   {"init", to_string(cfg.init)},
                {"n_iter", cfg.n_iter},   {"seed", cfg.seed},
                {"n_test", cfg.n_test},   {"test_seed", cfg.test_seed},
                {"e0", cfg.error_scale()}, {"pdf_grid", cfg.pdf_grid},
                {"output_dir", cfg.output_dir.string()}, {"cache_dir", cfg.cache_dir.string()},
                {"workers", cfg.workers}};
    return {{"system", s}, {"surrogate", sur}, {"acquisition", acq}, {"experiment", exp}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

namespace {

stats::Bounds make_bounds(const SystemSpec& spec, Eigen::Index dim) {
    if (spec.lower) {
        require(spec.lower->size() == dim && spec.upper->size() == dim, "system bounds do not match the parameter dimension");
        return stats::Bounds(*spec.lower, *spec.upper);
    }
    return stats::Bounds::uniform(dim, -spec.half_width, spec.half_width);
}

systems::SystemPtr make_sir(const SystemSpec& spec) {
    const json& p = spec.params;
    check_keys(p, "system.params", {"gamma", "delta", "beta0", "phi0", "initial_infected", "population", "horizon", "dt",
                                    "kernel_variance", "kernel_length_scale", "n_sensors"});
    systems::SirKernel kernel;
    read(p, "kernel_variance", kernel.variance, "system.params");
    read(p, "kernel_length_scale", kernel.length_scale, "system.params");
    read(p, "n_sensors", kernel.n_sensors, "system.params");
    double horizon = 45.0;
    read(p, "horizon", horizon, "system.params");
    systems::SirConfig cfg;
    if (horizon == cfg.horizon) {
        cfg = systems::make_sir_config(spec.modes, kernel);
    } else {
        // The sensors span the simulated window.
        require(kernel.n_sensors >= 2, "system.params.n_sensors must be at least 2");
        cfg.horizon = horizon;
        const Vector grid = Vector::LinSpaced(kernel.n_sensors, 0.0, horizon);
        cfg.basis = stats::kl_expand(stats::rbf_kernel(kernel.variance, kernel.length_scale), grid, spec.modes);
    }
    read(p, "gamma", cfg.gamma, "system.params");
    read(p, "delta", cfg.delta, "system.params");
    read(p, "beta0", cfg.beta0, "system.params");
    read(p, "phi0", cfg.phi0, "system.params");
    read(p, "initial_infected", cfg.initial_infected, "system.params");
    read(p, "population", cfg.population, "system.params");
    read(p, "dt", cfg.dt, "system.params");
    cfg.validate();
    const stats::Bounds b = make_bounds(spec, cfg.basis.parameter_dimension());
    return std::make_shared<systems::SirSystem>(std::move(cfg), b);
}

systems::SystemPtr make_mmt(const SystemSpec& spec) {
    const json& p = spec.params;
    check_keys(p, "system.params", {"alpha", "lambda", "k_star", "n_x", "dt", "horizon", "dealias", "kernel_variance",
                                    "kernel_length_scale", "sensor_stride"});
    systems::MmtKernel kernel;
    read(p, "kernel_variance", kernel.variance, "system.params");
    read(p, "kernel_length_scale", kernel.length_scale, "system.params");
    Eigen::Index n_x = 512;
    read(p, "n_x", n_x, "system.params");
    systems::MmtConfig cfg;
    if (n_x == cfg.n_x) {
        cfg = systems::make_mmt_config(spec.modes, kernel);
    } else {
        require(n_x >= 8, "system.params.n_x is too small");
        cfg.n_x = n_x;
        Vector grid(n_x);
        for (Eigen::Index i = 0; i < n_x; ++i) grid(i) = static_cast<double>(i) / static_cast<double>(n_x);
        cfg.basis = stats::kl_expand(stats::complex_wave_kernel(kernel.variance, kernel.length_scale), grid, spec.modes);
    }
    read(p, "alpha", cfg.alpha, "system.params");
    read(p, "lambda", cfg.lambda, "system.params");
    read(p, "k_star", cfg.k_star, "system.params");
    read(p, "dt", cfg.dt, "system.params");
    read(p, "horizon", cfg.horizon, "system.params");
    read(p, "dealias", cfg.dealias, "system.params");
    Eigen::Index stride = 4;
    read(p, "sensor_stride", stride, "system.params");
    cfg.validate();
    const stats::Bounds b = make_bounds(spec, cfg.basis.parameter_dimension());
    return std::make_shared<systems::MmtSystem>(std::move(cfg), b, stride);
}

}  // namespace

systems::SystemPtr make_system(const SystemSpec& spec) {
    switch (spec.kind) {
        case SystemKind::Sir: return make_sir(spec);
        case SystemKind::Mmt: return make_mmt(spec);
        case SystemKind::Tabulated: {
            check_keys(spec.params, "system.params", {});
            systems::TabulatedData data = systems::load_tabulated(spec.data);
            std::optional<stats::Bounds> b;
            if (spec.lower) b = make_bounds(spec, data.inputs.cols());
            return std::make_shared<systems::TabulatedSystem>(std::move(data), spec.match_tolerance, b);
        }
    }
    throw InvalidArgument("unknown system kind");
}

}  // namespace xbed::bed
