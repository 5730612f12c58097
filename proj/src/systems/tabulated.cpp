#include "xbed/systems/tabulated.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace xbed::systems {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::string s = line;
    for (char& c : s)
        if (c == ',' || c == '\t' || c == ';') c = ' ';
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string tok; is >> tok;) out.push_back(tok);
    return out;
}

stats::Bounds data_bounds(const Matrix& inputs) {
    Vector lo = inputs.colwise().minCoeff().transpose();
    Vector hi = inputs.colwise().maxCoeff().transpose();
    for (Eigen::Index d = 0; d < lo.size(); ++d)
        if (!(hi(d) > lo(d))) hi(d) = lo(d) + 1.0;
    return {lo, hi};
}

}  // namespace

TabulatedData load_tabulated(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("tabulated: cannot open " + path.string());
    std::string line;
    std::size_t n_cols = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        n_cols = split_fields(line).size();
        break;
    }
    require(n_cols >= 2, "tabulated: header must name at least one input and one QoI column");
    std::vector<double> values;
    std::size_t n_rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        require(fields.size() == n_cols, "tabulated: row " + std::to_string(n_rows + 1) + " has wrong column count");
        for (const auto& f : fields) values.push_back(std::stod(f));
        ++n_rows;
    }
    require(n_rows >= 1, "tabulated: no data rows");
    TabulatedData data;
    const auto d = static_cast<Eigen::Index>(n_cols - 1);
    data.inputs.resize(static_cast<Eigen::Index>(n_rows), d);
    data.outputs.resize(static_cast<Eigen::Index>(n_rows));
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) data.inputs(static_cast<Eigen::Index>(r), c) = values[r * n_cols + static_cast<std::size_t>(c)];
        data.outputs(static_cast<Eigen::Index>(r)) = values[r * n_cols + n_cols - 1];
    }
    return data;
}

void save_tabulated(const std::filesystem::path& path, const TabulatedData& data) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("tabulated: cannot write " + path.string());
    for (Eigen::Index c = 0; c < data.inputs.cols(); ++c) out << 'x' << c << ',';
    out << "qoi\n";
    out.precision(17);
    for (Eigen::Index r = 0; r < data.inputs.rows(); ++r) {
        for (Eigen::Index c = 0; c < data.inputs.cols(); ++c) out << data.inputs(r, c) << ',';
        out << data.outputs(r) << '\n';
    }
}

TabulatedSystem::TabulatedSystem(TabulatedData data, double match_tolerance, std::optional<stats::Bounds> bounds)
    : data_(std::move(data)), tolerance_(match_tolerance) {
    require(data_.inputs.rows() >= 1, "tabulated: empty dataset");
    require(data_.inputs.rows() == data_.outputs.size(), "tabulated: input/output count mismatch");
    require(match_tolerance > 0.0, "tabulated: match tolerance must be positive");
    const double tol2 = tolerance_ * tolerance_;
    for (Eigen::Index i = 0; i < data_.inputs.rows(); ++i)
        for (Eigen::Index j = i + 1; j < data_.inputs.rows(); ++j)
            require((data_.inputs.row(i) - data_.inputs.row(j)).squaredNorm() > tol2,
                    "tabulated: rows " + std::to_string(i) + " and " + std::to_string(j) +
                        " coincide within the match tolerance");
    bounds_ = bounds ? *bounds : data_bounds(data_.inputs);
    require(bounds_.dimension() == data_.inputs.cols(), "tabulated: bounds dimension mismatch");
}

std::optional<Eigen::Index> TabulatedSystem::find(const Eigen::Ref<const Vector>& x) const {
    require(x.size() == dimension(), "tabulated: dimension mismatch");
    Eigen::Index best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < data_.inputs.rows(); ++i) {
        const double d2 = (data_.inputs.row(i).transpose() - x).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    if (best < 0 || best_d2 > tolerance_ * tolerance_) return std::nullopt;
    return best;
}

double TabulatedSystem::evaluate(const Eigen::Ref<const Vector>& x) const {
    const auto idx = find(x);
    if (!idx) throw NotInPool("tabulated: no stored input within tolerance of the query");
    return data_.outputs(*idx);
}

std::string TabulatedSystem::fingerprint() const {
    std::uint64_t h = fnv1a(data_.inputs.data(), sizeof(double) * data_.inputs.size());
    h = fnv1a(data_.outputs.data(), sizeof(double) * data_.outputs.size(), h);
    std::ostringstream os;
    os.precision(17);
    os << "tabulated n=" << size() << " d=" << dimension() << " tol=" << tolerance_ << " data=" << hex64(h)
       << " lo=" << bounds_.lower.transpose() << " hi=" << bounds_.upper.transpose();
    return os.str();
}

double tabulated_qoi(const Eigen::Ref<const Vector>& x, const TabulatedSystem& sys) { return sys.evaluate(x); }

}  // namespace xbed::systems
