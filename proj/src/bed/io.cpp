#include "xbed/bed/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace xbed::bed {

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw InvalidArgument("cannot write " + tmp.string());
        out << text;
        if (!text.empty() && text.back() != '\n') out << '\n';
        if (!out) throw InvalidArgument("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_log_csv(const std::filesystem::path& path, const ExperimentLog& log) {
    std::ostringstream os;
    os << "iteration,n_samples,error,wall_time_s,batch_size,fit_seed,retried,short_batch,failures,off_grid,nonfinite\n";
    for (const auto& r : log.records)
        os << r.iteration << ',' << r.n_samples << ',' << format_double(r.error) << ',' << format_double(r.wall_time) << ','
           << r.batch.rows() << ',' << r.fit_seed << ',' << int(r.retried) << ',' << int(r.short_batch) << ',' << r.failures
           << ',' << r.off_grid << ',' << r.nonfinite << '\n';
    write_text_atomic(path, os.str());
}

void write_samples_csv(const std::filesystem::path& path, const ExperimentLog& log) {
    std::ostringstream os;
    os << "iteration";
    for (Eigen::Index d = 0; d < log.inputs.cols(); ++d) os << ",x" << d;
    os << ",qoi\n";
    for (const auto& r : log.records)
        for (Eigen::Index i = 0; i < r.batch.rows(); ++i) {
            os << r.iteration;
            for (Eigen::Index d = 0; d < r.batch.cols(); ++d) os << ',' << format_double(r.batch(i, d));
            os << ',' << format_double(r.batch_qoi(i)) << '\n';
        }
    write_text_atomic(path, os.str());
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw InvalidArgument("table has no column '" + name + "'");
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    Table t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string field;
        std::istringstream is(s);
        while (std::getline(is, field, ',')) out.push_back(field);
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    if (!std::getline(in, line)) throw InvalidArgument(path.string() + ": empty file");
    t.columns = split(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != t.columns.size())
            throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(t.columns.size()) + " fields");
        std::vector<double> row;
        for (const auto& f : fields) {
            if (f.empty() || f == "nan") {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            try {
                std::size_t used = 0;
                row.push_back(std::stod(f, &used));
                if (used != f.size()) throw std::invalid_argument(f);
            } catch (const std::exception&) {
                throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": not a number '" + f + "'");
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace xbed::bed
