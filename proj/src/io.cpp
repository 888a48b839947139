#include "spex/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spex/error.hpp"

namespace spex {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        fields.push_back(field);
    }
    return fields;
}

std::size_t parse_size(const std::string& text) {
    std::size_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw DataError("not a non-negative integer: '" + text + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& text) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw DataError("not an unsigned integer: '" + text + "'");
    return v;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    if (text == "nan") return std::nan("");
    if (text == "inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    double v = 0.0;
    const char* begin = text.data();
    if (!text.empty() && text.front() == '+') ++begin;
    const auto res = std::from_chars(begin, text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
        throw DataError("not a number: '" + text + "'");
    return v;
}

std::filesystem::path meta_path(const std::filesystem::path& panel_path) {
    std::filesystem::path p = panel_path;
    p.replace_extension(".meta");
    return p;
}

void write_panel_csv(const std::filesystem::path& path, const DailyPanel& panel) {
    auto out = open_out(path);
    out << "day";
    for (std::size_t j = 0; j < panel.stations(); ++j) out << ",station_" << (j + 1);
    out << '\n';
    for (std::size_t t = 0; t < panel.days(); ++t) {
        out << (t + 1);
        for (std::size_t j = 0; j < panel.stations(); ++j)
            out << ',' << format_double(panel.data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)));
        out << '\n';
    }
    auto meta = open_out(meta_path(path));
    meta << "model,alpha,beta,gamma,n,T,M,seed\n"
         << panel.model << ',' << format_double(panel.params.alpha) << ','
         << format_double(panel.params.beta) << ',' << format_double(panel.params.gamma) << ','
         << panel.stations() << ',' << panel.days() << ',' << panel.days_per_year << ','
         << panel.seed << '\n';
}

DailyPanel read_panel_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty panel file");
    const auto header = split_csv(line);
    if (header.size() < 2 || header[0] != "day") throw DataError(path.string() + ": bad panel header");
    const std::size_t n = header.size() - 1;
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv(line);
        if (fields.size() != n + 1)
            throw DataError(path.string() + ": row " + std::to_string(rows + 1) + " has wrong width");
        for (std::size_t j = 1; j <= n; ++j) {
            const double v = parse_double(fields[j]);
            if (!(v > 0.0) || !std::isfinite(v))
                throw DataError(path.string() + ": panel entries must be finite and > 0");
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw DataError(path.string() + ": panel has no rows");
    DailyPanel panel;
    panel.data = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(rows),
                                    static_cast<Eigen::Index>(n));
    const auto meta = meta_path(path);
    if (std::filesystem::exists(meta)) {
        auto min = open_in(meta);
        std::string head, row;
        std::getline(min, head);
        std::getline(min, row);
        const auto f = split_csv(row);
        if (split_csv(head).size() != 8 || f.size() != 8) throw DataError(meta.string() + ": bad metadata");
        panel.model = f[0];
        panel.params = {parse_double(f[1]), parse_double(f[2]), parse_double(f[3])};
        if (parse_size(f[4]) != n || parse_size(f[5]) != rows)
            throw DataError(meta.string() + ": metadata does not match the panel shape");
        panel.days_per_year = parse_size(f[6]);
        panel.seed = parse_u64(f[7]);
    }
    return panel;
}

void write_stations_csv(const std::filesystem::path& path, const StationLayout& layout) {
    auto out = open_out(path);
    out << "id,x,y\n";
    for (std::size_t i = 0; i < layout.sites.size(); ++i)
        out << (i + 1) << ',' << format_double(layout.sites[i][0]) << ','
            << format_double(layout.sites[i][1]) << '\n';
}

StationLayout read_stations_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"id", "x", "y"})
        throw DataError(path.string() + ": expected header id,x,y");
    std::vector<Vec2> sites;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 3) throw DataError(path.string() + ": bad station row");
        sites.push_back({parse_double(f[1]), parse_double(f[2])});
    }
    const double lambda = std::sqrt(static_cast<double>(sites.size()));
    return layout_from_sites(std::move(sites), lambda);
}

void write_fit_csv(const std::filesystem::path& path, const FitResult& fit) {
    auto out = open_out(path);
    out << "alpha,beta,gamma,loglik,converged,evals,n_exceed\n"
        << format_double(fit.theta_hat.alpha) << ',' << format_double(fit.theta_hat.beta) << ','
        << format_double(fit.theta_hat.gamma) << ',' << format_double(fit.loglik_at_opt) << ','
        << (fit.converged ? "true" : "false") << ',' << fit.evals << ',' << fit.n_exceed << '\n';
}

void write_bias_curves(const std::filesystem::path& path, const std::vector<StudyReport>& reports) {
    auto out = open_out(path);
    out << "model,param,N,u,empirical_bias,ci_lo,ci_hi,theoretical_bias\n";
    for (const auto& rep : reports)
        for (const auto& r : rep.rows)
            out << rep.model << ',' << r.param << ',' << r.N << ',' << format_double(r.u) << ','
                << format_double(r.empirical_bias) << ',' << format_double(r.ci_lo) << ','
                << format_double(r.ci_hi) << ',' << format_double(r.theoretical_bias) << '\n';
}

void write_mse_curves(const std::filesystem::path& path, const std::vector<StudyReport>& reports) {
    auto out = open_out(path);
    out << "model,param,N,bias2,variance,mse\n";
    for (const auto& rep : reports)
        for (const auto& r : rep.rows)
            out << rep.model << ',' << r.param << ',' << r.N << ',' << format_double(r.bias2) << ','
                << format_double(r.variance) << ',' << format_double(r.mse) << '\n';
}

void write_extcoef_layers(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, std::vector<ExtcoefRow>>>& layers) {
    auto out = open_out(path);
    out << "model,N,h,theta_true,theta_theoretical,theta_fitted\n";
    for (const auto& [model, rows] : layers)
        for (const auto& r : rows)
            out << model << ',' << r.N << ',' << format_double(r.h) << ','
                << format_double(r.theta_true) << ',' << format_double(r.theta_theoretical) << ','
                << format_double(r.theta_fitted) << '\n';
}

void write_second_order(const std::filesystem::path& path, const std::vector<SecondOrderEval>& evals) {
    auto out = open_out(path);
    out << "rho,t,x,y,gap_over_A,psi,gap_over_A_normalized\n";
    for (const auto& e : evals)
        for (const auto& p : e.points)
            out << format_double(e.rho) << ',' << format_double(e.t) << ',' << format_double(p.x)
                << ',' << format_double(p.y) << ',' << format_double(p.gap_over_A) << ','
                << format_double(p.psi) << ',' << format_double(p.gap_over_A_normalized) << '\n';
}

void write_manifest(const std::filesystem::path& path, const Manifest& entries) {
    auto out = open_out(path);
    out << "library = " << kLibraryVersion << '\n';
    for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
}

}  // namespace spex
