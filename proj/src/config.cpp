#include "spex/config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "spex/error.hpp"
#include "spex/io.hpp"

namespace spex {

namespace {

template <typename T>
T parse_integer(const std::string& key, const std::string& text) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
    return v;
}

double parse_real(const std::string& key, const std::string& text) {
    try {
        return parse_double(text);
    } catch (const DataError&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
    }
}

std::string join(const std::vector<std::size_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
    return out;
}

}  // namespace

Settings load_settings(const std::filesystem::path& path, const std::string& section) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("cannot read config " + path.string() + ": " + e.message());
    }
    Settings settings;
    for (const auto& [key, node] : tree)
        if (node.empty()) settings[key] = node.data();
    if (const auto child = tree.get_child_optional(section))
        for (const auto& [key, node] : *child) settings[key] = node.data();
    return settings;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ConfigError("empty entry in list '" + text + "'");
        out.push_back(parse_integer<std::size_t>("grid", item.substr(b, e - b + 1)));
    }
    return out;
}

StudyConfig study_config_from(const Settings& settings) {
    static const std::set<std::string> known = {
        "model",     "alpha",    "beta",      "gamma", "n",     "days",     "m",
        "replications", "grid",  "layout_seed", "seed", "mc_panels", "max_evals", "tol_f",
        "tol_x",     "restarts", "jitter",    "threads"};
    StudyConfig s;
    for (const auto& [key, value] : settings) {
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
        if (key == "model") s.model = value;
        else if (key == "alpha") s.theta0.alpha = parse_real(key, value);
        else if (key == "beta") s.theta0.beta = parse_real(key, value);
        else if (key == "gamma") s.theta0.gamma = parse_real(key, value);
        else if (key == "n") s.n = parse_integer<std::size_t>(key, value);
        else if (key == "days") s.days = parse_integer<std::size_t>(key, value);
        else if (key == "m") s.days_per_year = parse_integer<std::size_t>(key, value);
        else if (key == "replications") s.replications = parse_integer<std::size_t>(key, value);
        else if (key == "grid") s.exceedance_grid = parse_size_list(value);
        else if (key == "layout_seed") s.layout_seed = parse_integer<std::uint64_t>(key, value);
        else if (key == "seed") s.seed = parse_integer<std::uint64_t>(key, value);
        else if (key == "mc_panels") s.mc_panels = parse_integer<std::size_t>(key, value);
        else if (key == "max_evals") s.fit.max_evals = parse_integer<std::size_t>(key, value);
        else if (key == "tol_f") s.fit.tol_f = parse_real(key, value);
        else if (key == "tol_x") s.fit.tol_x = parse_real(key, value);
        else if (key == "restarts") s.fit.restarts = parse_integer<std::size_t>(key, value);
        else if (key == "jitter") s.fit.jitter = parse_real(key, value);
        else if (key == "threads") s.threads = parse_integer<unsigned>(key, value);
    }
    if (!s.theta0.positive_definite())
        throw ConfigError("config: (alpha, beta, gamma) is not positive definite");
    s.validate();
    return s;
}

std::vector<std::pair<std::string, std::string>> describe(const StudyConfig& s) {
    return {{"model", s.model},
            {"alpha", format_double(s.theta0.alpha)},
            {"beta", format_double(s.theta0.beta)},
            {"gamma", format_double(s.theta0.gamma)},
            {"n", std::to_string(s.n)},
            {"days", std::to_string(s.days)},
            {"m", std::to_string(s.days_per_year)},
            {"replications", std::to_string(s.replications)},
            {"grid", join(s.exceedance_grid)},
            {"layout_seed", std::to_string(s.layout_seed)},
            {"seed", std::to_string(s.seed)},
            {"mc_panels", std::to_string(s.mc_panels)},
            {"max_evals", std::to_string(s.fit.max_evals)},
            {"tol_f", format_double(s.fit.tol_f)},
            {"tol_x", format_double(s.fit.tol_x)},
            {"restarts", std::to_string(s.fit.restarts)},
            {"jitter", format_double(s.fit.jitter)}};
}

}  // namespace spex
