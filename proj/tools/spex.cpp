// Command-line front end: simulate, fit, study, mse-sweep, extcoef, verify.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spex/asymptotics.hpp"
#include "spex/config.hpp"
#include "spex/error.hpp"
#include "spex/io.hpp"
#include "spex/parallel.hpp"
#include "spex/verify.hpp"

namespace fs = std::filesystem;
using namespace spex;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;

/// String-valued flags named after config keys; set flags override the file.
class KeyedFlags {
public:
    void add(CLI::App* app, const std::string& key, const std::string& help) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        options_[key] = app->add_option(flag, values_[key], help);
    }

    Settings merge(const std::string& config_path, const std::string& section) const {
        Settings settings = config_path.empty() ? Settings{} : load_settings(config_path, section);
        for (const auto& [key, opt] : options_)
            if (opt->count() > 0) settings[key] = values_.at(key);
        return settings;
    }

private:
    std::map<std::string, CLI::Option*> options_;
    std::map<std::string, std::string> values_;
};

double get_real(const Settings& s, const std::string& key, double fallback) {
    const auto it = s.find(key);
    if (it == s.end()) return fallback;
    try {
        return parse_double(it->second);
    } catch (const DataError&) {
        throw ConfigError("'" + key + "' expects a number, got '" + it->second + "'");
    }
}

std::uint64_t get_u64(const Settings& s, const std::string& key, std::uint64_t fallback) {
    const auto it = s.find(key);
    if (it == s.end()) return fallback;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(it->second, &used);
        if (used != it->second.size() || it->second.front() == '-') throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects a non-negative integer, got '" + it->second + "'");
    }
}

void reject_unknown(const Settings& s, const std::vector<std::string>& known) {
    for (const auto& [key, value] : s)
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown config key '" + key + "'");
}

Manifest manifest_from(const std::string& command, const Settings& settings) {
    Manifest m{{"command", command}, {"threads", std::to_string(default_threads())}};
    for (const auto& [k, v] : settings) m.emplace_back(k, v);
    return m;
}

int run_simulate(const Settings& s, const fs::path& out) {
    reject_unknown(s, {"model", "alpha", "beta", "gamma", "n", "days", "m", "seed", "layout_seed"});
    const std::string model = s.count("model") ? s.at("model") : "smith";
    if (model != "smith") throw ConfigError("simulate: only --model smith is supported");
    const SmithParams p{get_real(s, "alpha", 2.0), get_real(s, "beta", 0.0), get_real(s, "gamma", 3.0)};
    if (!p.positive_definite()) throw ConfigError("simulate: (alpha, beta, gamma) is not positive definite");
    const std::size_t n = get_u64(s, "n", 20);
    const std::size_t days = get_u64(s, "days", 1000);
    const std::size_t m = get_u64(s, "m", 100);
    const std::uint64_t seed = get_u64(s, "seed", 1);
    const std::uint64_t layout_seed = get_u64(s, "layout_seed", seed);

    const StationLayout layout = sample_stations(n, layout_seed);
    DailyPanel panel = simulate_daily_panel(layout, p, days, m, seed, 0);
    panel.model = model;
    write_panel_csv(out / "panel.csv", panel);
    write_stations_csv(out / "stations.csv", layout);

    Settings resolved = {{"model", model},
                         {"alpha", format_double(p.alpha)},
                         {"beta", format_double(p.beta)},
                         {"gamma", format_double(p.gamma)},
                         {"n", std::to_string(n)},
                         {"days", std::to_string(days)},
                         {"m", std::to_string(m)},
                         {"seed", std::to_string(seed)},
                         {"layout_seed", std::to_string(layout_seed)}};
    write_manifest(out / "manifest.txt", manifest_from("simulate", resolved));
    std::cout << "wrote " << (out / "panel.csv").string() << " (" << days << " x " << n << ")\n";
    return 0;
}

int run_fit(const Settings& s, const fs::path& out) {
    reject_unknown(s, {"panel", "stations", "threshold_quantile", "exceedances", "threshold",
                       "max_evals", "tol_f", "tol_x", "restarts", "jitter", "seed", "init_alpha",
                       "init_beta", "init_gamma"});
    if (!s.count("panel") || !s.count("stations"))
        throw ConfigError("fit: --panel and --stations are required");
    const int modes = static_cast<int>(s.count("threshold_quantile") + s.count("exceedances") +
                                       s.count("threshold"));
    if (modes > 1) throw ConfigError("fit: give at most one of --threshold-quantile, --exceedances, --threshold");
    ThresholdSpec threshold = ThresholdSpec::quantile(get_real(s, "threshold_quantile", 0.95));
    if (s.count("exceedances")) threshold = ThresholdSpec::exceedances(get_u64(s, "exceedances", 0));
    if (s.count("threshold")) threshold = ThresholdSpec::absolute(get_real(s, "threshold", 0.0));

    const DailyPanel panel = read_panel_csv(s.at("panel"));
    const StationLayout layout = read_stations_csv(s.at("stations"));
    if (layout.sites.size() != panel.stations())
        throw ConfigError("fit: station file and panel disagree on the number of stations");
    const PairTable pairs = pair_weights(layout);

    FitOptions options;
    options.max_evals = get_u64(s, "max_evals", options.max_evals);
    options.tol_f = get_real(s, "tol_f", options.tol_f);
    options.tol_x = get_real(s, "tol_x", options.tol_x);
    options.restarts = get_u64(s, "restarts", options.restarts);
    options.jitter = get_real(s, "jitter", options.jitter);
    options.seed = get_u64(s, "seed", 0);
    const int inits = static_cast<int>(s.count("init_alpha") + s.count("init_beta") + s.count("init_gamma"));
    if (inits != 0 && inits != 3) throw ConfigError("fit: give all of init_alpha, init_beta, init_gamma or none");
    if (inits == 3) {
        options.init = SmithParams{get_real(s, "init_alpha", 0), get_real(s, "init_beta", 0),
                                   get_real(s, "init_gamma", 0)};
        if (!options.init->positive_definite()) throw ConfigError("fit: initial Sigma is not positive definite");
    }

    const FitResult fit = fit_dependence(panel, CensoredConfig{threshold, &pairs}, options);
    write_fit_csv(out, fit);
    Settings resolved = s;
    resolved["u"] = format_double(fit.u);
    resolved["max_evals"] = std::to_string(options.max_evals);
    resolved["tol_f"] = format_double(options.tol_f);
    resolved["tol_x"] = format_double(options.tol_x);
    resolved["restarts"] = std::to_string(options.restarts);
    write_manifest(out.parent_path() / "manifest.txt", manifest_from("fit", resolved));
    std::cout << "alpha,beta,gamma,loglik,converged,evals,n_exceed\n"
              << format_double(fit.theta_hat.alpha) << ',' << format_double(fit.theta_hat.beta) << ','
              << format_double(fit.theta_hat.gamma) << ',' << format_double(fit.loglik_at_opt) << ','
              << (fit.converged ? "true" : "false") << ',' << fit.evals << ',' << fit.n_exceed << '\n';
    return 0;
}

void print_argmins(const StudyReport& report) {
    std::cout << "model " << report.model << ": argmin N alpha=" << report.argmin[0]
              << " beta=" << report.argmin[1] << " gamma=" << report.argmin[2]
              << " pooled=" << report.pooled_argmin << " (quantile "
              << format_double(report.pooled_argmin_quantile) << ")\n";
}

int run_study(const std::string& command, const Settings& s, const fs::path& out) {
    const StudyConfig study = study_config_from(s);
    Manifest manifest{{"command", command}, {"threads", std::to_string(default_threads())}};
    for (auto& kv : describe(study)) manifest.push_back(kv);

    std::cerr << command << ": Monte Carlo moments over " << study.mc_panels << " panels\n";
    const auto theory = theoretical_bias_variance(study.theta0, study);
    for (const auto& tp : theory)
        if (tp.degenerate) std::cerr << "warning: H is not positive definite at N=" << tp.N << '\n';

    std::vector<EmpiricalPoint> empirical;
    if (command != "mse-sweep") {
        std::cerr << command << ": " << study.replications << " replications x "
                  << study.exceedance_grid.size() << " thresholds\n";
        empirical = empirical_bias(study.theta0, study);
        for (const auto& ep : empirical)
            if (ep.flagged)
                std::cerr << "warning: " << ep.unconverged << " unconverged fits at N=" << ep.N << '\n';
    }
    const StudyReport report = mse_sweep(study, theory, empirical);
    print_argmins(report);
    manifest.emplace_back("pooled_argmin", std::to_string(report.pooled_argmin));

    if (command == "study" || command == "mse-sweep") {
        write_mse_curves(out / "mse_curves.csv", {report});
        manifest.emplace_back("output", "mse_curves.csv");
    }
    if (command == "study") {
        write_bias_curves(out / "bias_curves.csv", {report});
        manifest.emplace_back("output", "bias_curves.csv");
    }
    if (command == "study" || command == "extcoef") {
        write_extcoef_layers(out / "extcoef_layers.csv",
                             {{study.model, extremal_coefficient_layers(study, theory, empirical)}});
        manifest.emplace_back("output", "extcoef_layers.csv");
    }
    write_manifest(out / "manifest.txt", manifest);
    for (const auto& tp : theory)
        if (tp.degenerate) return kExitDegenerate;
    return 0;
}

int run_verify(const std::string& suite, const fs::path& out) {
    const auto rows = verify_suite(suite);
    fs::create_directories(out);
    const fs::path path = out / ("verify_" + suite + ".csv");
    {
        std::ofstream csv(path);
        if (!csv) throw ConfigError("cannot write " + path.string());
        csv << "suite,check,value,reference,error,tolerance,pass\n";
        for (const auto& r : rows)
            csv << r.suite << ",\"" << r.name << "\"," << format_double(r.value) << ','
                << format_double(r.reference) << ',' << format_double(r.error) << ','
                << format_double(r.tolerance) << ',' << (r.pass ? "pass" : "FAIL") << '\n';
    }
    std::size_t failed = 0;
    for (const auto& r : rows)
        if (!r.pass) {
            ++failed;
            std::cout << "FAIL " << r.name << ": value " << format_double(r.value) << ", error "
                      << format_double(r.error) << " > " << format_double(r.tolerance) << '\n';
        }
    std::cout << suite << ": " << (rows.size() - failed) << "/" << rows.size() << " checks passed\n";
    write_manifest(out / "manifest.txt", {{"command", "verify"}, {"suite", suite},
                                          {"output", path.filename().string()}});
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold-censored pairwise composite likelihood for max-stable processes"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = available cores)");

    std::string config_path;
    std::string out;

    auto* simulate = app.add_subcommand("simulate", "Simulate a daily Smith panel");
    KeyedFlags sim_flags;
    simulate->add_option("--config", config_path, "Config file ([simulate] section)");
    simulate->add_option("--out", out, "Output directory")->required();
    for (const char* key : {"model", "alpha", "beta", "gamma", "n", "days", "m", "seed", "layout_seed"})
        sim_flags.add(simulate, key, "");

    auto* fit = app.add_subcommand("fit", "Fit (alpha, beta, gamma) to a panel");
    KeyedFlags fit_flags;
    fit->add_option("--config", config_path, "Config file ([fit] section)");
    fit->add_option("--out", out, "Output CSV")->required();
    for (const char* key : {"panel", "stations", "threshold_quantile", "exceedances", "threshold",
                            "max_evals", "tol_f", "tol_x", "restarts", "jitter", "seed", "init_alpha",
                            "init_beta", "init_gamma"})
        fit_flags.add(fit, key, "");

    std::map<std::string, KeyedFlags> study_flags;
    for (const char* name : {"study", "mse-sweep", "extcoef"}) {
        auto* sub = app.add_subcommand(name, std::string("Simulation study: ") + name);
        sub->add_option("--config", config_path, std::string("Config file ([") + name + "] section)");
        sub->add_option("--out", out, "Output directory")->required();
        for (const char* key : {"model", "alpha", "beta", "gamma", "n", "days", "m", "replications",
                                "grid", "layout_seed", "seed", "mc_panels", "max_evals", "tol_f",
                                "tol_x", "restarts", "jitter"})
            study_flags[name].add(sub, key, "");
    }

    auto* verify = app.add_subcommand("verify", "Run a numerical verification suite");
    std::string suite;
    verify->add_option("--suite", suite, "margins|maxstable|appendix-a|appendix-b")
        ->required()
        ->check(CLI::IsMember({"margins", "maxstable", "appendix-a", "appendix-b"}));
    verify->add_option("--out", out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        set_default_threads(threads);
        if (simulate->parsed()) return run_simulate(sim_flags.merge(config_path, "simulate"), out);
        if (fit->parsed()) return run_fit(fit_flags.merge(config_path, "fit"), out);
        if (verify->parsed()) return run_verify(suite, out);
        for (auto& [name, flags] : study_flags)
            if (app.get_subcommand(name)->parsed())
                return run_study(name, flags.merge(config_path, name), out);
    } catch (const DegenerateError& e) {
        std::cerr << "numerical degeneracy: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitConfig;
}
