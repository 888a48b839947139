#pragma once

// CSV and manifest input/output. Numbers are written in the shortest decimal
// form that round-trips to the same double.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "spex/asymptotics.hpp"
#include "spex/second_order.hpp"

namespace spex {

std::string format_double(double v);
double parse_double(const std::string& text);

/// `day,station_1..station_n` plus a `.meta` sidecar `model,alpha,beta,gamma,n,T,M,seed`.
void write_panel_csv(const std::filesystem::path& path, const DailyPanel& panel);
/// Reads the panel and, when present, its `.meta` sidecar.
DailyPanel read_panel_csv(const std::filesystem::path& path);
std::filesystem::path meta_path(const std::filesystem::path& panel_path);

/// `id,x,y` in scaled coordinates.
void write_stations_csv(const std::filesystem::path& path, const StationLayout& layout);
/// lambda_n is set to sqrt(n).
StationLayout read_stations_csv(const std::filesystem::path& path);

/// `alpha,beta,gamma,loglik,converged,evals,n_exceed`.
void write_fit_csv(const std::filesystem::path& path, const FitResult& fit);

/// `model,param,N,u,empirical_bias,ci_lo,ci_hi,theoretical_bias`.
void write_bias_curves(const std::filesystem::path& path, const std::vector<StudyReport>& reports);
/// `model,param,N,bias2,variance,mse`.
void write_mse_curves(const std::filesystem::path& path, const std::vector<StudyReport>& reports);
/// `model,N,h,theta_true,theta_theoretical,theta_fitted`.
void write_extcoef_layers(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, std::vector<ExtcoefRow>>>& layers);
/// `rho,t,x,y,gap_over_A,psi,gap_over_A_normalized`.
void write_second_order(const std::filesystem::path& path, const std::vector<SecondOrderEval>& evals);

using Manifest = std::vector<std::pair<std::string, std::string>>;
/// `key = value` lines, preceded by the library version.
void write_manifest(const std::filesystem::path& path, const Manifest& entries);

inline constexpr const char* kLibraryVersion = "spex 1.0.0";

}  // namespace spex
