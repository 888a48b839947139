#include "spex/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spex/error.hpp"

namespace spex {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options) {
    if (x0.empty()) throw ConfigError("nelder_mead: empty starting point");
    if (!(options.tol_f > 0.0) || !(options.tol_x > 0.0))
        throw ConfigError("nelder_mead: tolerances must be > 0");
    const std::size_t dim = x0.size();
    NelderMeadResult result;

    auto eval = [&](const std::vector<double>& x) {
        ++result.evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(dim + 1, x0);
    std::vector<double> values(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += options.initial_step;
    for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);
    auto point = [&](double coef, const std::vector<double>& worst, std::vector<double>& out) {
        for (std::size_t k = 0; k < dim; ++k) out[k] = centroid[k] + coef * (worst[k] - centroid[k]);
    };

    for (;;) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[dim - 1];

        double spread_f = 0.0;
        double spread_x = 0.0;
        for (std::size_t i = 0; i <= dim; ++i) {
            spread_f = std::max(spread_f, std::abs(values[i] - values[best]));
            for (std::size_t k = 0; k < dim; ++k)
                spread_x = std::max(spread_x, std::abs(simplex[i][k] - simplex[best][k]));
        }
        if (std::isfinite(values[best]) && spread_f < options.tol_f && spread_x < options.tol_x) {
            result.converged = true;
            break;
        }
        if (result.evals >= options.max_evals) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        point(-1.0, simplex[worst], trial);
        const double f_reflect = eval(trial);
        if (f_reflect < values[best]) {
            point(-2.0, simplex[worst], trial2);
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                values[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                values[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = f_reflect;
            continue;
        }
        const bool outside = f_reflect < values[worst];
        point(outside ? -0.5 : 0.5, simplex[worst], trial2);
        const double f_contract = eval(trial2);
        if (f_contract < (outside ? f_reflect : values[worst])) {
            simplex[worst] = trial2;
            values[worst] = f_contract;
            continue;
        }
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < dim; ++k)
                simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
            values[i] = eval(simplex[i]);
        }
    }

    const auto best_it = std::min_element(values.begin(), values.end());
    const std::size_t best = static_cast<std::size_t>(best_it - values.begin());
    result.x = simplex[best];
    result.f = values[best];
    return result;
}

}  // namespace spex
