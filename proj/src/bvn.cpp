#include "spex/bvn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>

#include "spex/error.hpp"
#include "spex/margins.hpp"

namespace spex {

namespace {

constexpr std::array<double, 3> kW6 = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr std::array<double, 3> kX6 = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
constexpr std::array<double, 6> kW12 = {0.04717533638651177, 0.1069393259953183,
                                        0.1600783285433464,  0.2031674267230659,
                                        0.2334925365383547,  0.2491470458134029};
constexpr std::array<double, 6> kX12 = {0.9815606342467191, 0.9041172563704750,
                                        0.7699026741943050, 0.5873179542866171,
                                        0.3678314989981802, 0.1252334085114692};
constexpr std::array<double, 10> kW20 = {
    0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
    0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183821,
    0.1491729864726037,  0.1527533871307259};
constexpr std::array<double, 10> kX20 = {
    0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
    0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154196,
    0.2277858511416451, 0.07652652113349733};

double sf(double x) { return std_normal_sf(x); }

/// Upper orthant P(X > h, Y > k) for finite h, k and 0 < |r| < 1.
double upper_orthant(double h, double k, double r) {
    constexpr double tp = 2.0 * std::numbers::pi;
    std::span<const double> w, x;
    if (std::abs(r) < 0.3) {
        w = kW6;
        x = kX6;
    } else if (std::abs(r) < 0.75) {
        w = kW12;
        x = kX12;
    } else {
        w = kW20;
        x = kX20;
    }
    double hk = h * k;
    double bvn = 0.0;
    if (std::abs(r) < 0.925) {
        const double hs = 0.5 * (h * h + k * k);
        const double asr = 0.5 * std::asin(r);
        for (std::size_t i = 0; i < w.size(); ++i) {
            for (double node : {1.0 - x[i], 1.0 + x[i]}) {
                const double sn = std::sin(asr * node);
                bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        return bvn * asr / tp + sf(h) * sf(k);
    }
    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    const double as = 1.0 - r * r;
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 80.0;
    double asr = -0.5 * (bs / as + hk);
    if (asr > -100.0)
        bvn = a * std::exp(asr) * (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
    if (hk > -100.0) {
        const double b = std::sqrt(bs);
        const double sp = std::sqrt(tp) * sf(b / a);
        bvn -= std::exp(-0.5 * hk) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
    }
    a *= 0.5;
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (double node : {1.0 - x[i], 1.0 + x[i]}) {
            const double xs = (a * node) * (a * node);
            const double asr_i = -0.5 * (bs / xs + hk);
            if (asr_i <= -100.0) continue;
            const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
            const double rs = std::sqrt(1.0 - xs);
            const double ep = std::exp(-0.5 * hk * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
            sum += w[i] * std::exp(asr_i) * (sp - ep);
        }
    }
    bvn = (a * sum - bvn) / tp;
    if (r > 0.0) return bvn + sf(std::max(h, k));
    if (h >= k) return -bvn;
    const double L = h < 0.0 ? std_normal_cdf_unclamped(k) - std_normal_cdf_unclamped(h)
                             : sf(h) - sf(k);
    return L - bvn;
}

}  // namespace

double bvn_upper(double x, double y, double rho) {
    if (std::isnan(x) || std::isnan(y)) throw DomainError("bvn_upper: NaN argument");
    if (!(std::abs(rho) < 1.0)) throw ParameterError("bivariate normal requires |rho| < 1");
    if (x == INFINITY || y == INFINITY) return 0.0;
    if (x == -INFINITY) return y == -INFINITY ? 1.0 : sf(y);
    if (y == -INFINITY) return sf(x);
    if (rho == 0.0) return sf(x) * sf(y);
    return std::clamp(upper_orthant(x, y, rho), 0.0, 1.0);
}

double bvn_cdf(double x, double y, double rho) { return bvn_upper(-x, -y, rho); }

}  // namespace spex
