#include "tracetails/gamma.hpp"

#include "tracetails/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tracetails {

GammaParams::GammaParams(double shape_, double rate_) : shape(shape_), rate(rate_) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw std::invalid_argument("GammaParams: shape must be positive and finite");
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("GammaParams: rate must be positive and finite");
    }
}

namespace detail {

double log1pmx(double t) {
    if (std::fabs(t) < 0.5) {
        // Series -t^2/2 + t^3/3 - ..., summed to machine precision.
        double term = t;
        double sum = 0.0;
        for (int k = 2; k < 64; ++k) {
            term *= -t;
            double add = term / k;
            sum += add;
            if (std::fabs(add) < 1e-18 * (std::fabs(sum) + 1e-300)) break;
        }
        return sum;
    }
    return std::log1p(t) - t;
}

namespace {

// lgamma(a) - [(a - 0.5)*log(a) - a + 0.5*log(2*pi)], the Stirling error.
double stirling_error(double a) {
    if (a < 16.0) {
        return std::lgamma(a) - ((a - 0.5) * std::log(a) - a + 0.5 * std::log(2.0 * M_PI));
    }
    const double x2 = 1.0 / (a * a);
    // Asymptotic series 1/(12a) - 1/(360a^3) + 1/(1260a^5) - 1/(1680a^7).
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - x2 / 1680.0) * x2) * x2) / a;
}

} // namespace

double gamma_log_kernel(double shape, double rate_x) {
    // shape*log(rate_x) - rate_x - lgamma(shape), stable for shape up to 1e6.
    if (rate_x <= 0.0) return -std::numeric_limits<double>::infinity();
    if (shape < 16.0) {
        return shape * std::log(rate_x) - rate_x - std::lgamma(shape);
    }
    const double t = (rate_x - shape) / shape;
    return shape * log1pmx(t) + 0.5 * std::log(shape / (2.0 * M_PI)) - stirling_error(shape);
}

namespace {

constexpr double kIncGammaEps = 1e-16;
constexpr int kIncGammaMaxIter = 4000000;

// Lower series: P(a,x) = kernel * sum_{k>=0} x^k / (a(a+1)...(a+k)).
double lower_series(double a, double x, double log_kernel) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < kIncGammaMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kIncGammaEps) {
            return sum * std::exp(log_kernel);
        }
    }
    throw std::runtime_error("reg_lower_gamma: series did not converge");
}

// Upper continued fraction (modified Lentz): Q(a,x) = kernel * cf.
double upper_cf(double a, double x, double log_kernel) {
    const double fpmin = std::numeric_limits<double>::min() / kIncGammaEps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kIncGammaMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kIncGammaEps) {
            return h * std::exp(log_kernel);
        }
    }
    throw std::runtime_error("reg_upper_gamma: continued fraction did not converge");
}

} // namespace

double reg_lower_gamma(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double lk = gamma_log_kernel(a, x);
    if (x < a + 1.0) return lower_series(a, x, lk);
    return 1.0 - upper_cf(a, x, lk);
}

double reg_upper_gamma(double a, double x) {
    if (x <= 0.0) return 1.0;
    const double lk = gamma_log_kernel(a, x);
    if (x < a + 1.0) return 1.0 - lower_series(a, x, lk);
    return upper_cf(a, x, lk);
}

} // namespace detail

double gamma_pdf(const GammaParams& p, double x) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) {
        if (p.shape < 1.0) {
            throw std::domain_error("gamma_pdf: density has a pole at x = 0 for shape < 1");
        }
        return p.shape == 1.0 ? p.rate : 0.0;
    }
    return std::exp(detail::gamma_log_kernel(p.shape, p.rate * x)) / x;
}

double gamma_cdf(const GammaParams& p, double x) {
    if (x <= 0.0) return 0.0;
    return detail::reg_lower_gamma(p.shape, p.rate * x);
}

std::pair<double, double> gamma_mean_var(const GammaParams& p) {
    return {p.shape / p.rate, p.shape / (p.rate * p.rate)};
}

double gamma_mode(const GammaParams& p) {
    return p.shape >= 1.0 ? (p.shape - 1.0) / p.rate : 0.0;
}

std::pair<std::optional<double>, std::optional<double>>
gamma_inflection_points(const GammaParams& p) {
    // Roots of (bx)^2 - 2(a-1)(bx) + (a-1)(a-2); only roots strictly inside
    // the support count.
    const double a = p.shape;
    if (a <= 1.0) return {std::nullopt, std::nullopt};
    const double s = std::sqrt(a - 1.0);
    const double upper = (a - 1.0 + s) / p.rate;
    if (a <= 2.0) return {std::nullopt, upper};
    return {(a - 1.0 - s) / p.rate, upper};
}

GammaParams gamma_scale(const GammaParams& p, double c) {
    if (!(c > 0.0)) {
        throw std::invalid_argument("gamma_scale: factor must be positive");
    }
    return GammaParams(p.shape, p.rate / c);
}

std::vector<double> gamma_sample(const GammaParams& p, std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = rng.gamma(p.shape, p.rate, /*stream=*/0, /*index=*/i);
    }
    return out;
}

} // namespace tracetails
