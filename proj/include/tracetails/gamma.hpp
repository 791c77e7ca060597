#ifndef TRACETAILS_GAMMA_HPP
#define TRACETAILS_GAMMA_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace tracetails {

/// A single Gamma distribution parameterized by shape and rate.
struct GammaParams {
    double shape; // alpha > 0
    double rate;  // beta > 0

    GammaParams(double shape_, double rate_);

    double mean() const { return shape / rate; }
    double variance() const { return shape / (rate * rate); }
};

/// Density at x. Zero for x < 0. At x = 0 the value is rate for shape 1,
/// zero for shape > 1, and a pole error for shape < 1.
double gamma_pdf(const GammaParams& p, double x);

/// Regularized lower incomplete gamma P(shape, rate*x); 0 for x < 0.
double gamma_cdf(const GammaParams& p, double x);

/// (mean, variance) = (shape/rate, shape/rate^2).
std::pair<double, double> gamma_mean_var(const GammaParams& p);

/// Mode of the density: (shape-1)/rate for shape >= 1, else 0.
double gamma_mode(const GammaParams& p);

/// Interior inflection points of the density, ascending. Roots on the
/// support boundary are dropped: both exist only for shape > 2, only the
/// upper one for 1 < shape <= 2, none otherwise.
std::pair<std::optional<double>, std::optional<double>>
gamma_inflection_points(const GammaParams& p);

/// Distribution of c*X: (shape, rate/c). Requires c > 0.
GammaParams gamma_scale(const GammaParams& p, double c);

/// n i.i.d. draws; draw i depends only on (seed, i), not on batching.
std::vector<double> gamma_sample(const GammaParams& p, std::size_t n, std::uint64_t seed);

namespace detail {

// log(1+t) - t, accurate for small |t|.
double log1pmx(double t);

// Exponent of the gamma density prefactor: shape*log(rate*x) - rate*x
// - lgamma(shape), evaluated without cancellation for large shape.
double gamma_log_kernel(double shape, double rate_x);

// Regularized lower/upper incomplete gamma pair, absolute accuracy ~1e-14.
double reg_lower_gamma(double a, double x);
double reg_upper_gamma(double a, double x);

} // namespace detail

} // namespace tracetails

#endif
