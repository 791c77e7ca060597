#ifndef TRACETAILS_GAMMA_MIX_HPP
#define TRACETAILS_GAMMA_MIX_HPP

#include "tracetails/gamma.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace tracetails {

/// Weighted sum of i.i.d. Gamma(shape, rate) variables: sum_i weights[i]*X_i.
/// Weights may be negative or zero; the all-zero mix is a point mass at 0.
struct GammaMix {
    std::vector<double> weights;
    double shape;
    double rate;

    GammaMix(std::vector<double> weights_, double shape_, double rate_);
};

/// Linear combination with per-term shape and rate. Hosts perturbed sums
/// whose extra terms have shape 1.
struct GammaSumTerm {
    double weight;
    double shape;
    double rate;
};

struct GeneralGammaSum {
    std::vector<GammaSumTerm> terms;

    explicit GeneralGammaSum(std::vector<GammaSumTerm> terms_);
    GeneralGammaSum(const GammaMix& mix); // NOLINT: intentional conversion
};

double mix_mean(const GeneralGammaSum& q);
double mix_variance(const GeneralGammaSum& q);

/// max_i |weight_i| / rate_i; the distribution's scale.
double mix_scale(const GeneralGammaSum& q);

/// shape * sum(weights) / max(weights); requires nonnegative weights with at
/// least one positive entry.
double effective_shape(const GammaMix& q);

/// Exact law of the m-sample Gaussian trace estimator on a spectrum:
/// weights = eigenvalues, shape = rate = m/2.
GammaMix trace_estimator_law(const std::vector<double>& spectrum, std::uint64_t m);

/// Infinite divisibility: same distribution with each weight repeated T
/// times at shape/T.
GammaMix divide(const GammaMix& q, std::uint64_t T);

/// Characteristic function E[exp(iuQ)] via summed principal-branch logs.
std::complex<double> mix_cf(const GeneralGammaSum& q, double u);

/// CDF by Gil-Pelaez inversion; closed form when the sum collapses to a
/// single Gamma. Absolute accuracy target 1e-8.
double mix_cdf(const GeneralGammaSum& q, double x);

/// Density (derivative_order 0) or its first/second derivative by Fourier
/// inversion; closed form on collapse.
double mix_pdf(const GeneralGammaSum& q, double x, int derivative_order = 0);

/// n i.i.d. draws of the sum; draw i is a pure function of (seed, i).
std::vector<double> mix_sample(const GeneralGammaSum& q, std::size_t n, std::uint64_t seed);

/// Thrown when an inversion integral cannot reach its accuracy target
/// (degenerate mix, insufficient total shape, or runaway truncation).
class mix_evaluation_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Reusable inversion evaluator. Builds one quadrature table for a fixed
/// derivative order and an x-range, then evaluates pointwise or on uniform
/// grids in O(nodes) per point. order -1 selects the CDF.
class MixEvaluator {
  public:
    MixEvaluator(const GeneralGammaSum& q, int order, double x_abs_max, double abs_tol);

    double operator()(double x) const;
    std::vector<double> eval_grid(double x0, double dx, std::size_t n) const;

    double mean() const { return mean_; }
    double stddev() const { return sd_; }
    std::size_t node_count() const { return nodes_u_.size(); }

  private:
    double eval_numeric(double x) const;
    std::complex<double> tail_integral(double x) const;

    int order_;
    double mean_ = 0.0;
    double sd_ = 0.0;
    // Collapsed path.
    bool collapsed_ = false;
    double collapse_sign_ = 1.0;
    std::optional<GammaParams> collapse_params_;
    // Support shortcut: +1 all-positive weights, -1 all-negative, 0 mixed.
    int support_sign_ = 0;
    // Quadrature table.
    std::vector<double> nodes_u_;
    std::vector<std::complex<double>> coeff_; // weight * cf(u) * u^order
    // Analytic tail beyond nodes (empty when pure quadrature suffices).
    bool has_tail_ = false;
    double tail_u_ = 0.0;
    double total_shape_ = 0.0;
    std::complex<double> tail_base_, tail_c1_, tail_c2_;
};

namespace detail {

// When all active terms share the same signed scale weight/rate, the sum is
// sign * Gamma(total shape, 1/|scale|). Returns (sign, params) or nullopt.
std::optional<std::pair<double, GammaParams>> collapse_to_gamma(const GeneralGammaSum& q);

// Generalized exponential integral E_p(z) = int_1^inf t^-p exp(-z t) dt for
// real p and complex z with Re(z) >= 0.
std::complex<double> expint_ep(double p, std::complex<double> z);

// Numeric CDF bypassing the single-Gamma closed form; test hook.
double force_numeric_cdf(const GeneralGammaSum& q, double x, double abs_tol = 1e-9);
double force_numeric_pdf(const GeneralGammaSum& q, double x, int order, double abs_tol);

} // namespace detail

} // namespace tracetails

#endif
