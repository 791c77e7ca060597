#ifndef TRACETAILS_TRACE_ESTIMATOR_HPP
#define TRACETAILS_TRACE_ESTIMATOR_HPP

#include "tracetails/majorization.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace tracetails {

struct EstimatorRun {
    Spectrum spectrum;
    std::uint64_t m;    // samples per estimate
    std::uint64_t reps; // independent estimates
    std::uint64_t seed;
};

/// One realization of (1/m) sum_j z_j^T A z_j computed on the spectrum:
/// (1/m) sum_j sum_i s_i g_ij^2. rep selects an independent estimate; the
/// output is a pure function of (seed, rep).
double estimate_trace(const Spectrum& s, std::uint64_t m, std::uint64_t seed,
                      std::uint64_t rep = 0);

/// Same computation with caller-provided Gaussian draws, row-major
/// (j*n + i); draws.size() must be m*n. Test instrumentation.
double estimate_trace_with_draws(const Spectrum& s, std::uint64_t m,
                                 const std::vector<double>& draws);

/// All reps of a run.
std::vector<double> run_estimates(const EstimatorRun& run);

struct TailFrequency {
    double frequency;
    double half_width; // binomial 95% confidence half-width
    std::uint64_t reps;
};

enum class TailMode { absolute, relative };

/// Fraction of reps with |estimate - trace| >= eps (absolute) or
/// >= eps*|trace| (relative). Relative mode requires a nonzero trace.
TailFrequency empirical_tail(const EstimatorRun& run, double eps, TailMode mode);

/// (1/m) sum_j z_j^T A z_j on a dense symmetric matrix (row-major n*n).
/// Exists to check rotation invariance against spectrum-based runs.
double dense_estimate(const std::vector<double>& matrix, std::size_t n, std::uint64_t m,
                      std::uint64_t seed, std::uint64_t rep = 0);

} // namespace tracetails

#endif
