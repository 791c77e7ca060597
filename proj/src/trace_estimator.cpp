#include "tracetails/trace_estimator.hpp"

#include "tracetails/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace tracetails {

namespace {

// Gaussian draw for (rep, vector j, component i); one philox stream per rep.
inline double gauss(const CounterRng& rng, std::uint64_t rep, std::uint64_t j,
                    std::uint64_t n, std::uint64_t i) {
    return rng.normal(/*stream=*/rep + 1, /*index=*/j * n + i);
}

} // namespace

double estimate_trace(const Spectrum& s, std::uint64_t m, std::uint64_t seed,
                      std::uint64_t rep) {
    if (m < 1) throw std::invalid_argument("estimate_trace: m must be >= 1");
    CounterRng rng(seed);
    const std::uint64_t n = s.size();
    double acc = 0.0;
    for (std::uint64_t j = 0; j < m; ++j) {
        for (std::uint64_t i = 0; i < n; ++i) {
            if (s.entries[i] == 0.0) continue;
            const double g = gauss(rng, rep, j, n, i);
            acc += s.entries[i] * g * g;
        }
    }
    return acc / static_cast<double>(m);
}

double estimate_trace_with_draws(const Spectrum& s, std::uint64_t m,
                                 const std::vector<double>& draws) {
    if (m < 1) throw std::invalid_argument("estimate_trace_with_draws: m must be >= 1");
    const std::uint64_t n = s.size();
    if (draws.size() != m * n) {
        throw std::invalid_argument("estimate_trace_with_draws: need m*n draws");
    }
    double acc = 0.0;
    for (std::uint64_t j = 0; j < m; ++j) {
        for (std::uint64_t i = 0; i < n; ++i) {
            const double g = draws[j * n + i];
            acc += s.entries[i] * g * g;
        }
    }
    return acc / static_cast<double>(m);
}

std::vector<double> run_estimates(const EstimatorRun& run) {
    std::vector<double> out(run.reps);
    for (std::uint64_t r = 0; r < run.reps; ++r) {
        out[r] = estimate_trace(run.spectrum, run.m, run.seed, r);
    }
    return out;
}

TailFrequency empirical_tail(const EstimatorRun& run, double eps, TailMode mode) {
    if (run.reps < 1) throw std::invalid_argument("empirical_tail: reps must be >= 1");
    if (!(eps >= 0.0)) throw std::invalid_argument("empirical_tail: eps must be >= 0");
    const double trace = run.spectrum.sum();
    double threshold = eps;
    if (mode == TailMode::relative) {
        if (trace == 0.0) {
            throw std::invalid_argument("empirical_tail: relative mode needs nonzero trace");
        }
        threshold = eps * std::fabs(trace);
    }
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < run.reps; ++r) {
        const double est = estimate_trace(run.spectrum, run.m, run.seed, r);
        if (std::fabs(est - trace) >= threshold) ++hits;
    }
    const double n = static_cast<double>(run.reps);
    const double p = static_cast<double>(hits) / n;
    return {p, 1.96 * std::sqrt(p * (1.0 - p) / n), run.reps};
}

double dense_estimate(const std::vector<double>& matrix, std::size_t n, std::uint64_t m,
                      std::uint64_t seed, std::uint64_t rep) {
    if (m < 1) throw std::invalid_argument("dense_estimate: m must be >= 1");
    if (matrix.size() != n * n) throw std::invalid_argument("dense_estimate: bad matrix size");
    double max_abs = 0.0, max_asym = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            max_abs = std::max(max_abs, std::fabs(matrix[r * n + c]));
            max_asym = std::max(max_asym, std::fabs(matrix[r * n + c] - matrix[c * n + r]));
        }
    }
    if (max_asym > 1e-10 * std::max(1.0, max_abs)) {
        throw std::invalid_argument("dense_estimate: matrix is not symmetric");
    }
    CounterRng rng(seed);
    double acc = 0.0;
    std::vector<double> z(n);
    for (std::uint64_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) z[i] = gauss(rng, rep, j, n, i);
        for (std::size_t r = 0; r < n; ++r) {
            double row = 0.0;
            for (std::size_t c = 0; c < n; ++c) row += matrix[r * n + c] * z[c];
            acc += z[r] * row;
        }
    }
    return acc / static_cast<double>(m);
}

} // namespace tracetails
