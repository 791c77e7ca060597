#include "tracetails/extremal.hpp"

#include "tracetails/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tracetails {

namespace {

constexpr double kMemberTol = 1e-12;

} // namespace

RelFamily::RelFamily(double mu_) : mu(mu_) {
    if (!(mu >= 1.0) || !std::isfinite(mu)) {
        throw std::invalid_argument("RelFamily: mu must be >= 1");
    }
}

AbsFamily::AbsFamily(double lam_, double phi_) : lam(lam_), phi(phi_) {
    if (!(lam > 0.0) || !(lam <= phi) || !std::isfinite(phi)) {
        throw std::invalid_argument("AbsFamily: requires 0 < lam <= phi");
    }
}

Spectrum worst_rel_spectrum(const RelFamily& f) {
    const double mu = f.mu;
    const std::size_t whole = static_cast<std::size_t>(std::floor(mu));
    const double frac = mu - std::floor(mu);
    std::vector<double> e(whole, 1.0 / mu);
    if (frac > 0.0) e.push_back(frac / mu);
    return Spectrum(std::move(e));
}

Spectrum worst_abs_spectrum(const AbsFamily& f) {
    const double rho = f.stable_rank_bound();
    const std::size_t whole = static_cast<std::size_t>(std::floor(rho));
    const double frac = rho - std::floor(rho);
    std::vector<double> e(whole, f.lam);
    if (frac > 0.0) e.push_back(f.lam * std::sqrt(frac));
    return Spectrum(std::move(e));
}

double effective_rank(const Spectrum& s) {
    double sum = 0.0, mx = 0.0;
    for (double v : s.entries) {
        if (v < 0.0) throw std::invalid_argument("effective_rank: negative entry");
        sum += v;
        mx = std::max(mx, v);
    }
    if (mx == 0.0) throw std::invalid_argument("effective_rank: zero spectrum");
    return sum / mx;
}

double stable_rank(const Spectrum& s) {
    double sum2 = 0.0, mx2 = 0.0;
    for (double v : s.entries) {
        sum2 += v * v;
        mx2 = std::max(mx2, v * v);
    }
    if (mx2 == 0.0) throw std::invalid_argument("stable_rank: zero spectrum");
    return sum2 / mx2;
}

GammaParams extremal_rel_law(const RelFamily& f, std::uint64_t m) {
    if (m < 1) throw std::invalid_argument("extremal_rel_law: m must be >= 1");
    const double a = 0.5 * static_cast<double>(m) * f.mu;
    return GammaParams(a, a);
}

SignedGamma extremal_abs_law(const AbsFamily& f, std::uint64_t m, int sign) {
    if (m < 1) throw std::invalid_argument("extremal_abs_law: m must be >= 1");
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("extremal_abs_law: sign must be +1 or -1");
    }
    const double md = static_cast<double>(m);
    return {sign, GammaParams(0.5 * md * f.stable_rank_bound(), 0.5 * md / f.lam)};
}

bool in_qrel(const GammaMix& q, double mu) {
    for (double w : q.weights) {
        if (w < 0.0) return false;
    }
    const GeneralGammaSum sum(q);
    if (mix_scale(sum) > 1.0 / mu + kMemberTol) return false;
    return std::fabs(mix_mean(sum) - 1.0) <= kMemberTol;
}

bool in_qabs(const GammaMix& q, const AbsFamily& f) {
    const GeneralGammaSum sum(q);
    if (mix_scale(sum) > f.lam + kMemberTol) return false;
    const double phi2 = f.phi * f.phi;
    return std::fabs(mix_variance(sum) - phi2) <= kMemberTol * phi2;
}

RelTailRegions rel_tail_region(double mu, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("rel_tail_region: alpha must be positive");
    if (!(mu >= alpha)) throw std::invalid_argument("rel_tail_region: requires mu >= alpha");
    RelTailRegions out;
    out.proved = {1.0 - 1.0 / alpha, 1.0 + 0.5 / alpha, EdgeStatus::proved};
    const double ar = alpha * std::ceil(mu / alpha);
    out.pessimistic = {1.0 - 1.0 / ar, 1.0 + 1.0 / ar, EdgeStatus::pessimistic_floor};
    out.conjectured = {1.0 - 1.0 / mu, 1.0 + 1.0 / mu, EdgeStatus::conjectured};
    return out;
}

AbsTailRegions abs_tail_region(const AbsFamily& f, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("abs_tail_region: alpha must be positive");
    if (!(f.lam <= f.phi / std::sqrt(alpha) + 1e-15)) {
        throw std::invalid_argument("abs_tail_region: requires lam <= phi/sqrt(alpha)");
    }
    const double r = std::ceil(f.phi * f.phi / (f.lam * f.lam * alpha));
    const double ra = r * alpha;
    AbsTailRegions out;
    out.pessimistic_floor = f.phi * (1.0 + std::sqrt(ra + 1.0)) / std::sqrt(ra);
    out.conjectured_edge = f.lam + std::sqrt(f.phi * f.phi + f.lam * f.lam);
    return out;
}

EpsilonReport matrix_rel_epsilon(std::uint64_t m, const RelFamily& f) {
    if (m < 1) throw std::invalid_argument("matrix_rel_epsilon: m must be >= 1");
    const double md = static_cast<double>(m);
    return {2.0 / (md * f.mu), std::sqrt(2.0 / md), EdgeStatus::conjectured};
}

EpsilonReport matrix_abs_epsilon(std::uint64_t m, const AbsFamily& f) {
    if (m < 1) throw std::invalid_argument("matrix_abs_epsilon: m must be >= 1");
    const double md = static_cast<double>(m);
    const double s = 2.0 * f.lam / md;
    const double conj = s + std::sqrt(2.0 / md * f.phi * f.phi + s * s);
    return {conj, f.phi * std::sqrt(2.0 / md), EdgeStatus::conjectured};
}

Spectrum random_rel_member(const RelFamily& f, std::uint64_t seed, std::uint64_t index) {
    CounterRng rng(seed);
    const double cap = 1.0 / f.mu;
    const std::size_t n_min = static_cast<std::size_t>(std::ceil(f.mu));
    for (std::uint32_t attempt = 0; attempt < 4000; ++attempt) {
        const std::uint64_t key = index * 4096 + attempt;
        const std::size_t n =
            n_min + 1 + static_cast<std::size_t>(rng.uniform(101, key, 0) * 4.0);
        std::vector<double> e(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            e[i] = -std::log(rng.uniform(102, key, static_cast<std::uint32_t>(i)));
            total += e[i];
        }
        bool ok = true;
        double mx = 0.0, mn = 1e300;
        for (double& v : e) {
            v /= total;
            mx = std::max(mx, v);
            mn = std::min(mn, v);
            if (v > cap) ok = false;
        }
        // Keep weight ratios moderate so downstream inversion stays cheap.
        if (ok && mn > 1e-3 * mx) return Spectrum(std::move(e));
    }
    throw std::runtime_error("random_rel_member: rejection sampling failed");
}

Spectrum random_abs_member(const AbsFamily& f, std::uint64_t seed, std::uint64_t index) {
    CounterRng rng(seed);
    const double phi2 = f.phi * f.phi;
    const std::size_t n_min =
        static_cast<std::size_t>(std::ceil(f.stable_rank_bound()));
    for (std::uint32_t attempt = 0; attempt < 4000; ++attempt) {
        const std::uint64_t key = index * 4096 + attempt;
        const std::size_t n =
            n_min + 1 + static_cast<std::size_t>(rng.uniform(103, key, 0) * 4.0);
        std::vector<double> sq(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sq[i] = -std::log(rng.uniform(104, key, static_cast<std::uint32_t>(i)));
            total += sq[i];
        }
        std::vector<double> e(n);
        bool ok = true;
        double mx = 0.0, mn = 1e300;
        for (std::size_t i = 0; i < n; ++i) {
            const double mag = std::sqrt(sq[i] / total * phi2);
            const bool negative = rng.uniform(105, key, static_cast<std::uint32_t>(i)) < 0.5;
            e[i] = negative ? -mag : mag;
            mx = std::max(mx, mag);
            mn = std::min(mn, mag);
            if (mag > f.lam) ok = false;
        }
        if (ok && mn > 1e-3 * mx) return Spectrum(std::move(e));
    }
    throw std::runtime_error("random_abs_member: rejection sampling failed");
}

} // namespace tracetails
