#include "tracetails/verify.hpp"

#include "tracetails/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tracetails {

namespace {

constexpr double kDominanceSlack = 1e-9;
constexpr double kCdfTol = 2e-10;

std::vector<double> padded(const Spectrum& s, std::size_t n) {
    std::vector<double> v = s.entries;
    v.resize(n, 0.0);
    return v;
}

double mean_of_weights(const std::vector<double>& w, double shape, double rate) {
    double s = 0.0;
    for (double v : w) s += v;
    return s * shape / rate;
}

GeneralGammaSum plain_sum(const std::vector<double>& w, double shape, double rate) {
    std::vector<GammaSumTerm> terms;
    terms.reserve(w.size());
    for (double v : w) terms.push_back({v, shape, rate});
    return GeneralGammaSum(std::move(terms));
}

// Log-spaced points on [lo, hi] when lo > 0, else linear.
std::vector<double> region_grid(const Interval& r, std::size_t n) {
    if (!(r.lo <= r.hi)) throw std::invalid_argument("dominance region: lo > hi");
    std::vector<double> xs(n);
    if (n == 1) {
        xs[0] = r.lo;
        return xs;
    }
    if (r.lo > 0.0) {
        const double q = std::log(r.hi / r.lo);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = r.lo * std::exp(q * static_cast<double>(i) / (n - 1));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = r.lo + (r.hi - r.lo) * static_cast<double>(i) / (n - 1);
        }
    }
    return xs;
}

} // namespace

std::vector<double> chebyshev_t_grid(std::size_t n) {
    if (n < 2) throw std::invalid_argument("chebyshev_t_grid: need at least 2 points");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(i) / (n - 1)));
    }
    t.front() = 0.0;
    t.back() = 1.0;
    return t;
}

DominancePath make_dominance_path(const Spectrum& mu, const Spectrum& lam, PathKind kind,
                                  double shape, double rate, std::vector<double> t_grid) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
        throw std::invalid_argument("make_dominance_path: shape and rate must be positive");
    }
    if (t_grid.size() < 2 || t_grid.front() != 0.0 || t_grid.back() != 1.0 ||
        !std::is_sorted(t_grid.begin(), t_grid.end())) {
        throw std::invalid_argument("make_dominance_path: t_grid must be sorted with endpoints 0, 1");
    }
    std::size_t n = std::max(mu.size(), lam.size());
    n = std::max<std::size_t>(n, 2);
    auto m = padded(mu, n);
    auto l = padded(lam, n);

    std::vector<std::size_t> diff;
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i] != l[i]) diff.push_back(i);
    }
    if (diff.size() > 2) {
        throw std::invalid_argument("make_dominance_path: spectra differ in more than two coordinates");
    }

    DominancePath path;
    path.mu = Spectrum(m);
    path.lam = Spectrum(l);
    path.kind = kind;
    path.t_grid = std::move(t_grid);
    path.shape = shape;
    path.rate = rate;

    if (diff.empty()) { // fixed point
        path.j = 0;
        path.k = 1;
        return path;
    }
    if (diff.size() == 1) {
        throw std::invalid_argument("make_dominance_path: single-coordinate change cannot "
                                    "satisfy either conservation law");
    }

    std::size_t j = diff[0], k = diff[1];
    if (kind == PathKind::relative) {
        if (l[j] < m[j]) std::swap(j, k);
        const bool form = 0.0 <= l[k] && l[k] < m[k] && m[k] <= m[j] && m[j] < l[j];
        if (!form) {
            throw std::invalid_argument("make_dominance_path: relative step does not satisfy "
                                        "0 <= lam_k < mu_k <= mu_j < lam_j");
        }
        const double gain = l[j] - m[j], loss = m[k] - l[k];
        if (std::fabs(gain - loss) > 1e-9 * std::max({gain, loss, 1e-30})) {
            throw std::invalid_argument("make_dominance_path: relative step does not conserve the sum");
        }
    } else {
        if (l[j] * l[j] < m[j] * m[j]) std::swap(j, k);
        const double gain = l[j] * l[j] - m[j] * m[j];
        const double loss = m[k] * m[k] - l[k] * l[k];
        if (!(gain > 0.0) || !(loss > 0.0) ||
            std::fabs(gain - loss) > 1e-9 * std::max(gain, loss)) {
            throw std::invalid_argument("make_dominance_path: absolute step does not conserve "
                                        "the sum of squares");
        }
        const bool case1 = m[k] < l[k] && l[k] <= 0.0 && 0.0 <= m[j] && m[j] < l[j];
        const bool case2 = 0.0 <= l[k] && l[k] < m[k] && m[k] <= m[j] && m[j] < l[j];
        const bool case3 = m[k] < l[k] && l[k] <= l[j] && l[j] < m[j] && m[j] <= 0.0;
        if (!case1 && !case2 && !case3) {
            throw std::invalid_argument("make_dominance_path: absolute step matches none of "
                                        "the admissible sign patterns");
        }
    }
    path.j = j;
    path.k = k;
    return path;
}

Spectrum interpolate(const DominancePath& path, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw std::invalid_argument("interpolate: t must lie in [0, 1]");
    }
    if (t == 0.0) return path.mu;
    if (t == 1.0) return path.lam;
    std::vector<double> nu = path.lam.entries;
    for (std::size_t i : {path.j, path.k}) {
        const double mi = path.mu.entries[i], li = path.lam.entries[i];
        if (path.kind == PathKind::relative) {
            nu[i] = t * li + (1.0 - t) * mi;
        } else {
            const double sq = t * li * li + (1.0 - t) * mi * mi;
            const double sgn = (li + mi) >= 0.0 ? 1.0 : -1.0;
            nu[i] = sgn * std::sqrt(sq);
        }
    }
    return Spectrum(std::move(nu));
}

PerturbedLaw perturbed_law(const DominancePath& path, double t) {
    const Spectrum nu = interpolate(path, t);
    std::vector<GammaSumTerm> terms;
    terms.reserve(nu.size() + 2);
    for (double v : nu.entries) terms.push_back({v, path.shape, path.rate});
    terms.push_back({nu.entries[path.j], 1.0, path.rate});
    terms.push_back({nu.entries[path.k], 1.0, path.rate});
    const double center = path.kind == PathKind::absolute
                              ? mean_of_weights(nu.entries, path.shape, path.rate)
                              : 0.0;
    return {GeneralGammaSum(std::move(terms)), center};
}

double perturbed_density(const DominancePath& path, double t, double x, int derivative_order) {
    const PerturbedLaw law = perturbed_law(path, t);
    return mix_pdf(law.sum, x + law.center, derivative_order);
}

double mode_of(const GeneralGammaSum& dist) {
    if (auto c = detail::collapse_to_gamma(dist)) {
        const auto& [sign, params] = *c;
        return sign * gamma_mode(params);
    }
    const double mean = mix_mean(dist);
    const double sd = std::sqrt(mix_variance(dist));
    MixEvaluator deriv(dist, 1, std::fabs(mean) + 12.0 * sd, 1e-9 * 0.4 / (sd * sd));
    // Scan for the + -> - sign change of f'; unimodality makes it unique.
    const std::size_t n_scan = 257;
    double lo = mean - 10.0 * sd, hi = mean + 10.0 * sd;
    const auto vals = deriv.eval_grid(lo, (hi - lo) / (n_scan - 1), n_scan);
    std::size_t bracket = n_scan;
    for (std::size_t i = 0; i + 1 < n_scan; ++i) {
        if (vals[i] > 0.0 && vals[i + 1] <= 0.0) bracket = i;
    }
    if (bracket == n_scan) {
        // Mode may sit at the support edge for small total shape.
        throw mix_evaluation_error("mode_of: no stationary point bracketed");
    }
    double a = lo + (hi - lo) * static_cast<double>(bracket) / (n_scan - 1);
    double b = lo + (hi - lo) * static_cast<double>(bracket + 1) / (n_scan - 1);
    for (int it = 0; it < 80 && (b - a) > 1e-9 * std::max(1.0, std::fabs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        (deriv(mid) > 0.0 ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

namespace {

// Rightmost and leftmost sign changes of f'' located on a uniform grid and
// refined by bisection. Returns the outermost |x - center|.
double outermost_inflection_numeric(const GeneralGammaSum& dist, double center) {
    const GeneralGammaSum& q = dist;
    double mean, sd;
    {
        mean = mix_mean(q);
        sd = std::sqrt(mix_variance(q));
    }
    const double tol = 1e-9 * 0.4 / (sd * sd * sd);
    MixEvaluator f2(q, 2, std::fabs(mean) + 13.0 * sd, tol);
    const double span = 12.0 * sd;
    const double step = sd / 50.0;
    const std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * span / step)) + 1;
    const double lo = mean - span;
    const auto vals = f2.eval_grid(lo, step, n);
    const double noise = 5.0 * tol;

    std::ptrdiff_t right = -1, left = -1;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n) - 1; i >= 0; --i) {
        if (vals[i] < -noise) {
            right = i;
            break;
        }
    }
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        if (vals[i] < -noise) {
            left = i;
            break;
        }
    }
    if (right < 0) {
        throw mix_evaluation_error("outermost_inflection: no sign change found");
    }

    auto bisect = [&](double a, double b, bool neg_on_left) {
        for (int it = 0; it < 60 && (b - a) > 1e-8 * std::max(1.0, std::fabs(b)); ++it) {
            const double mid = 0.5 * (a + b);
            const bool neg = f2(mid) < 0.0;
            if (neg == neg_on_left) a = mid;
            else b = mid;
        }
        return 0.5 * (a + b);
    };

    double best = 0.0;
    if (right + 1 < static_cast<std::ptrdiff_t>(n)) {
        const double a = lo + step * static_cast<double>(right);
        const double root = bisect(a, a + step, /*neg_on_left=*/true);
        best = std::max(best, std::fabs(root - center));
    }
    if (left > 0) {
        const double b = lo + step * static_cast<double>(left);
        const double root = bisect(b - step, b, /*neg_on_left=*/false);
        best = std::max(best, std::fabs(root - center));
    }
    return best;
}

} // namespace

double outermost_inflection(const GeneralGammaSum& dist, double center) {
    if (auto c = detail::collapse_to_gamma(dist)) {
        const auto& [sign, params] = *c;
        const auto [r_lo, r_hi] = gamma_inflection_points(params);
        double best = -1.0;
        for (const auto& r : {r_lo, r_hi}) {
            if (r) best = std::max(best, std::fabs(sign * *r - center));
        }
        if (best < 0.0) {
            throw mix_evaluation_error("outermost_inflection: density has no interior "
                                       "inflection points");
        }
        return best;
    }
    return outermost_inflection_numeric(dist, center);
}

double inflection_sup(const DominancePath& path) {
    if (path.kind != PathKind::absolute) {
        throw std::invalid_argument("inflection_sup: absolute paths only");
    }
    double sup = 0.0;
    for (double t : path.t_grid) {
        const PerturbedLaw law = perturbed_law(path, t);
        sup = std::max(sup, outermost_inflection(law.sum, law.center));
    }
    return sup;
}

DominanceReport dominance_check(const DominancePath& path, const std::vector<Interval>& regions,
                                std::size_t x_points, std::optional<Interval> no_claim_zone) {
    if (x_points < 1) throw std::invalid_argument("dominance_check: x_points must be >= 1");
    for (const auto& r : regions) {
        if (no_claim_zone && r.lo < no_claim_zone->hi && r.hi > no_claim_zone->lo) {
            throw std::invalid_argument("dominance_check: region overlaps the no-claim zone");
        }
    }

    const auto& mu_w = path.mu.entries;
    const auto& lam_w = path.lam.entries;
    // Family-membership consistency of the endpoints.
    if (path.kind == PathKind::relative) {
        for (double v : mu_w) {
            if (v < 0.0) throw std::invalid_argument("dominance_check: negative weight");
        }
        const double m0 = mean_of_weights(mu_w, path.shape, path.rate);
        const double m1 = mean_of_weights(lam_w, path.shape, path.rate);
        if (std::fabs(m0 - m1) > 1e-9 * std::max(std::fabs(m0), 1.0)) {
            throw std::invalid_argument("dominance_check: endpoints have different means");
        }
    } else {
        const GeneralGammaSum qm = plain_sum(mu_w, path.shape, path.rate);
        const GeneralGammaSum ql = plain_sum(lam_w, path.shape, path.rate);
        const double v0 = mix_variance(qm), v1 = mix_variance(ql);
        if (std::fabs(v0 - v1) > 1e-9 * std::max(v0, v1)) {
            throw std::invalid_argument("dominance_check: endpoints have different variances");
        }
    }

    double x_abs_max = 1.0;
    const double shift_mu = path.kind == PathKind::absolute
                                ? mean_of_weights(mu_w, path.shape, path.rate)
                                : 0.0;
    const double shift_lam = path.kind == PathKind::absolute
                                 ? mean_of_weights(lam_w, path.shape, path.rate)
                                 : 0.0;
    for (const auto& r : regions) {
        x_abs_max = std::max({x_abs_max, std::fabs(r.lo), std::fabs(r.hi)});
    }
    x_abs_max += std::max(std::fabs(shift_mu), std::fabs(shift_lam));

    MixEvaluator f_mu(plain_sum(mu_w, path.shape, path.rate), -1, x_abs_max, kCdfTol);
    MixEvaluator f_lam(plain_sum(lam_w, path.shape, path.rate), -1, x_abs_max, kCdfTol);

    DominanceReport report;
    report.regions = regions;
    report.worst_margin = std::numeric_limits<double>::infinity();

    auto record = [&](double x, bool upper_direction) {
        const double fm = f_mu(x + shift_mu);
        const double fl = f_lam(x + shift_lam);
        const double margin = upper_direction ? fm - fl : fl - fm;
        report.grid.push_back({x, fm, fl, margin});
        report.worst_margin = std::min(report.worst_margin, margin);
    };

    for (const auto& r : regions) {
        const auto xs = region_grid(r, x_points);
        if (path.kind == PathKind::relative) {
            const bool upper = r.lo >= 1.0;
            if (!upper && !(r.hi <= 1.0)) {
                throw std::invalid_argument("dominance_check: relative region straddles the mean");
            }
            for (double x : xs) record(x, upper);
        } else {
            if (r.lo < 0.0) {
                throw std::invalid_argument("dominance_check: absolute regions are given in |x|");
            }
            for (double x : xs) {
                record(x, true);
                record(-x, true);
            }
        }
    }
    report.pass = report.worst_margin >= -kDominanceSlack;
    return report;
}

MonotonicityReport monotonicity_check(const DominancePath& path, double x) {
    MonotonicityReport report;
    report.x = x;

    const bool fixed_point = path.mu.entries == path.lam.entries;

    // Expected direction from the sign analysis: beyond every mode of the
    // perturbed family the density decays, so F decreases in t for the
    // upper tail (and for both absolute tails beyond every inflection
    // point); below every mode F increases in t.
    if (fixed_point) {
        report.expected = Direction::constant;
    } else if (path.kind == PathKind::relative) {
        double m_hi = -std::numeric_limits<double>::infinity();
        double m_lo = std::numeric_limits<double>::infinity();
        for (double t : path.t_grid) {
            const PerturbedLaw law = perturbed_law(path, t);
            const double m = mode_of(law.sum);
            m_hi = std::max(m_hi, m);
            m_lo = std::min(m_lo, m);
        }
        if (x >= m_hi) report.expected = Direction::nonincreasing;
        else if (x <= m_lo) report.expected = Direction::nondecreasing;
        else report.expected = Direction::no_claim;
    } else {
        const double sup = inflection_sup(path);
        report.expected =
            std::fabs(x) > sup ? Direction::nonincreasing : Direction::no_claim;
    }

    report.f_values.reserve(path.t_grid.size());
    for (double t : path.t_grid) {
        const Spectrum nu = interpolate(path, t);
        const double shift = path.kind == PathKind::absolute
                                 ? mean_of_weights(nu.entries, path.shape, path.rate)
                                 : 0.0;
        MixEvaluator f(plain_sum(nu.entries, path.shape, path.rate), -1,
                       std::fabs(x) + std::fabs(shift) + 1.0, kCdfTol);
        report.f_values.push_back(f(x + shift));
    }

    report.worst_violation = 0.0;
    const double tol = 1e-9;
    for (std::size_t i = 0; i + 1 < report.f_values.size(); ++i) {
        const double d = report.f_values[i + 1] - report.f_values[i];
        double violation = 0.0;
        switch (report.expected) {
            case Direction::nonincreasing: violation = std::max(0.0, d); break;
            case Direction::nondecreasing: violation = std::max(0.0, -d); break;
            case Direction::constant: violation = std::fabs(d); break;
            case Direction::no_claim: violation = 0.0; break;
        }
        report.worst_violation = std::max(report.worst_violation, violation);
    }
    report.pass = report.expected != Direction::no_claim && report.worst_violation <= tol;
    if (report.expected == Direction::no_claim) report.pass = true;
    return report;
}

GammaMix rel_witness_member(double mu, double alpha) {
    if (!(mu >= alpha) || !(alpha > 0.0)) {
        throw std::invalid_argument("rel_witness_member: requires mu >= alpha > 0");
    }
    const std::size_t r = static_cast<std::size_t>(std::ceil(mu / alpha - 1e-12));
    std::vector<double> w(std::max<std::size_t>(r, 1), 1.0 / static_cast<double>(r));
    return GammaMix(std::move(w), alpha, alpha);
}

PerturbedLaw rel_floor_witness(double mu, double alpha) {
    const GammaMix member = rel_witness_member(mu, alpha);
    std::vector<GammaSumTerm> terms;
    for (double v : member.weights) terms.push_back({v, alpha, alpha});
    const double lam_hat = member.weights.front();
    terms.push_back({lam_hat, 1.0, alpha});
    terms.push_back({lam_hat, 1.0, alpha});
    return {GeneralGammaSum(std::move(terms)), 0.0};
}

GammaMix abs_witness_member(const AbsFamily& f, double alpha) {
    if (!(alpha > 0.0) || !(f.lam <= f.phi / std::sqrt(alpha) + 1e-15)) {
        throw std::invalid_argument("abs_witness_member: requires lam <= phi/sqrt(alpha)");
    }
    const std::size_t r = static_cast<std::size_t>(
        std::ceil(f.phi * f.phi / (f.lam * f.lam * alpha) - 1e-12));
    const double lam_hat = f.phi / std::sqrt(static_cast<double>(r) * alpha);
    std::vector<double> w(std::max<std::size_t>(r, 1), lam_hat);
    return GammaMix(std::move(w), alpha, 1.0);
}

PerturbedLaw abs_floor_witness(const AbsFamily& f, double alpha) {
    const GammaMix member = abs_witness_member(f, alpha);
    std::vector<GammaSumTerm> terms;
    double mean = 0.0;
    for (double v : member.weights) {
        terms.push_back({v, alpha, 1.0});
        mean += v * alpha;
    }
    const double lam_hat = member.weights.front();
    terms.push_back({lam_hat, 1.0, 1.0});
    terms.push_back({lam_hat, 1.0, 1.0});
    return {GeneralGammaSum(std::move(terms)), mean};
}

ConjectureProbe conjecture_probe_rel(double mu, double alpha, std::size_t trials,
                                     std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("conjecture_probe_rel: trials must be >= 1");
    if (!(mu >= alpha) || !(alpha > 0.0)) {
        throw std::invalid_argument("conjecture_probe_rel: requires mu >= alpha > 0");
    }
    ConjectureProbe probe;
    probe.kind = PathKind::relative;
    probe.alpha = alpha;
    const double r = std::ceil(mu / alpha - 1e-12);
    probe.floor_value = 1.0 + 1.0 / (alpha * r);
    probe.conjectured_value = 1.0 + 1.0 / mu;
    probe.witness_statistic = mode_of(rel_floor_witness(mu, alpha).sum);
    probe.empirical_max = probe.witness_statistic;

    CounterRng rng(seed);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const Spectrum w = random_rel_member(RelFamily(mu / alpha), seed, trial);
        const std::size_t n = w.size();
        std::size_t j = static_cast<std::size_t>(rng.uniform(900, trial, 0) * n);
        std::size_t k = static_cast<std::size_t>(rng.uniform(900, trial, 1) * (n - 1));
        j = std::min(j, n - 1);
        if (k >= j) ++k;
        std::vector<GammaSumTerm> terms;
        for (double v : w.entries) terms.push_back({v, alpha, alpha});
        terms.push_back({w.entries[j], 1.0, alpha});
        terms.push_back({w.entries[k], 1.0, alpha});
        ProbeRow row{w.entries, j, k, mode_of(GeneralGammaSum(std::move(terms)))};
        if (row.statistic > probe.empirical_max) probe.empirical_max = row.statistic;
        if (row.statistic > probe.conjectured_value + 1e-7 && !probe.counterexample) {
            probe.counterexample = row;
        }
        probe.rows.push_back(std::move(row));
    }
    return probe;
}

ConjectureProbe conjecture_probe_abs(const AbsFamily& f, double alpha, std::size_t trials,
                                     std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("conjecture_probe_abs: trials must be >= 1");
    ConjectureProbe probe;
    probe.kind = PathKind::absolute;
    probe.alpha = alpha;
    probe.floor_value = abs_tail_region(f, alpha).pessimistic_floor;
    probe.conjectured_value = abs_tail_region(f, alpha).conjectured_edge;
    {
        const PerturbedLaw witness = abs_floor_witness(f, alpha);
        probe.witness_statistic = outermost_inflection(witness.sum, witness.center);
    }
    probe.empirical_max = probe.witness_statistic;

    CounterRng rng(seed);
    const AbsFamily scaled(f.lam, f.phi / std::sqrt(alpha));
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const Spectrum w = random_abs_member(scaled, seed, trial);
        const std::size_t n = w.size();
        std::size_t j = static_cast<std::size_t>(rng.uniform(901, trial, 0) * n);
        std::size_t k = static_cast<std::size_t>(rng.uniform(901, trial, 1) * (n - 1));
        j = std::min(j, n - 1);
        if (k >= j) ++k;
        std::vector<GammaSumTerm> terms;
        double mean = 0.0;
        for (double v : w.entries) {
            terms.push_back({v, alpha, 1.0});
            mean += v * alpha;
        }
        terms.push_back({w.entries[j], 1.0, 1.0});
        terms.push_back({w.entries[k], 1.0, 1.0});
        ProbeRow row{w.entries, j, k,
                     outermost_inflection(GeneralGammaSum(std::move(terms)), mean)};
        if (row.statistic > probe.empirical_max) probe.empirical_max = row.statistic;
        if (row.statistic > probe.conjectured_value + 1e-7 && !probe.counterexample) {
            probe.counterexample = row;
        }
        probe.rows.push_back(std::move(row));
    }
    return probe;
}

} // namespace tracetails
