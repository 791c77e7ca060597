#include "tracetails/gamma_mix.hpp"

#include "tracetails/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tracetails {

namespace {

using cplx = std::complex<double>;

constexpr std::size_t kMaxNodes = 400000;

// 15-point Gauss-Legendre rule on [-1, 1].
constexpr int kGl = 15;
constexpr double kGlNode[kGl] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272, -0.7244177313601700,
    -0.5709721726085388, -0.3941513470775634, -0.2011940939974345, 0.0,
    0.2011940939974345,  0.3941513470775634,  0.5709721726085388,  0.7244177313601700,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kGlWeight[kGl] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719, 0.1395706779261543,
    0.1662692058169939, 0.1861610000155622, 0.1984314853271116, 0.2025782419255613,
    0.1984314853271116, 0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

struct ActiveTerm {
    double sigma; // weight / rate
    double alpha;
};

struct Prepared {
    std::vector<ActiveTerm> terms;
    double total_shape = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double mean_abs = 0.0; // sum alpha*|sigma|, bounds the CF phase rate
    double sigma_max = 0.0;
    double sigma_min = 0.0;
    int support_sign = 0; // +1 all sigma>0, -1 all sigma<0, 0 mixed
    bool collapsible = false;
    double collapse_sigma = 0.0;
};

Prepared prepare(const GeneralGammaSum& q, bool drop_negligible) {
    Prepared p;
    for (const auto& t : q.terms) {
        if (t.weight == 0.0) continue;
        p.terms.push_back({t.weight / t.rate, t.shape});
    }
    if (p.terms.empty()) {
        throw mix_evaluation_error("degenerate gamma sum: all weights are zero");
    }
    double var = 0.0;
    for (const auto& t : p.terms) var += t.alpha * t.sigma * t.sigma;
    if (drop_negligible) {
        const double floor = 1e-12 * std::sqrt(var) /
                             std::max<std::size_t>(std::size_t{1}, p.terms.size());
        std::erase_if(p.terms, [&](const ActiveTerm& t) {
            return std::fabs(t.sigma) * (t.alpha + std::sqrt(t.alpha) + 1.0) < floor;
        });
    }
    bool any_pos = false, any_neg = false;
    p.sigma_min = std::numeric_limits<double>::infinity();
    for (const auto& t : p.terms) {
        p.total_shape += t.alpha;
        p.mean += t.alpha * t.sigma;
        p.variance += t.alpha * t.sigma * t.sigma;
        p.mean_abs += t.alpha * std::fabs(t.sigma);
        p.sigma_max = std::max(p.sigma_max, std::fabs(t.sigma));
        p.sigma_min = std::min(p.sigma_min, std::fabs(t.sigma));
        (t.sigma > 0.0 ? any_pos : any_neg) = true;
    }
    p.support_sign = any_pos && any_neg ? 0 : (any_pos ? 1 : -1);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& t : p.terms) {
        lo = std::min(lo, t.sigma);
        hi = std::max(hi, t.sigma);
    }
    p.collapsible = (hi - lo) <= 1e-13 * std::max(std::fabs(hi), std::fabs(lo));
    p.collapse_sigma = 0.5 * (hi + lo);
    return p;
}

double log_cf_mag(const Prepared& p, double u) {
    double s = 0.0;
    for (const auto& t : p.terms) {
        const double us = u * t.sigma;
        s += t.alpha * std::log1p(us * us);
    }
    return -0.5 * s;
}

cplx cf_at(const Prepared& p, double u) {
    cplx log_cf(0.0, 0.0);
    for (const auto& t : p.terms) {
        log_cf -= t.alpha * std::log(cplx(1.0, -u * t.sigma));
    }
    return std::exp(log_cf);
}

// u * |d log G / du|; increases in u and saturates at total shape.
double local_shape(const Prepared& p, double u) {
    double s = 0.0;
    for (const auto& t : p.terms) {
        const double us = u * t.sigma;
        s += t.alpha * us * us / (1.0 + us * us);
    }
    return s;
}

// |d log G / du|, the local log-slope of the CF magnitude.
double mag_slope(const Prepared& p, double u) {
    double s = 0.0;
    for (const auto& t : p.terms) {
        const double us = u * t.sigma;
        s += t.alpha * t.sigma * us / (1.0 + us * us);
    }
    return s;
}

// Bound on |int_U^inf u^k e(-iux) cf(u) du|. x_min = 0 disables the
// oscillation bound. Returns +inf when neither mechanism applies.
double truncation_bound(const Prepared& p, double U, int k, double x_min) {
    const double g = std::exp(log_cf_mag(p, U));
    const double a_loc = local_shape(p, U);
    const double uk = std::pow(U, k);
    double best = std::numeric_limits<double>::infinity();
    if (a_loc > k + 1.02) best = g * uk * U / (a_loc - k - 1.0);
    if (x_min > 0.0 && a_loc > k + 0.02) best = std::min(best, 4.0 * g * uk / x_min);
    return best;
}

} // namespace

GammaMix::GammaMix(std::vector<double> weights_, double shape_, double rate_)
    : weights(std::move(weights_)), shape(shape_), rate(rate_) {
    if (weights.empty()) throw std::invalid_argument("GammaMix: weights must be non-empty");
    for (double w : weights) {
        if (!std::isfinite(w)) throw std::invalid_argument("GammaMix: weights must be finite");
    }
    if (!(shape > 0.0) || !(rate > 0.0)) {
        throw std::invalid_argument("GammaMix: shape and rate must be positive");
    }
}

GeneralGammaSum::GeneralGammaSum(std::vector<GammaSumTerm> terms_) : terms(std::move(terms_)) {
    if (terms.empty()) throw std::invalid_argument("GeneralGammaSum: needs at least one term");
    for (const auto& t : terms) {
        if (!std::isfinite(t.weight) || !(t.shape > 0.0) || !(t.rate > 0.0)) {
            throw std::invalid_argument("GeneralGammaSum: invalid term");
        }
    }
}

GeneralGammaSum::GeneralGammaSum(const GammaMix& mix) {
    terms.reserve(mix.weights.size());
    for (double w : mix.weights) terms.push_back({w, mix.shape, mix.rate});
}

double mix_mean(const GeneralGammaSum& q) {
    double s = 0.0;
    for (const auto& t : q.terms) s += t.weight * t.shape / t.rate;
    return s;
}

double mix_variance(const GeneralGammaSum& q) {
    double s = 0.0;
    for (const auto& t : q.terms) s += t.weight * t.weight * t.shape / (t.rate * t.rate);
    return s;
}

double mix_scale(const GeneralGammaSum& q) {
    double s = 0.0;
    for (const auto& t : q.terms) s = std::max(s, std::fabs(t.weight) / t.rate);
    return s;
}

double effective_shape(const GammaMix& q) {
    double sum = 0.0, mx = 0.0;
    for (double w : q.weights) {
        if (w < 0.0) throw std::invalid_argument("effective_shape: weights must be nonnegative");
        sum += w;
        mx = std::max(mx, w);
    }
    if (mx == 0.0) throw std::invalid_argument("effective_shape: all weights are zero");
    return q.shape * sum / mx;
}

GammaMix trace_estimator_law(const std::vector<double>& spectrum, std::uint64_t m) {
    if (m < 1) throw std::invalid_argument("trace_estimator_law: m must be >= 1");
    return GammaMix(spectrum, 0.5 * static_cast<double>(m), 0.5 * static_cast<double>(m));
}

GammaMix divide(const GammaMix& q, std::uint64_t T) {
    if (T < 1) throw std::invalid_argument("divide: T must be >= 1");
    std::vector<double> w;
    w.reserve(q.weights.size() * T);
    for (std::uint64_t rep = 0; rep < T; ++rep) {
        w.insert(w.end(), q.weights.begin(), q.weights.end());
    }
    return GammaMix(std::move(w), q.shape / static_cast<double>(T), q.rate);
}

std::complex<double> mix_cf(const GeneralGammaSum& q, double u) {
    cplx log_cf(0.0, 0.0);
    for (const auto& t : q.terms) {
        if (t.weight == 0.0) continue;
        log_cf -= t.shape * std::log(cplx(1.0, -u * t.weight / t.rate));
    }
    return std::exp(log_cf);
}

// ---------------------------------------------------------------------------
// MixEvaluator
// ---------------------------------------------------------------------------

MixEvaluator::MixEvaluator(const GeneralGammaSum& q, int order, double x_abs_max, double abs_tol)
    : order_(order) {
    if (order < -1 || order > 2) {
        throw std::invalid_argument("MixEvaluator: order must be -1 (CDF) or 0..2");
    }
    if (!(abs_tol > 0.0)) throw std::invalid_argument("MixEvaluator: abs_tol must be positive");

    Prepared p = prepare(q, /*drop_negligible=*/true);
    mean_ = p.mean;
    sd_ = std::sqrt(p.variance);
    total_shape_ = p.total_shape;
    support_sign_ = p.support_sign;

    if (p.collapsible) {
        collapsed_ = true;
        collapse_sign_ = p.collapse_sigma > 0.0 ? 1.0 : -1.0;
        collapse_params_.emplace(p.total_shape, 1.0 / std::fabs(p.collapse_sigma));
        return;
    }

    const int k = order;
    if (!(p.total_shape > k + 0.05)) {
        throw mix_evaluation_error("insufficient total shape for requested derivative order");
    }

    // The CDF integrand carries 1/u; treat it as k = -1 throughout.
    const double tol_integral = abs_tol * M_PI * 0.5;
    const double x_min = 0.0; // grids may include x = 0; rely on CF decay only
    const double x_max = std::max(x_abs_max, 1e-12);

    // Candidate truncation points: pure quadrature vs. asymptotic tail model.
    auto find_u = [&](auto err_fn, double u0) -> double {
        double u = u0;
        for (int i = 0; i < 240; ++i) {
            if (err_fn(u) <= tol_integral) return u;
            u *= 1.35;
        }
        return std::numeric_limits<double>::infinity();
    };

    const double u_seed = 1.0 / p.sigma_max;
    const double u_pure =
        find_u([&](double u) { return truncation_bound(p, u, k, x_min); }, u_seed);

    // Tail model error: the 1/u^3 remainder of the asymptotic expansion of
    // the CF, integrated with three extra powers of decay.
    double pp1 = 0.0, pp2 = 0.0;
    for (const auto& t : p.terms) {
        pp1 += t.alpha / std::fabs(t.sigma);
        pp2 += t.alpha / (t.sigma * t.sigma);
    }
    auto model_err = [&](double u) {
        const double r = std::pow((pp1 + std::sqrt(pp2)) / u, 3) * 2.0;
        const double g = std::exp(log_cf_mag(p, u));
        const double a_loc = local_shape(p, u);
        const double denom = std::max(a_loc + 3.0 - k - 1.0, 0.5);
        return g * std::pow(u, k) * (u / denom) * r;
    };
    const double u_tail = find_u(model_err, std::max(30.0 / p.sigma_min, u_seed));

    // Walk the panel layout for a candidate U and count nodes.
    const double osc_cap = M_PI / (2.0 * (x_max + p.mean_abs));
    auto panel_count = [&](double U) -> std::size_t {
        std::size_t n = 0;
        double u = 0.0;
        while (u < U) {
            double w = osc_cap;
            for (int it = 0; it < 3; ++it) {
                w = std::min(osc_cap, 1.5 / std::max(mag_slope(p, u + w), 1e-300));
            }
            u += w;
            if (++n > 2 * kMaxNodes / kGl) break;
        }
        return n * kGl;
    };

    const std::size_t n_pure = std::isfinite(u_pure) ? panel_count(u_pure) : 2 * kMaxNodes;
    const std::size_t n_tail = std::isfinite(u_tail) ? panel_count(u_tail) : 2 * kMaxNodes;

    double U;
    if (n_pure <= kMaxNodes && static_cast<double>(n_pure) <= 1.3 * static_cast<double>(n_tail)) {
        U = u_pure;
        has_tail_ = false;
    } else if (n_tail <= kMaxNodes) {
        U = u_tail;
        has_tail_ = true;
    } else {
        throw mix_evaluation_error("inversion integral truncation failed: "
                                   "weights span too many scales for this total shape");
    }

    // Build the quadrature table.
    double u = 0.0;
    while (u < U) {
        double w = osc_cap;
        for (int it = 0; it < 3; ++it) {
            w = std::min(osc_cap, 1.5 / std::max(mag_slope(p, u + w), 1e-300));
        }
        w = std::min(w, U - u);
        const double half = 0.5 * w;
        const double mid = u + half;
        for (int g = 0; g < kGl; ++g) {
            const double ug = mid + half * kGlNode[g];
            if (ug <= 0.0) continue;
            const double wg = half * kGlWeight[g];
            nodes_u_.push_back(ug);
            coeff_.push_back(wg * cf_at(p, ug) * std::pow(ug, k));
        }
        u += w;
        if (nodes_u_.size() > kMaxNodes) {
            throw mix_evaluation_error("inversion integral exceeded the node budget");
        }
    }

    if (has_tail_) {
        tail_u_ = U;
        // Power-law model for u >= U: cf(u) = B * u^-A * (1 + c1/u + c2/u^2)
        // with B anchored so the model matches cf(U) exactly. The tail
        // integral reduces to generalized exponential integrals:
        //   int_U^inf u^(k-A) e^{-iux} du = U^(k-A+1) E_{A-k}(iUx).
        cplx logw(0.0, 0.0);
        for (const auto& t : p.terms) {
            logw -= t.alpha * std::log(cplx(1.0, 1.0 / (U * t.sigma)));
        }
        const cplx w_at_u = std::exp(logw); // model's (1 + c1/u + ...) exact value at U
        tail_base_ = cf_at(p, U) / w_at_u * std::pow(U, order_ + 1);
        double p1 = 0.0, p2 = 0.0;
        for (const auto& t : p.terms) {
            p1 += t.alpha / t.sigma;
            p2 += t.alpha / (t.sigma * t.sigma);
        }
        tail_c1_ = cplx(0.0, -p1) / U;
        tail_c2_ = cplx(-0.5 * (p2 + p1 * p1), 0.0) / (U * U);
    }
}

std::complex<double> MixEvaluator::tail_integral(double x) const {
    const double p0 = total_shape_ - static_cast<double>(order_);
    const cplx z(0.0, tail_u_ * x);
    const cplx e0 = detail::expint_ep(p0, z);
    const cplx e1 = detail::expint_ep(p0 + 1.0, z);
    const cplx e2 = detail::expint_ep(p0 + 2.0, z);
    return tail_base_ * (e0 + tail_c1_ * e1 + tail_c2_ * e2);
}

namespace {

// Re[(-i)^k * v] for k in {0, 1, 2}.
inline double apply_deriv_phase(int k, cplx v) {
    switch (k) {
        case 0: return v.real();
        case 1: return v.imag();
        default: return -v.real();
    }
}

} // namespace

double MixEvaluator::eval_numeric(double x) const {
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < nodes_u_.size(); ++i) {
        acc += coeff_[i] * std::exp(cplx(0.0, -nodes_u_[i] * x));
    }
    if (has_tail_) acc += tail_integral(x);
    if (order_ == -1) return 0.5 - acc.imag() / M_PI;
    return apply_deriv_phase(order_, acc) / M_PI;
}

double MixEvaluator::operator()(double x) const {
    if (collapsed_) {
        const GammaParams& g = *collapse_params_;
        const double s = collapse_sign_;
        const double y = s * x; // coordinate on the underlying Gamma axis
        if (order_ == -1) {
            if (s > 0.0) return gamma_cdf(g, x);
            if (x >= 0.0) return 1.0;
            return detail::reg_upper_gamma(g.shape, g.rate * y);
        }
        if (y < 0.0) return 0.0;
        if (y == 0.0 && g.shape < 1.0) {
            throw mix_evaluation_error("density pole at the support boundary");
        }
        double f = (y == 0.0) ? (g.shape == 1.0 ? g.rate : 0.0) : gamma_pdf(g, y);
        if (order_ == 0) return f;
        if (y == 0.0) {
            throw mix_evaluation_error("density derivative at the support boundary");
        }
        const double l1 = (g.shape - 1.0) / y - g.rate;
        if (order_ == 1) return s * f * l1;
        return f * (l1 * l1 - (g.shape - 1.0) / (y * y));
    }
    if (support_sign_ != 0) {
        const double xs = support_sign_ * x;
        if (xs < 0.0) return order_ == -1 ? (support_sign_ > 0 ? 0.0 : 1.0) : 0.0;
    }
    return eval_numeric(x);
}

std::vector<double> MixEvaluator::eval_grid(double x0, double dx, std::size_t n) const {
    std::vector<double> out(n);
    if (n == 0) return out;
    if (collapsed_) {
        for (std::size_t j = 0; j < n; ++j) out[j] = (*this)(x0 + dx * static_cast<double>(j));
        return out;
    }
    std::vector<cplx> acc(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < nodes_u_.size(); ++i) {
        const cplx c = coeff_[i];
        cplx ph = std::exp(cplx(0.0, -nodes_u_[i] * x0));
        const cplx rot = std::exp(cplx(0.0, -nodes_u_[i] * dx));
        for (std::size_t j = 0; j < n; ++j) {
            acc[j] += c * ph;
            ph *= rot;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double x = x0 + dx * static_cast<double>(j);
        cplx total = acc[j];
        if (has_tail_) total += tail_integral(x);
        double v;
        if (order_ == -1) {
            v = 0.5 - total.imag() / M_PI;
        } else {
            v = apply_deriv_phase(order_, total) / M_PI;
        }
        if (support_sign_ != 0) {
            const double xs = support_sign_ * x;
            if (xs < 0.0) v = order_ == -1 ? (support_sign_ > 0 ? 0.0 : 1.0) : 0.0;
        }
        out[j] = v;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Public one-shot wrappers
// ---------------------------------------------------------------------------

double mix_cdf(const GeneralGammaSum& q, double x) {
    MixEvaluator ev(q, -1, std::fabs(x), 1e-9);
    return ev(x);
}

double mix_pdf(const GeneralGammaSum& q, double x, int derivative_order) {
    if (derivative_order < 0 || derivative_order > 2) {
        throw std::invalid_argument("mix_pdf: derivative_order must be 0, 1, or 2");
    }
    Prepared p = prepare(q, false);
    const double sd = std::sqrt(p.variance);
    const double tol = 1e-8 * 0.4 / std::pow(sd, derivative_order + 1);
    MixEvaluator ev(q, derivative_order, std::fabs(x), tol);
    return ev(x);
}

std::vector<double> mix_sample(const GeneralGammaSum& q, std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < q.terms.size(); ++j) {
        const auto& t = q.terms[j];
        if (t.weight == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += t.weight * rng.gamma(t.shape, t.rate, /*stream=*/j + 1, /*index=*/i);
        }
    }
    return out;
}

namespace detail {

std::optional<std::pair<double, GammaParams>> collapse_to_gamma(const GeneralGammaSum& q) {
    Prepared p = prepare(q, /*drop_negligible=*/true);
    if (!p.collapsible) return std::nullopt;
    const double sign = p.collapse_sigma > 0.0 ? 1.0 : -1.0;
    return std::make_pair(sign, GammaParams(p.total_shape, 1.0 / std::fabs(p.collapse_sigma)));
}

std::complex<double> expint_ep(double p, std::complex<double> z) {
    const double az = std::abs(z);
    if (az < 1e-250) {
        if (p <= 1.0) {
            throw mix_evaluation_error("expint_ep diverges at z = 0 for p <= 1");
        }
        return cplx(1.0 / (p - 1.0), 0.0);
    }
    if (az <= 4.0) {
        // Power series about z = 0.
        const double rp = std::round(p);
        const bool integral_p = std::fabs(p - rp) < 1e-9 && rp >= 1.0 && rp < 1e9;
        cplx sum(0.0, 0.0);
        cplx term(1.0, 0.0); // (-z)^m / m!
        const int n = static_cast<int>(rp);
        for (int m = 0; m < 500; ++m) {
            if (!integral_p || m != n - 1) {
                const double denom = 1.0 - p + static_cast<double>(m);
                sum += term / denom;
            }
            term *= -z / static_cast<double>(m + 1);
            if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-30) && m > 4) break;
        }
        if (integral_p) {
            // psi(n) - Log z, with the (-z)^(n-1)/(n-1)! prefactor.
            double psi = -0.57721566490153286;
            for (int kk = 1; kk < n; ++kk) psi += 1.0 / kk;
            cplx pref(1.0, 0.0);
            double lfact = 0.0;
            for (int kk = 1; kk <= n - 1; ++kk) {
                pref *= -z;
                lfact += std::log(static_cast<double>(kk));
            }
            pref *= std::exp(-lfact);
            return pref * (psi - std::log(z)) - sum;
        }
        const double g = std::tgamma(1.0 - p);
        const cplx zp = std::exp((p - 1.0) * std::log(z));
        return g * zp - sum;
    }
    // Modified Lentz continued fraction: E_p(z) = e^-z / (z+p - 1*p/(z+p+2 - ...)).
    const double tiny = 1e-290;
    cplx f = z + p;
    if (std::abs(f) < tiny) f = tiny;
    cplx C = f, D(0.0, 0.0);
    for (int i = 1; i <= 20000; ++i) {
        const double ai = -static_cast<double>(i) * (p + static_cast<double>(i) - 1.0);
        const cplx bi = z + p + 2.0 * static_cast<double>(i);
        D = bi + ai * D;
        if (std::abs(D) < tiny) D = tiny;
        C = bi + ai / C;
        if (std::abs(C) < tiny) C = tiny;
        D = 1.0 / D;
        const cplx delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-15) {
            return std::exp(-z) / f;
        }
    }
    throw mix_evaluation_error("expint_ep continued fraction did not converge");
}

double force_numeric_cdf(const GeneralGammaSum& q, double x, double abs_tol) {
    // Split one term into two halves so the collapse detector cannot fire.
    std::vector<GammaSumTerm> terms = q.terms;
    for (auto& t : terms) {
        if (t.weight != 0.0) {
            GammaSumTerm half = t;
            half.shape = t.shape * 0.5;
            t.shape *= 0.5;
            t.weight *= (1.0 + 3e-13);
            terms.push_back(half);
            break;
        }
    }
    MixEvaluator ev(GeneralGammaSum(std::move(terms)), -1, std::fabs(x), abs_tol);
    return ev(x);
}

double force_numeric_pdf(const GeneralGammaSum& q, double x, int order, double abs_tol) {
    std::vector<GammaSumTerm> terms = q.terms;
    for (auto& t : terms) {
        if (t.weight != 0.0) {
            GammaSumTerm half = t;
            half.shape = t.shape * 0.5;
            t.shape *= 0.5;
            t.weight *= (1.0 + 3e-13);
            terms.push_back(half);
            break;
        }
    }
    MixEvaluator ev(GeneralGammaSum(std::move(terms)), order, std::fabs(x), abs_tol);
    return ev(x);
}

} // namespace detail

} // namespace tracetails
