#include "tracetails/bounds.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace tracetails {

std::string to_string(RegionStatus s) {
    switch (s) {
        case RegionStatus::proved: return "proved";
        case RegionStatus::conjectured: return "conjectured";
        default: return "unsupported";
    }
}

double ck_abs_bound(double lam2, double phi, std::uint64_t m, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("ck_abs_bound: eps must be positive");
    if (m < 1) throw std::invalid_argument("ck_abs_bound: m must be >= 1");
    const double md = static_cast<double>(m);
    return 2.0 * std::exp(-md * eps * eps / (4.0 * phi * phi + 4.0 * eps * lam2));
}

double ck_rel_bound(double mu, std::uint64_t m, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("ck_rel_bound: eps must be positive");
    if (m < 1) throw std::invalid_argument("ck_rel_bound: m must be >= 1");
    const double md = static_cast<double>(m);
    return 2.0 * std::exp(-md * eps * eps * mu / (4.0 * (1.0 + eps)));
}

double extremal_rel_tail(double mu, std::uint64_t m, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("extremal_rel_tail: eps must be positive");
    const GammaParams law = extremal_rel_law(RelFamily(mu), m);
    double lower = 0.0;
    if (eps < 1.0) lower = gamma_cdf(law, 1.0 - eps);
    const double upper = detail::reg_upper_gamma(law.shape, law.rate * (1.0 + eps));
    return lower + upper;
}

double extremal_abs_tail(const AbsFamily& f, std::uint64_t m, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("extremal_abs_tail: eps must be positive");
    const SignedGamma law = extremal_abs_law(f, m, +1);
    const double mean = law.params.mean();
    return 2.0 * detail::reg_upper_gamma(law.params.shape, law.params.rate * (mean + eps));
}

RegionStatus rel_region_status(double mu, std::uint64_t m, double eps) {
    const double md = static_cast<double>(m);
    // alpha = m/2: both tails proved once eps >= 2/m (the wider of the two
    // proved edges), conjectured from 2/(m*mu).
    if (eps >= 2.0 / md) return RegionStatus::proved;
    if (eps >= 2.0 / (md * mu)) return RegionStatus::conjectured;
    return RegionStatus::unsupported;
}

RegionStatus abs_region_status(const AbsFamily& f, std::uint64_t m, double eps) {
    // No proved region exists for the absolute family; the conjecture takes
    // over at its stated threshold.
    if (eps >= matrix_abs_epsilon(m, f).conjectured) return RegionStatus::conjectured;
    return RegionStatus::unsupported;
}

BoundQuery::BoundQuery(RelFamily f, double eps)
    : mode(ErrorMode::relative), family(f), epsilon(eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("BoundQuery: epsilon must be positive");
}

BoundQuery::BoundQuery(AbsFamily f, double eps)
    : mode(ErrorMode::absolute), family(f), epsilon(eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("BoundQuery: epsilon must be positive");
}

namespace {

double bound_at(const BoundQuery& q, std::uint64_t m, BoundMethod method) {
    if (q.mode == ErrorMode::relative) {
        const double mu = std::get<RelFamily>(q.family).mu;
        return method == BoundMethod::ck ? ck_rel_bound(mu, m, q.epsilon)
                                         : extremal_rel_tail(mu, m, q.epsilon);
    }
    const AbsFamily& f = std::get<AbsFamily>(q.family);
    return method == BoundMethod::ck ? ck_abs_bound(f.lam, f.phi, m, q.epsilon)
                                     : extremal_abs_tail(f, m, q.epsilon);
}

RegionStatus status_at(const BoundQuery& q, std::uint64_t m) {
    if (q.mode == ErrorMode::relative) {
        return rel_region_status(std::get<RelFamily>(q.family).mu, m, q.epsilon);
    }
    return abs_region_status(std::get<AbsFamily>(q.family), m, q.epsilon);
}

} // namespace

SampleSizeResult sample_size(const BoundQuery& query, double delta, BoundMethod method,
                             bool force) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("sample_size: delta must lie in (0, 1)");
    }
    std::uint64_t m;
    if (method == BoundMethod::ck) {
        const double log_term = std::log(2.0 / delta);
        double raw;
        if (query.mode == ErrorMode::relative) {
            const double mu = std::get<RelFamily>(query.family).mu;
            raw = 4.0 * (1.0 + query.epsilon) * log_term / (query.epsilon * query.epsilon * mu);
        } else {
            const AbsFamily& f = std::get<AbsFamily>(query.family);
            raw = (4.0 * f.phi * f.phi + 4.0 * query.epsilon * f.lam) * log_term /
                  (query.epsilon * query.epsilon);
        }
        m = static_cast<std::uint64_t>(std::max(1.0, std::ceil(raw)));
        // Guard the ceiling against round-off in either direction.
        while (m > 1 && bound_at(query, m - 1, method) <= delta) --m;
        while (bound_at(query, m, method) > delta) ++m;
    } else {
        std::uint64_t hi = 1;
        while (bound_at(query, hi, method) > delta) {
            hi *= 2;
            if (hi > (std::uint64_t{1} << 62)) {
                throw std::runtime_error("sample_size: bound does not reach delta");
            }
        }
        std::uint64_t lo = hi / 2; // bound(lo) > delta or lo == 0
        while (hi - lo > 1 && lo > 0) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            (bound_at(query, mid, method) > delta ? lo : hi) = mid;
        }
        m = hi;
    }

    SampleSizeResult out;
    out.m = m;
    out.method = method;
    out.region = status_at(query, m);
    if (method == BoundMethod::extremal) {
        if (out.region != RegionStatus::proved && !force) {
            throw region_refusal_error(
                "sample_size: extremal bound is only proved in the tail region; epsilon "
                "falls in the " + to_string(out.region) + " zone (use force to override)");
        }
        out.note = "valid in the proved tail region only";
    } else {
        out.note = "valid for all epsilon";
    }
    return out;
}

CompareReport compare_report(const BoundQuery& base, std::uint64_t m,
                             const std::vector<double>& eps_grid) {
    CompareReport report;
    report.rows.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        BoundQuery q = base;
        q.epsilon = eps;
        CompareRow row;
        row.epsilon = eps;
        row.ck_bound = bound_at(q, m, BoundMethod::ck);
        row.exact_tail = bound_at(q, m, BoundMethod::extremal);
        row.ratio = row.exact_tail > 0.0
                        ? row.ck_bound / row.exact_tail
                        : std::numeric_limits<double>::infinity();
        row.region = status_at(q, m);
        report.rows.push_back(row);
    }
    return report;
}

std::vector<double> default_eps_grid(const BoundQuery& base, std::uint64_t m,
                                     std::size_t count) {
    const double md = static_cast<double>(m);
    double sigma;
    if (base.mode == ErrorMode::relative) {
        sigma = std::sqrt(2.0 / (md * std::get<RelFamily>(base.family).mu));
    } else {
        sigma = std::get<AbsFamily>(base.family).phi * std::sqrt(2.0 / md);
    }
    const double lo = 1e-3, hi = std::max(6.0 * sigma, 2e-3);
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        grid[i] = lo * std::pow(hi / lo, t);
    }
    return grid;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const CompareReport& report) {
    os << "epsilon,ck_bound,exact_tail,ratio,region_status\n";
    for (const auto& r : report.rows) {
        os << format_double(r.epsilon) << ',' << format_double(r.ck_bound) << ','
           << format_double(r.exact_tail) << ',' << format_double(r.ratio) << ','
           << to_string(r.region) << '\n';
    }
}

} // namespace tracetails
