#ifndef TRACETAILS_BOUNDS_HPP
#define TRACETAILS_BOUNDS_HPP

#include "tracetails/extremal.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tracetails {

enum class ErrorMode { absolute, relative };

/// Region validity of an extremal tail value at a given epsilon, with
/// alpha = m/2 unit conversions.
enum class RegionStatus { proved, conjectured, unsupported };

std::string to_string(RegionStatus s);

/// Concentration bound 2*exp(-m*eps^2 / (4*phi^2 + 4*eps*lam2)) for
/// symmetric matrices with ||A||_2 <= lam2, ||A||_F = phi. May exceed 1.
double ck_abs_bound(double lam2, double phi, std::uint64_t m, double eps);

/// Relative variant 2*exp(-m*eps^2*mu / (4*(1+eps))) for SPSD matrices with
/// effective rank >= mu.
double ck_rel_bound(double mu, std::uint64_t m, double eps);

/// Exact two-sided tail Pr(|X - 1| >= eps) of the relative worst case,
/// X ~ Gamma(m*mu/2, m*mu/2).
double extremal_rel_tail(double mu, std::uint64_t m, double eps);

/// Upper+lower tail bound 2*Pr(X - E[X] >= eps) of the absolute worst case,
/// X ~ Gamma(m*rho/2, m/(2*lam)).
double extremal_abs_tail(const AbsFamily& f, std::uint64_t m, double eps);

/// Validity status of the extremal tail at (eps, m) for each mode.
RegionStatus rel_region_status(double mu, std::uint64_t m, double eps);
RegionStatus abs_region_status(const AbsFamily& f, std::uint64_t m, double eps);

struct BoundQuery {
    ErrorMode mode;
    std::variant<RelFamily, AbsFamily> family;
    double epsilon;

    BoundQuery(RelFamily f, double eps);
    BoundQuery(AbsFamily f, double eps);
};

enum class BoundMethod { ck, extremal };

struct SampleSizeResult {
    std::uint64_t m;
    BoundMethod method;
    RegionStatus region; // status of the bound at the returned m
    std::string note;
};

/// Thrown when the extremal method is asked for an epsilon outside the
/// proved tail region and force is not set.
class region_refusal_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Smallest m with the selected bound <= delta. Closed-form inversion for
/// ck; integer bisection for extremal. The extremal method refuses outside
/// the proved region unless force is set.
SampleSizeResult sample_size(const BoundQuery& query, double delta, BoundMethod method,
                             bool force = false);

struct CompareRow {
    double epsilon;
    double ck_bound;
    double exact_tail;
    double ratio; // ck / exact
    RegionStatus region;
};

struct CompareReport {
    std::vector<CompareRow> rows;
};

/// One row per epsilon: CK bound, exact extremal tail, their ratio, and the
/// region status of the exact value.
CompareReport compare_report(const BoundQuery& base, std::uint64_t m,
                             const std::vector<double>& eps_grid);

/// Log-spaced default grid from 1e-3 to the distribution's 6-sigma point.
std::vector<double> default_eps_grid(const BoundQuery& base, std::uint64_t m,
                                     std::size_t count = 32);

/// CSV with header epsilon,ck_bound,exact_tail,ratio,region_status; floats
/// in shortest round-trip form.
void write_csv(std::ostream& os, const CompareReport& report);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

} // namespace tracetails

#endif
