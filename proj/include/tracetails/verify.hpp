#ifndef TRACETAILS_VERIFY_HPP
#define TRACETAILS_VERIFY_HPP

#include "tracetails/extremal.hpp"
#include "tracetails/gamma_mix.hpp"
#include "tracetails/majorization.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tracetails {

enum class PathKind { relative, absolute };

/// Interpolation between two spectra that differ in exactly two coordinates,
/// used to verify one dominance step on a grid of t values.
struct DominancePath {
    Spectrum mu;
    Spectrum lam;
    std::size_t j; // coordinate whose weight (or squared weight) grows
    std::size_t k; // coordinate whose weight (or squared weight) shrinks
    PathKind kind;
    std::vector<double> t_grid; // sorted, endpoints 0 and 1
    double shape;               // per-term shape alpha
    double rate;                // shared rate beta
};

/// Chebyshev-Lobatto points on [0,1], endpoints included.
std::vector<double> chebyshev_t_grid(std::size_t n = 33);

/// Builds and validates a path from two spectra (padded to common length)
/// that differ in at most two coordinates and satisfy the order required by
/// kind. Identical spectra yield a fixed-point path with j=0, k=1.
DominancePath make_dominance_path(const Spectrum& mu, const Spectrum& lam, PathKind kind,
                                  double shape, double rate,
                                  std::vector<double> t_grid = chebyshev_t_grid());

/// The interpolated weight vector at t. Relative paths conserve the entry
/// sum; absolute paths conserve the sum of squares. Endpoints are returned
/// bitwise.
Spectrum interpolate(const DominancePath& path, double t);

/// The perturbed sum Y(t) + nu_j(t)*psi + nu_k(t)*psi' as a GeneralGammaSum
/// plus the centering shift to subtract (0 for relative paths, E[Q(t)] for
/// absolute ones).
struct PerturbedLaw {
    GeneralGammaSum sum;
    double center;
};
PerturbedLaw perturbed_law(const DominancePath& path, double t);

/// Density (or derivative) of the centered perturbed distribution at x.
double perturbed_density(const DominancePath& path, double t, double x,
                         int derivative_order = 0);

/// Unique mode of a linear combination of Gamma variables, to 1e-8 in x.
double mode_of(const GeneralGammaSum& dist);

/// Outermost |x| at which the second derivative of the density of
/// (dist - center) changes sign. Grid width sd/50 out to mean +- 12 sd,
/// refined by bisection to 1e-7.
double outermost_inflection(const GeneralGammaSum& dist, double center);

/// Max of outermost_inflection over the path's t grid, for the centered
/// perturbed densities. Absolute paths only.
double inflection_sup(const DominancePath& path);

struct Interval {
    double lo;
    double hi;
};

struct DominancePoint {
    double x;
    double f_mu;
    double f_lam;
    double margin; // signed; >= -1e-9 passes
};

struct DominanceReport {
    std::vector<Interval> regions;
    std::vector<DominancePoint> grid;
    bool pass;
    double worst_margin;
};

/// Evaluates the claimed CDF inequality for the path's endpoints on
/// log-spaced grids over the given regions. Relative paths check the upper
/// tail above 1 and the lower tail below 1 with their respective
/// directions; absolute paths check both signs of x over each region.
/// When no_claim_zone is given, any region overlapping its interior is
/// rejected.
DominanceReport dominance_check(const DominancePath& path, const std::vector<Interval>& regions,
                                std::size_t x_points,
                                std::optional<Interval> no_claim_zone = std::nullopt);

enum class Direction { nonincreasing, nondecreasing, constant, no_claim };

struct MonotonicityReport {
    double x;
    std::vector<double> f_values; // F_{Y(t)}(x) over the path's t grid
    Direction expected;
    bool pass;
    double worst_violation;
};

/// Checks that t -> F_{Y(t)}(x) (perturbation-free, centered for absolute
/// paths) is monotone in the direction the density-derivative sign analysis
/// dictates at x. Tolerance 1e-9.
MonotonicityReport monotonicity_check(const DominancePath& path, double x);

struct ProbeRow {
    std::vector<double> weights;
    std::size_t j;
    std::size_t k;
    double statistic; // mode (relative) or inflection extent (absolute)
};

struct ConjectureProbe {
    PathKind kind;
    double alpha;
    double floor_value;        // proved pessimistic floor
    double conjectured_value;  // conjectured ceiling
    double witness_statistic;  // the floor witness, recomputed numerically
    double empirical_max;
    std::vector<ProbeRow> rows;
    std::optional<ProbeRow> counterexample; // statistic beyond the ceiling
};

/// Samples random family members and index pairs, locates the perturbed
/// modes (relative) or inflection extents (absolute), and reports the
/// empirical maximum against the conjectured ceiling. Never asserts the
/// conjecture.
ConjectureProbe conjecture_probe_rel(double mu, double alpha, std::size_t trials,
                                     std::uint64_t seed);
ConjectureProbe conjecture_probe_abs(const AbsFamily& f, double alpha, std::size_t trials,
                                     std::uint64_t seed);

/// The witness distributions behind the pessimistic-floor theorems.
/// Relative: Q = sum of ceil(mu/alpha) copies of lam*X, perturbed; its mode
/// is 1 + 1/(alpha*ceil(mu/alpha)). Absolute: Q with r = ceil(phi^2/
/// (lam^2 alpha)) equal weights, perturbed and centered; its upper
/// inflection point is phi*(1+sqrt(r*alpha+1))/sqrt(r*alpha).
PerturbedLaw rel_floor_witness(double mu, double alpha);
PerturbedLaw abs_floor_witness(const AbsFamily& f, double alpha);

/// The un-perturbed witness weights (family membership checks apply here).
GammaMix rel_witness_member(double mu, double alpha);
GammaMix abs_witness_member(const AbsFamily& f, double alpha);

} // namespace tracetails

#endif
