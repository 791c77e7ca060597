#ifndef TRACETAILS_EXTREMAL_HPP
#define TRACETAILS_EXTREMAL_HPP

#include "tracetails/gamma.hpp"
#include "tracetails/gamma_mix.hpp"
#include "tracetails/majorization.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace tracetails {

/// SPSD matrices with trace 1 and 2-norm at most 1/mu (mu bounds the
/// effective rank from below).
struct RelFamily {
    double mu;
    explicit RelFamily(double mu_);
};

/// Symmetric matrices with 2-norm at most lam and Frobenius norm phi.
struct AbsFamily {
    double lam;
    double phi;
    AbsFamily(double lam_, double phi_);

    double stable_rank_bound() const { return phi * phi / (lam * lam); }
};

enum class EdgeStatus { proved, pessimistic_floor, conjectured };

/// One candidate tail region with provenance. Edges are absent when the
/// corresponding side has no statement of this status.
struct TailRegion {
    std::optional<double> lower_edge;
    std::optional<double> upper_edge;
    EdgeStatus status;
};

/// The three annotated tail-region candidates for the relative family.
struct RelTailRegions {
    TailRegion proved;       // safe for every mu >= alpha
    TailRegion pessimistic;  // true edges cannot lie inside these
    TailRegion conjectured;
};

/// Tail-region data for the absolute family; the region is symmetric in x.
struct AbsTailRegions {
    double pessimistic_floor;
    double conjectured_edge;
};

/// Conjectured error thresholds for the matrix-level tail theorems.
struct EpsilonReport {
    double conjectured;     // candidate bound on the epsilon threshold
    double large_m_scale;   // phi*sqrt(2/m), the large-m scaling of eps_abs
    EdgeStatus status;      // always conjectured
};

/// Eigenvalues of the relative-error worst case: (1/mu) * (1,...,1, frac).
/// Zero eigenvalues are dropped.
Spectrum worst_rel_spectrum(const RelFamily& f);

/// Eigenvalues of the absolute-error worst case:
/// lam * (1,...,1, sqrt(rho - floor(rho))) with rho = phi^2/lam^2.
Spectrum worst_abs_spectrum(const AbsFamily& f);

/// trace / largest eigenvalue, for nonnegative spectra.
double effective_rank(const Spectrum& s);

/// squared Frobenius / squared 2-norm; sign-invariant.
double stable_rank(const Spectrum& s);

/// Law of the relative worst case: Gamma(m*mu/2, m*mu/2).
GammaParams extremal_rel_law(const RelFamily& f, std::uint64_t m);

/// Law of the absolute worst case: sign * X, X ~ Gamma(m*rho/2, m/(2*lam)).
struct SignedGamma {
    int sign; // +1 or -1
    GammaParams params;
};
SignedGamma extremal_abs_law(const AbsFamily& f, std::uint64_t m, int sign);

/// Membership of Q in Q_rel(mu; alpha, beta): nonnegative weights,
/// scale <= 1/mu + 1e-12, mean 1 within 1e-12.
bool in_qrel(const GammaMix& q, double mu);

/// Membership of Q in Q_abs(lam, phi; alpha, beta): scale <= lam + 1e-12,
/// variance phi^2 within 1e-12 relative.
bool in_qabs(const GammaMix& q, const AbsFamily& f);

/// Tail-region candidates for the family Q_rel(mu; alpha, .) around mean 1.
/// Requires mu >= alpha.
RelTailRegions rel_tail_region(double mu, double alpha);

/// Pessimistic floor and conjectured edge for Q_abs(lam, phi; alpha, .)
/// (centered). Requires lam <= phi/sqrt(alpha).
AbsTailRegions abs_tail_region(const AbsFamily& f, double alpha);

/// Conjectured relative threshold eps_rel <= 2/(m*mu).
EpsilonReport matrix_rel_epsilon(std::uint64_t m, const RelFamily& f);

/// Conjectured absolute threshold
/// eps_abs <= 2*lam/m + sqrt((2/m)*phi^2 + (2*lam/m)^2).
EpsilonReport matrix_abs_epsilon(std::uint64_t m, const AbsFamily& f);

/// Seeded random member of A_rel(mu): nonnegative entries, trace 1, max
/// entry <= 1/mu. Entries stay within a factor ~1e3 of each other so the
/// resulting estimator laws remain well-conditioned for inversion.
Spectrum random_rel_member(const RelFamily& f, std::uint64_t seed, std::uint64_t index);

/// Seeded random member of A_abs(lam, phi): signed entries, max |entry| <=
/// lam, sum of squares phi^2.
Spectrum random_abs_member(const AbsFamily& f, std::uint64_t seed, std::uint64_t index);

} // namespace tracetails

#endif
