#ifndef TRACETAILS_MAJORIZATION_HPP
#define TRACETAILS_MAJORIZATION_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tracetails {

/// Eigenvalue vector standing in for a symmetric matrix. Entries are kept
/// in the order given; predicates sort internally and treat zero padding as
/// neutral.
struct Spectrum {
    std::vector<double> entries;

    Spectrum() = default;
    Spectrum(std::initializer_list<double> init) : entries(init) {}
    explicit Spectrum(std::vector<double> e) : entries(std::move(e)) {}

    std::size_t size() const { return entries.size(); }
    double sum() const;
    double sum_squares() const;
    double max_abs() const;
    /// Copy sorted descending.
    Spectrum sorted() const;
};

enum class OrderKind { classical, frobenius };

/// Sequence of spectra where consecutive elements differ in at most two
/// coordinates and are pairwise ordered under order_kind.
struct MajorizationChain {
    std::vector<Spectrum> steps;
    OrderKind order_kind;
};

/// mu <= lam in the majorization order: prefix sums of the sorted entries
/// dominate and totals agree. Entries must be nonnegative; vectors are
/// zero-padded to a common length. Comparisons use a relative tolerance of
/// 1e-12 on the total sum.
bool majorizes(const Spectrum& mu, const Spectrum& lam);

/// Prefix-sum dominance only (no equal-totals condition).
bool weakly_majorizes(const Spectrum& mu, const Spectrum& lam);

/// Smallest 1-based rank j such that every prefix inequality at ranks
/// j..n is strict; empty when the final inequality is tight (no slack).
/// Requires weakly_majorizes(mu, lam).
std::optional<std::size_t> leading_slack_index(const Spectrum& mu, const Spectrum& lam);

/// Indefinite Frobenius order: squared positive parts weakly majorized one
/// way, squared negative parts the other, equal sums of squares.
bool f_majorizes(const Spectrum& mu, const Spectrum& lam);

/// Elementwise (min(s,0), max(s,0)); the parts sum back to s.
std::pair<Spectrum, Spectrum> pos_neg_split(const Spectrum& s);

/// Two-coordinate transformation chain from mu to lam under the classical
/// order. Requires majorizes(mu, lam). Each step moves mass from a smaller
/// coordinate to a larger one, preserving the sum.
MajorizationChain chain_classical(const Spectrum& mu, const Spectrum& lam);

/// Two-coordinate chain from mu to lam under the Frobenius order,
/// preserving the sum of squares. Mixed-sign slack-elimination moves come
/// first, then the positive-part chain, then the negative-part chain.
/// Requires f_majorizes(mu, lam). At most 2n+2 steps for padded length n.
MajorizationChain chain_frobenius(const Spectrum& mu, const Spectrum& lam);

/// Re-checks every chain invariant (step shape, conservation, pairwise
/// order, endpoint recovery). Returns an explanation on failure.
std::optional<std::string> validate_chain(const MajorizationChain& chain,
                                          const Spectrum& mu, const Spectrum& lam);

} // namespace tracetails

#endif
