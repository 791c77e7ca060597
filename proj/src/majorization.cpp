#include "tracetails/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tracetails {

namespace {

constexpr double kRelTol = 1e-12;

std::vector<double> padded_sorted_desc(const Spectrum& s, std::size_t n) {
    std::vector<double> v = s.entries;
    v.resize(std::max(n, v.size()), 0.0);
    std::sort(v.begin(), v.end(), std::greater<double>());
    return v;
}

void require_nonnegative(const Spectrum& s, const char* who) {
    for (double e : s.entries) {
        if (e < 0.0) throw std::invalid_argument(std::string(who) + ": negative entry");
    }
}

double sum_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

// Prefix-sum dominance of sorted vectors, tolerance relative to the larger
// total.
bool prefix_dominated(const std::vector<double>& mu_sorted,
                      const std::vector<double>& lam_sorted, double tol) {
    double pm = 0.0, pl = 0.0;
    for (std::size_t i = 0; i < mu_sorted.size(); ++i) {
        pm += mu_sorted[i];
        pl += lam_sorted[i];
        if (pm > pl + tol) return false;
    }
    return true;
}

double order_tol(const std::vector<double>& a, const std::vector<double>& b) {
    return kRelTol * std::max({std::fabs(sum_of(a)), std::fabs(sum_of(b)), 1e-300});
}

std::vector<double> squared(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * v[i];
    return out;
}

std::vector<double> positive_part(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], 0.0);
    return out;
}

std::vector<double> negative_part(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::min(v[i], 0.0);
    return out;
}

// Ranks of v in descending order of value (stable).
std::vector<std::size_t> argsort_desc(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    return idx;
}

// One anti-Robin-Hood move on work toward target_sorted (both same length):
// give mass to the highest-ranked deficit coordinate, taken from the next
// surplus below it. Returns false when work already matches the target.
bool anti_robin_hood_move(std::vector<double>& work, const std::vector<double>& target_sorted,
                          double tol) {
    const auto idx = argsort_desc(work);
    const std::size_t n = work.size();
    std::size_t a = n;
    for (std::size_t r = 0; r < n; ++r) {
        if (work[idx[r]] < target_sorted[r] - tol) {
            a = r;
            break;
        }
    }
    if (a == n) return false;
    std::size_t b = n;
    for (std::size_t r = a + 1; r < n; ++r) {
        if (work[idx[r]] > target_sorted[r] + tol) {
            b = r;
            break;
        }
    }
    if (b == n) throw std::logic_error("majorization move: no donor found");
    const double deficit = target_sorted[a] - work[idx[a]];
    const double surplus = work[idx[b]] - target_sorted[b];
    const double delta = std::min(deficit, surplus);
    if (delta >= deficit) {
        work[idx[a]] = target_sorted[a];
    } else {
        work[idx[a]] += delta;
    }
    if (delta >= surplus) {
        work[idx[b]] = target_sorted[b];
    } else {
        work[idx[b]] -= delta;
    }
    return true;
}

// One Robin-Hood move for the decreasing direction: take from the
// highest-ranked surplus coordinate, give to the next deficit below it.
bool robin_hood_move(std::vector<double>& work, const std::vector<double>& target_sorted,
                     double tol) {
    const auto idx = argsort_desc(work);
    const std::size_t n = work.size();
    std::size_t a = n;
    for (std::size_t r = 0; r < n; ++r) {
        if (work[idx[r]] > target_sorted[r] + tol) {
            a = r;
            break;
        }
    }
    if (a == n) return false;
    std::size_t b = n;
    for (std::size_t r = a + 1; r < n; ++r) {
        if (work[idx[r]] < target_sorted[r] - tol) {
            b = r;
            break;
        }
    }
    if (b == n) throw std::logic_error("majorization move: no recipient found");
    const double surplus = work[idx[a]] - target_sorted[a];
    const double deficit = target_sorted[b] - work[idx[b]];
    const double delta = std::min(deficit, surplus);
    if (delta >= surplus) {
        work[idx[a]] = target_sorted[a];
    } else {
        work[idx[a]] -= delta;
    }
    if (delta >= deficit) {
        work[idx[b]] = target_sorted[b];
    } else {
        work[idx[b]] += delta;
    }
    return true;
}

} // namespace

double Spectrum::sum() const {
    return std::accumulate(entries.begin(), entries.end(), 0.0);
}

double Spectrum::sum_squares() const {
    double s = 0.0;
    for (double e : entries) s += e * e;
    return s;
}

double Spectrum::max_abs() const {
    double m = 0.0;
    for (double e : entries) m = std::max(m, std::fabs(e));
    return m;
}

Spectrum Spectrum::sorted() const {
    Spectrum out = *this;
    std::sort(out.entries.begin(), out.entries.end(), std::greater<double>());
    return out;
}

bool majorizes(const Spectrum& mu, const Spectrum& lam) {
    require_nonnegative(mu, "majorizes");
    require_nonnegative(lam, "majorizes");
    const std::size_t n = std::max(mu.size(), lam.size());
    const auto ms = padded_sorted_desc(mu, n);
    const auto ls = padded_sorted_desc(lam, n);
    const double tol = order_tol(ms, ls);
    if (std::fabs(sum_of(ms) - sum_of(ls)) > tol) return false;
    return prefix_dominated(ms, ls, tol);
}

bool weakly_majorizes(const Spectrum& mu, const Spectrum& lam) {
    require_nonnegative(mu, "weakly_majorizes");
    require_nonnegative(lam, "weakly_majorizes");
    const std::size_t n = std::max(mu.size(), lam.size());
    const auto ms = padded_sorted_desc(mu, n);
    const auto ls = padded_sorted_desc(lam, n);
    return prefix_dominated(ms, ls, order_tol(ms, ls));
}

std::optional<std::size_t> leading_slack_index(const Spectrum& mu, const Spectrum& lam) {
    if (!weakly_majorizes(mu, lam)) {
        throw std::invalid_argument("leading_slack_index: mu must be weakly majorized by lam");
    }
    const std::size_t n = std::max(mu.size(), lam.size());
    const auto ms = padded_sorted_desc(mu, n);
    const auto ls = padded_sorted_desc(lam, n);
    const double tol = order_tol(ms, ls);
    // Largest rank whose prefix inequality is tight; slack starts just after.
    std::size_t last_tight = 0;
    double pm = 0.0, pl = 0.0;
    for (std::size_t r = 1; r <= n; ++r) {
        pm += ms[r - 1];
        pl += ls[r - 1];
        if (pl - pm <= tol) last_tight = r;
    }
    if (last_tight == n) return std::nullopt;
    return last_tight + 1;
}

bool f_majorizes(const Spectrum& mu, const Spectrum& lam) {
    const std::size_t n = std::max(mu.size(), lam.size());
    std::vector<double> m = mu.entries, l = lam.entries;
    m.resize(n, 0.0);
    l.resize(n, 0.0);
    const auto mp2 = squared(positive_part(m));
    const auto lp2 = squared(positive_part(l));
    const auto mn2 = squared(negative_part(m));
    const auto ln2 = squared(negative_part(l));
    const double total_l = sum_of(squared(l));
    const double total_m = sum_of(squared(m));
    const double tol = kRelTol * std::max(total_l, 1e-300);
    if (std::fabs(total_m - total_l) > tol) return false;
    if (!weakly_majorizes(Spectrum(mp2), Spectrum(lp2))) return false;
    if (!weakly_majorizes(Spectrum(ln2), Spectrum(mn2))) return false;
    return true;
}

std::pair<Spectrum, Spectrum> pos_neg_split(const Spectrum& s) {
    return {Spectrum(negative_part(s.entries)), Spectrum(positive_part(s.entries))};
}

MajorizationChain chain_classical(const Spectrum& mu, const Spectrum& lam) {
    if (!majorizes(mu, lam)) {
        throw std::invalid_argument("chain_classical: requires mu majorized by lam");
    }
    const std::size_t n = std::max(mu.size(), lam.size());
    std::vector<double> work = padded_sorted_desc(mu, n);
    const std::vector<double> target = padded_sorted_desc(lam, n);
    const double tol = order_tol(work, target);

    MajorizationChain chain;
    chain.order_kind = OrderKind::classical;
    chain.steps.push_back(Spectrum(work));
    for (std::size_t iter = 0; iter <= 4 * n + 8; ++iter) {
        if (!anti_robin_hood_move(work, target, tol)) {
            return chain;
        }
        chain.steps.push_back(Spectrum(work));
    }
    throw std::logic_error("chain_classical: did not converge");
}

namespace {

// Raised when phase 0 cannot find a nonnegative coordinate to grow at the
// required rank; the caller retries with one more zero of padding.
struct NeedMorePadding {};

MajorizationChain chain_frobenius_padded(const Spectrum& mu, const Spectrum& lam,
                                         std::size_t extra_zeros) {
    std::size_t n = std::max(mu.size(), lam.size()) + extra_zeros;
    std::vector<double> work = mu.entries;
    work.resize(n, 0.0);
    std::sort(work.begin(), work.end(), std::greater<double>());
    std::vector<double> lam_pad = lam.entries;
    lam_pad.resize(n, 0.0);

    const double scale2 = std::max(sum_of(squared(lam_pad)), 1e-300);
    const double tol2 = kRelTol * scale2;

    // Slack of the negative-side (equivalently positive-side) inequality.
    auto slack = [&]() {
        return sum_of(squared(negative_part(work))) - sum_of(squared(negative_part(lam_pad)));
    };

    MajorizationChain chain;
    chain.order_kind = OrderKind::frobenius;
    chain.steps.push_back(Spectrum(work));

    const auto lam_pos2 = padded_sorted_desc(Spectrum(squared(positive_part(lam_pad))), n);
    const auto lam_neg2 = padded_sorted_desc(Spectrum(squared(negative_part(lam_pad))), n);

    // Phase 0: mixed-sign moves, shrinking a negative coordinate toward zero
    // while a nonnegative coordinate grows, sum of squares constant.
    for (std::size_t iter = 0; iter <= 2 * n + 2 && slack() > tol2; ++iter) {
        const auto pos2 = squared(positive_part(work));
        const auto neg2 = squared(negative_part(work));
        const auto jp = leading_slack_index(Spectrum(pos2), Spectrum(lam_pos2));
        const auto jn = leading_slack_index(Spectrum(lam_neg2), Spectrum(neg2));
        if (!jp || !jn) throw std::logic_error("chain_frobenius: slack bookkeeping failed");

        // Nonnegative coordinate whose square sits at (or ties below) the
        // slack rank jp.
        const auto pos_rank = argsort_desc(pos2);
        std::size_t grow = n;
        for (std::size_t k = *jp - 1; k < n; ++k) {
            if (work[pos_rank[k]] >= 0.0) {
                grow = pos_rank[k];
                break;
            }
        }
        if (grow == n) throw NeedMorePadding{};
        const auto neg_rank = argsort_desc(neg2);
        const std::size_t shrink = neg_rank[*jn - 1];
        if (work[shrink] >= 0.0) {
            throw std::logic_error("chain_frobenius: no admissible mixed-sign move");
        }

        const double h2 = work[shrink] * work[shrink];
        const double d_max = std::min(h2, slack());
        // Largest transfer keeping both squared weak majorizations valid.
        auto feasible = [&](double d) {
            std::vector<double> trial = work;
            trial[grow] = std::sqrt(trial[grow] * trial[grow] + d);
            trial[shrink] = -std::sqrt(std::max(h2 - d, 0.0));
            const auto tp2 = squared(positive_part(trial));
            const auto tn2 = squared(negative_part(trial));
            return weakly_majorizes(Spectrum(tp2), Spectrum(lam_pos2)) &&
                   weakly_majorizes(Spectrum(lam_neg2), Spectrum(tn2));
        };
        double d;
        if (feasible(d_max)) {
            d = d_max;
        } else {
            double lo = 0.0, hi = d_max;
            for (int b = 0; b < 80; ++b) {
                const double mid = 0.5 * (lo + hi);
                (feasible(mid) ? lo : hi) = mid;
            }
            d = lo;
        }
        if (!(d > 1e-15 * scale2)) {
            throw std::logic_error("chain_frobenius: stalled mixed-sign move");
        }
        work[grow] = std::sqrt(work[grow] * work[grow] + d);
        work[shrink] = (d >= h2) ? 0.0 : -std::sqrt(h2 - d);
        chain.steps.push_back(Spectrum(work));
    }
    if (slack() > tol2) throw std::logic_error("chain_frobenius: slack not eliminated");

    // Phase 1: classical chain on the squared positive parts.
    {
        std::vector<std::size_t> pos_coord;
        std::vector<double> sq;
        for (std::size_t i = 0; i < n; ++i) {
            if (work[i] >= 0.0) {
                pos_coord.push_back(i);
                sq.push_back(work[i] * work[i]);
            }
        }
        std::vector<double> target(lam_pos2.begin(), lam_pos2.begin() + pos_coord.size());
        for (std::size_t iter = 0; iter <= 2 * n + 2; ++iter) {
            if (!anti_robin_hood_move(sq, target, tol2)) break;
            for (std::size_t i = 0; i < pos_coord.size(); ++i) {
                work[pos_coord[i]] = std::sqrt(sq[i]);
            }
            chain.steps.push_back(Spectrum(work));
        }
    }

    // Phase 2: classical chain, reversed direction, on the squared negative
    // parts (their skew decreases toward lam). The target side may have more
    // nonzero negatives than work does; recruit spare zero coordinates.
    {
        std::vector<std::size_t> neg_coord;
        std::vector<double> sq;
        for (std::size_t i = 0; i < n; ++i) {
            if (work[i] < 0.0) {
                neg_coord.push_back(i);
                sq.push_back(work[i] * work[i]);
            }
        }
        std::size_t lam_neg_count = 0;
        for (double v : lam_neg2) lam_neg_count += v > 0.0 ? 1 : 0;
        for (std::size_t i = 0; i < n && neg_coord.size() < lam_neg_count; ++i) {
            if (work[i] == 0.0) {
                neg_coord.push_back(i);
                sq.push_back(0.0);
            }
        }
        std::vector<double> target(lam_neg2.begin(), lam_neg2.begin() + neg_coord.size());
        for (std::size_t iter = 0; iter <= 2 * n + 2; ++iter) {
            if (!robin_hood_move(sq, target, tol2)) break;
            for (std::size_t i = 0; i < neg_coord.size(); ++i) {
                work[neg_coord[i]] = -std::sqrt(sq[i]);
            }
            chain.steps.push_back(Spectrum(work));
        }
    }

    return chain;
}

} // namespace

MajorizationChain chain_frobenius(const Spectrum& mu, const Spectrum& lam) {
    if (!f_majorizes(mu, lam)) {
        throw std::invalid_argument("chain_frobenius: requires mu f-majorized by lam");
    }
    const std::size_t max_extra = std::max(mu.size(), lam.size()) + 2;
    for (std::size_t extra = 0; extra <= max_extra; ++extra) {
        try {
            return chain_frobenius_padded(mu, lam, extra);
        } catch (const NeedMorePadding&) {
            continue;
        }
    }
    throw std::logic_error("chain_frobenius: padding search exhausted");
}

std::optional<std::string> validate_chain(const MajorizationChain& chain,
                                          const Spectrum& mu, const Spectrum& lam) {
    if (chain.steps.empty()) return "chain has no steps";
    const std::size_t n = chain.steps.front().size();
    const bool classical = chain.order_kind == OrderKind::classical;

    auto matches = [&](const Spectrum& a, const Spectrum& b) {
        const std::size_t m = std::max(a.size(), b.size());
        const auto as = padded_sorted_desc(a, m);
        const auto bs = padded_sorted_desc(b, m);
        const double tol = 1e-10 * std::max(1.0, b.max_abs());
        for (std::size_t i = 0; i < m; ++i) {
            if (std::fabs(as[i] - bs[i]) > tol) return false;
        }
        return true;
    };
    if (!matches(chain.steps.front(), mu)) return "first step does not match mu";
    if (!matches(chain.steps.back(), lam)) return "last step does not match lam";

    const double scale = classical ? std::fabs(chain.steps.front().sum())
                                   : chain.steps.front().sum_squares();
    for (std::size_t s = 0; s + 1 < chain.steps.size(); ++s) {
        const auto& a = chain.steps[s];
        const auto& b = chain.steps[s + 1];
        if (a.size() != n || b.size() != n) return "step length changed";
        int changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (a.entries[i] != b.entries[i]) ++changed;
        }
        if (changed > 2) return "step changes more than two coordinates";
        if (classical) {
            if (std::fabs(a.sum() - b.sum()) > 1e-12 * std::max(scale, 1e-300)) {
                return "step does not conserve the sum";
            }
            if (!majorizes(a, b)) return "consecutive pair violates the classical order";
        } else {
            if (std::fabs(a.sum_squares() - b.sum_squares()) >
                1e-12 * std::max(scale, 1e-300)) {
                return "step does not conserve the sum of squares";
            }
            if (!f_majorizes(a, b)) return "consecutive pair violates the Frobenius order";
            // Moved pair must match one of the three enumerated sign forms.
            if (changed == 2) {
                double cur_j = 0, nxt_j = 0, cur_k = 0, nxt_k = 0;
                bool have_j = false;
                for (std::size_t i = 0; i < n; ++i) {
                    if (a.entries[i] == b.entries[i]) continue;
                    if (b.entries[i] > a.entries[i] && !have_j) {
                        cur_j = a.entries[i];
                        nxt_j = b.entries[i];
                        have_j = true;
                    } else {
                        cur_k = a.entries[i];
                        nxt_k = b.entries[i];
                    }
                }
                // Normalize so that (cur_j, nxt_j) is the coordinate whose
                // square grows.
                if (nxt_j * nxt_j - cur_j * cur_j < 0) {
                    std::swap(cur_j, cur_k);
                    std::swap(nxt_j, nxt_k);
                }
                const bool case1 = cur_k < nxt_k && nxt_k <= 0.0 && 0.0 <= cur_j && cur_j < nxt_j;
                const bool case2 = 0.0 <= nxt_k && nxt_k < cur_k && cur_k <= cur_j && cur_j < nxt_j;
                const bool case3 = cur_k < nxt_k && nxt_k <= nxt_j && nxt_j < cur_j && cur_j <= 0.0;
                if (!case1 && !case2 && !case3) {
                    return "step sign pattern matches none of the enumerated forms";
                }
            }
        }
    }
    return std::nullopt;
}

} // namespace tracetails
