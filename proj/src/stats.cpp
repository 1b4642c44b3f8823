#include "pmerge/stats.hpp"

#include <algorithm>
#include <cmath>

#include "pmerge/error.hpp"
#include "pmerge/specfun.hpp"

namespace pmerge::stats {

namespace {

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
}

// sqrt(-log(alpha / 2) / 2), the limiting Kolmogorov quantile.
double kolmogorov_quantile(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("KS significance must lie in (0, 1)");
    return std::sqrt(-0.5 * std::log(0.5 * alpha));
}

} // namespace

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double level) {
    check_level(level);
    if (trials == 0) throw DomainError("wilson_interval: no trials");
    if (successes > trials) throw DomainError("wilson_interval: successes exceed trials");
    const double z = specfun::normal_quantile(0.5 + 0.5 * level);
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2n = z * z / n;
    const double centre = (phat + 0.5 * z2n) / (1.0 + z2n);
    const double half = z / (1.0 + z2n) * std::sqrt(phat * (1.0 - phat) / n + 0.25 * z2n / n);
    Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    // the score interval always contains the point estimate; enforce it
    // against rounding at the boundaries
    out.low = std::min(out.low, phat);
    out.high = std::max(out.high, phat);
    return out;
}

double binomial_cdf(std::uint64_t k, std::uint64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial_cdf: p outside [0, 1]");
    if (k >= n) return 1.0;
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;
    // P(X <= k) = I_{1-p}(n - k, k + 1)
    return specfun::reg_inc_beta(static_cast<double>(n - k), static_cast<double>(k) + 1.0, 1.0 - p, p);
}

RankInterval quantile_rank_interval(std::uint64_t n, double p, double level) {
    check_level(level);
    if (n == 0) throw DomainError("quantile_rank_interval: empty sample");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile_rank_interval: p outside (0, 1)");
    const double tail = 0.5 * (1.0 - level);

    // smallest k in [0, n] with binomial_cdf(k) >= target (monotone in k)
    auto first_at_least = [&](double target) {
        std::uint64_t lo = 0;
        std::uint64_t hi = n;
        while (lo < hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            if (binomial_cdf(mid, n, p) >= target) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        return lo;
    };

    // P(X_(l) <= q) = P(B >= l) = 1 - cdf(l - 1); keep it >= 1 - tail, i.e.
    // cdf(l - 1) <= tail. Largest such l.
    const std::uint64_t k_low = first_at_least(tail);
    std::uint64_t lo = binomial_cdf(k_low, n, p) <= tail ? k_low + 1 : k_low;
    lo = std::clamp<std::uint64_t>(lo, 1, n);
    // P(X_(u) >= q) = cdf(u - 1) >= 1 - tail. Smallest such u.
    const std::uint64_t hi = std::clamp<std::uint64_t>(first_at_least(1.0 - tail) + 1, 1, n);
    return {lo, hi};
}

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    if (sorted.empty()) throw DomainError("ks_statistic: empty sample");
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical(std::size_t n, double alpha) {
    const double rn = std::sqrt(static_cast<double>(n));
    return kolmogorov_quantile(alpha) / (rn + 0.12 + 0.11 / rn);
}

double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha) {
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return kolmogorov_quantile(alpha) * std::sqrt((nn + mm) / (nn * mm));
}

} // namespace pmerge::stats
