#ifndef PMERGE_STATS_HPP
#define PMERGE_STATS_HPP

#include <cstdint>
#include <functional>
#include <span>

namespace pmerge::stats {

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

/// Two-sided Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double level);

/// P(X <= k) for X ~ Binomial(n, p).
double binomial_cdf(std::uint64_t k, std::uint64_t n, double p);

/// 1-based order-statistic ranks (lo, hi) such that
/// P(X_(lo) <= q_p <= X_(hi)) >= level for n iid draws, computed from the
/// exact binomial distribution.
struct RankInterval {
    std::uint64_t lo = 1;
    std::uint64_t hi = 1;
};
RankInterval quantile_rank_interval(std::uint64_t n, double p, double level);

/// sup |F_n - F| of an ascending sample against a continuous CDF.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// sup |F_n - G_m| between two ascending samples.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic one-sample critical value at significance alpha, with
/// Stephens' finite-n correction.
double ks_critical(std::size_t n, double alpha);

/// Asymptotic two-sample critical value at significance alpha.
double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha);

} // namespace pmerge::stats

#endif // PMERGE_STATS_HPP
