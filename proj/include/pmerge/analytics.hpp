#ifndef PMERGE_ANALYTICS_HPP
#define PMERGE_ANALYTICS_HPP

namespace pmerge::analytics {

/// P(M_{-r}(U_1..U_n) <= p) for U from a Clayton(r) copula (closed form via
/// the regularized incomplete beta function). Requires n >= 1, r >= 1.
double clayton_exact_cdf(int n, double r, double p);

/// G_{1/t}(1/(p^{-t} - 1)), G_a the Gamma(a, 1) CDF. Upper bound on
/// P(M^w_{-s} <= p) under Clayton(t) for 1 <= s <= t, any n and weights.
double clayton_gamma_bound(double t, double p);

/// sup over b >= 1 of clayton_gamma_bound(b, p).
struct SupBound {
    double value = 0.0;
    double b = 1.0;
};
SupBound clayton_sup_bound_search(double p);
double clayton_sup_bound(double p);

struct KappaResult {
    double kappa = 0.0;
    double p_star = 0.0;
    double b_star = 0.0;
    /// Search rectangle actually used (widened if the objective failed to
    /// decay towards a truncated edge).
    double p_min = 0.0;
    double b_max = 0.0;
};

struct KappaOptions {
    double p_min = 1e-6;
    double p_max = 0.1;
    double b_max = 100.0;
    int p_points = 241;
    int b_points = 241;
    /// OpenMP threads for the grid; 0 leaves the runtime default. The result
    /// does not depend on it.
    int workers = 0;
};

/// sup over p in (0, p_max], b >= 1 of (1/p) G_{1/b}(1/(p^{-b} - 1)).
KappaResult kappa_constant(const KappaOptions& options = {});

/// p / (1 + p).
double clayton_threshold(double p);

/// p / 1.131; only for p <= 0.1.
double clayton_threshold_kappa(double p);

/// ((pi/2) S1^{-1}(1 - p) + log(n pi / 2) + 1 - gamma)^{-1}, the large-n
/// p-quantile of the equal-weight harmonic mean of n independent uniforms.
/// Throws DomainError when the bracket is not positive.
double asymptotic_threshold(int n, double p);

/// Lower bound p_m on P(M_r <= p) for p-values discretized to {1/m..m/m},
/// r <= -1; zero until m > n^{-1/r} / p.
double discrete_pm(int n, int m, double r, double p);

/// Clamps a probability to [0, 1] after asserting (in debug builds) that it
/// lies within 1e-12 of that range.
double clamp_probability(double value);

} // namespace pmerge::analytics

#endif // PMERGE_ANALYTICS_HPP
