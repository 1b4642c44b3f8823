#ifndef PMERGE_SPECFUN_HPP
#define PMERGE_SPECFUN_HPP

namespace pmerge {

class RandomStream;

namespace specfun {

/// Regularized lower incomplete gamma P(shape, x) = P(Gamma(shape, 1) <= x).
double reg_lower_gamma(double shape, double x);

/// Regularized upper incomplete gamma Q(shape, x) = 1 - P(shape, x).
double reg_upper_gamma(double shape, double x);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

/// I_x(a, b) with y = 1 - x supplied by a caller that knows it more
/// accurately than 1.0 - x would give.
double reg_inc_beta(double a, double b, double x, double y);

double normal_cdf(double x);

/// Inverse of normal_cdf on (0, 1) (Wichura's AS241, ~1e-16 relative).
double normal_quantile(double q);

/// Student-t CDF with df > 0 degrees of freedom. Integer df up to 64 use the
/// closed-form trigonometric sums; everything else goes through I_x(df/2, 1/2).
double student_t_cdf(double x, double df);

/// Student-t CDF evaluated only through the incomplete-beta identity.
double student_t_cdf_beta(double x, double df);

// The stable law S1 with tail index 1, skewness 1, unit scale and zero
// location, i.e. characteristic function
//     exp(-|u| (1 + i (2/pi) sign(u) log|u|)).

/// CDF of S1. Gil-Pelaez inversion of the characteristic function on the
/// bulk; the Zolotarev integral (non-oscillatory) in the far tails where the
/// inversion integrand oscillates too fast. Absolute error <= 1e-10.
double stable1_cdf(double x);

/// Gil-Pelaez route only. Valid for any finite x but slow for |x| >> 10.
double stable1_cdf_inversion(double x);

/// Zolotarev route only.
double stable1_cdf_zolotarev(double x);

/// Survival function 1 - F(x) without cancellation for large x.
double stable1_sf(double x);

/// Root of stable1_cdf(x) = q with |cdf(x) - q| <= 1e-8 (or bracket width at
/// machine resolution).
double stable1_quantile(double q);

/// One draw by the Chambers-Mallows-Stuck transform specialised to
/// alpha = 1, beta = 1:
///     X = (2/pi) [ (pi/2 + V) tan V - log( (pi/2) W cos V / (pi/2 + V) ) ]
/// with V ~ U(-pi/2, pi/2) and W ~ Exp(1). The log term is the alpha = 1
/// correction that makes the draw match the characteristic function above.
double stable1_sample(RandomStream& rng);

inline constexpr double euler_gamma = 0.5772156649015329;

} // namespace specfun
} // namespace pmerge

#endif // PMERGE_SPECFUN_HPP
