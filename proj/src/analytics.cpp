#include "pmerge/analytics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <omp.h>

#include "pmerge/error.hpp"
#include "pmerge/specfun.hpp"

namespace pmerge::analytics {

namespace {

void check_probability(double p, const char* where) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError(std::string(where) + ": p must lie in the open interval (0, 1)");
    }
}

// G_{1/b}(1/(p^{-b} - 1)) without domain checks.
double gamma_bound_raw(double b, double p) {
    const double a = 1.0 / b;
    const double exponent = -b * std::log(p);  // p^{-b} = e^exponent
    if (exponent > 700.0) {
        // x = 1/(e^L - 1) underflows; P(a, x) = x^a / Gamma(a + 1) (1 + O(x))
        return std::exp(-a * exponent - std::lgamma(a + 1.0));
    }
    return specfun::reg_lower_gamma(a, 1.0 / std::expm1(exponent));
}

double kappa_objective(double log_p, double b) {
    const double p = std::exp(log_p);
    return gamma_bound_raw(b, p) / p;
}

// Maximizes f on [lo, hi] by golden-section search; endpoints are included
// as candidates so a maximum on the boundary is returned exactly.
template <typename F>
std::pair<double, double> maximize_on(F f, double lo, double hi, double x_tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && (b - a) > x_tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    std::pair<double, double> best = fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
    for (double x : {lo, hi}) {
        const double fx = f(x);
        if (fx > best.second) best = {x, fx};
    }
    return best;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < points; ++i) {
        g[static_cast<std::size_t>(i)] = llo + (lhi - llo) * i / (points - 1);
    }
    g.back() = lhi;
    return g;
}

struct GridMax {
    std::size_t ip = 0;
    std::size_t ib = 0;
    double value = -1.0;
    bool decays_at_p_min = false;
    bool decays_at_b_max = false;
};

GridMax scan_grid(const std::vector<double>& log_p, const std::vector<double>& log_b, int workers) {
    const std::size_t np = log_p.size();
    const std::size_t nb = log_b.size();
    std::vector<double> values(np * nb);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(np); ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            values[static_cast<std::size_t>(i) * nb + j] =
                kappa_objective(log_p[static_cast<std::size_t>(i)], std::exp(log_b[j]));
        }
    }
    GridMax out;
    std::vector<double> row_max(np, -1.0);
    std::vector<double> col_max(nb, -1.0);
    for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            const double v = values[i * nb + j];
            row_max[i] = std::max(row_max[i], v);
            col_max[j] = std::max(col_max[j], v);
            if (v > out.value) out = GridMax{i, j, v, false, false};
        }
    }
    // Towards p -> 0 the objective flattens onto 1/Gamma(1 + 1/b), so the
    // decay there is below double resolution; accept a flat edge as long as
    // it stays under the interior maximum.
    const double slack = 1e-12 * out.value;
    out.decays_at_p_min = out.ip > 0 && row_max[0] <= row_max[1] + slack && row_max[0] < out.value - slack;
    out.decays_at_b_max =
        out.ib + 1 < nb && col_max[nb - 1] <= col_max[nb - 2] + slack && col_max[nb - 1] < out.value - slack;
    return out;
}

} // namespace

double clamp_probability(double value) {
    assert(value >= -1e-12 && value <= 1.0 + 1e-12);
    return std::clamp(value, 0.0, 1.0);
}

double clayton_exact_cdf(int n, double r, double p) {
    if (n < 1) throw DomainError("clayton_exact_cdf: n must be >= 1");
    if (!(r >= 1.0) || !std::isfinite(r)) throw DomainError("clayton_exact_cdf: r must be finite and >= 1");
    check_probability(p, "clayton_exact_cdf");
    // 1 - I_x(n, 1/r) = I_{1-x}(1/r, n) with 1 - x = 1 / (n p^{-r} - n + 1)
    const double denom = static_cast<double>(n) * std::expm1(-r * std::log(p)) + 1.0;
    return clamp_probability(specfun::reg_inc_beta(1.0 / r, static_cast<double>(n), 1.0 / denom, (denom - 1.0) / denom));
}

double clayton_gamma_bound(double t, double p) {
    if (!(t >= 1.0) || !std::isfinite(t)) throw DomainError("clayton_gamma_bound: t must be finite and >= 1");
    check_probability(p, "clayton_gamma_bound");
    return clamp_probability(gamma_bound_raw(t, p));
}

SupBound clayton_sup_bound_search(double p) {
    check_probability(p, "clayton_sup_bound");
    const auto grid = log_grid(1.0, 200.0, 401);
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double v = gamma_bound_raw(std::exp(grid[j]), p);
        if (v > best_value) {
            best_value = v;
            best = j;
        }
    }
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    const auto [log_b, value] =
        maximize_on([p](double lb) { return gamma_bound_raw(std::exp(lb), p); }, lo, hi, 1e-12);
    return {clamp_probability(value), std::exp(log_b)};
}

double clayton_sup_bound(double p) { return clayton_sup_bound_search(p).value; }

KappaResult kappa_constant(const KappaOptions& options) {
    if (!(options.p_min > 0.0 && options.p_min < options.p_max && options.p_max < 1.0)) {
        throw DomainError("kappa_constant: need 0 < p_min < p_max < 1");
    }
    if (!(options.b_max > 1.0) || options.p_points < 3 || options.b_points < 3) {
        throw DomainError("kappa_constant: need b_max > 1 and at least 3 grid points per axis");
    }
    double p_min = options.p_min;
    double b_max = options.b_max;
    for (int attempt = 0; attempt < 6; ++attempt) {
        const auto log_p = log_grid(p_min, options.p_max, options.p_points);
        const auto log_b = log_grid(1.0, b_max, options.b_points);
        const GridMax g = scan_grid(log_p, log_b, options.workers);
        if (!g.decays_at_p_min || !g.decays_at_b_max) {
            if (!g.decays_at_p_min) p_min *= 1e-3;
            if (!g.decays_at_b_max) b_max *= 4.0;
            continue;
        }

        // coordinate descent in (log p, log b) inside the neighbouring cells
        const double lp_lo = log_p[g.ip == 0 ? 0 : g.ip - 1];
        const double lp_hi = log_p[std::min(g.ip + 1, log_p.size() - 1)];
        const double lb_lo = log_b[g.ib == 0 ? 0 : g.ib - 1];
        const double lb_hi = log_b[std::min(g.ib + 1, log_b.size() - 1)];
        double lp = log_p[g.ip];
        double lb = log_b[g.ib];
        double value = g.value;
        for (int sweep = 0; sweep < 100; ++sweep) {
            const double before = value;
            const auto rb = maximize_on([lp](double x) { return kappa_objective(lp, std::exp(x)); },
                                        lb_lo, lb_hi, 1e-12);
            if (rb.second >= value) {
                lb = rb.first;
                value = rb.second;
            }
            const auto rp = maximize_on([lb](double x) { return kappa_objective(x, std::exp(lb)); },
                                        lp_lo, lp_hi, 1e-12);
            if (rp.second >= value) {
                lp = rp.first;
                value = rp.second;
            }
            if (value - before <= 1e-15) break;
        }
        return {value, std::exp(lp), std::exp(lb), p_min, b_max};
    }
    throw AccuracyError("kappa_constant: objective does not decay towards the search boundary",
                        p_min);
}

double clayton_threshold(double p) {
    check_probability(p, "clayton_threshold");
    return p / (1.0 + p);
}

double clayton_threshold_kappa(double p) {
    check_probability(p, "clayton_threshold_kappa");
    if (p > 0.1) throw DomainError("clayton_threshold_kappa: guarantee only holds for p <= 0.1");
    return p / 1.131;
}

double asymptotic_threshold(int n, double p) {
    if (n < 2) throw DomainError("asymptotic_threshold: n must be >= 2");
    check_probability(p, "asymptotic_threshold");
    const double pi = std::numbers::pi;
    const double denom = 0.5 * pi * specfun::stable1_quantile(1.0 - p) + std::log(n * pi / 2.0) + 1.0 -
                         specfun::euler_gamma;
    if (!(denom > 0.0)) {
        throw DomainError("asymptotic_threshold: large-n form is not positive for n = " + std::to_string(n) +
                          " at this p (small n with large p); use a Monte Carlo threshold instead");
    }
    return 1.0 / denom;
}

double discrete_pm(int n, int m, double r, double p) {
    if (n < 1) throw DomainError("discrete_pm: n must be >= 1");
    if (m < 2) throw DomainError("discrete_pm: m must be >= 2");
    if (!(r <= -1.0) || !std::isfinite(r)) throw DomainError("discrete_pm: r must be finite and <= -1");
    check_probability(p, "discrete_pm");
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    if (!(mm > std::pow(nn, -1.0 / r) / p)) return 0.0;
    const double inner = nn * std::pow(p, r) - (nn - 1.0) * std::pow((mm + 1.0) / mm, r);
    const double base = std::pow(inner, 1.0 / r) - 1.0 / mm;
    if (!(inner > 0.0 && base > 0.0)) return 0.0;
    const double value = p - std::pow(p, 1.0 - r) / mm * std::pow(base, r - 1.0);
    return std::clamp(value, 0.0, p);
}

} // namespace pmerge::analytics
