#ifndef PMERGE_QUADRATURE_HPP
#define PMERGE_QUADRATURE_HPP

#include <functional>

namespace pmerge::quad {

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
};

// Globally adaptive 15-point Gauss-Kronrod on [a, b]. Subdivides the panel
// with the largest error estimate until the summed estimate drops below
// max(abs_tol, rel_tol*|value|). Throws AccuracyError after max_intervals.
Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol = 0.0, int max_intervals = 4000);

} // namespace pmerge::quad

#endif // PMERGE_QUADRATURE_HPP
