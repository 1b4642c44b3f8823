#ifndef PMERGE_MERGE_HPP
#define PMERGE_MERGE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pmerge {

/// A point of the unit simplex: entries in [0, 1] summing to 1 (within 1e-12).
class Weights {
public:
    /// Validates; throws DomainError on a bad entry or sum.
    explicit Weights(std::vector<double> values);

    /// Accepts a sum within `tolerance` of 1 and rescales it exactly onto the simplex.
    static Weights normalized(std::vector<double> values, double tolerance);

    static Weights equal(std::size_t n);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    /// True iff every entry is strictly positive.
    bool interior() const noexcept { return interior_; }

private:
    std::vector<double> values_;
    bool interior_ = false;
};

/// Observed p-values, every entry in the open interval (0, 1).
class PValues {
public:
    explicit PValues(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

/// Weighted power mean (sum_i w_i u_i^r)^(1/r); r = 0 is the weighted
/// geometric mean. Absent weights mean the symmetric mean of whatever length
/// the input has.
struct RMean {
    double r = -1.0;
    std::optional<Weights> weights;
};

/// min_i n u_(i) / i over the ascending order statistics.
struct Simes {};

/// g^{-1}(sum_i w_i g(u_i)) with g the standard Cauchy quantile.
struct CauchyCombination {
    std::optional<Weights> weights;
};

using MergeStatistic = std::variant<RMean, Simes, CauchyCombination>;

double r_mean(const RMean& stat, const PValues& p);
double simes(const PValues& p);
double cauchy_combine(const CauchyCombination& stat, const PValues& p);
double merge(const MergeStatistic& stat, const PValues& p);

/// Short human-readable name, e.g. "rmean(r=-1)".
std::string describe(const MergeStatistic& stat);

/// A statistic bound to a fixed dimension with its weights resolved, for
/// evaluation in tight loops. evaluate() does no validation, accepts entries
/// in (0, 1] (discretized p-values reach 1) and may reorder its input.
class BoundStatistic {
public:
    /// Throws ShapeError when explicit weights do not have length n.
    BoundStatistic(const MergeStatistic& stat, std::size_t n);

    std::size_t dimension() const noexcept { return n_; }
    double evaluate(std::span<double> u) const;

private:
    enum class Kind { harmonic_equal, geometric, power, simes, cauchy };
    Kind kind_;
    std::size_t n_;
    double r_ = 0.0;
    std::vector<double> weights_;
};

namespace detail {

// Unchecked kernels shared by the validated API and BoundStatistic.
double power_mean(double r, std::span<const double> w, std::span<const double> u);
double harmonic_mean_equal(std::span<const double> u);
double simes_in_place(std::span<double> u);
double cauchy_mean(std::span<const double> w, std::span<const double> u);

double cauchy_quantile(double u);
double cauchy_cdf(double x);

} // namespace detail

} // namespace pmerge

#endif // PMERGE_MERGE_HPP
