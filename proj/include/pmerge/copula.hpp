#ifndef PMERGE_COPULA_HPP
#define PMERGE_COPULA_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace pmerge {

class RandomStream;
class CopulaModel;

using ModelPtr = std::shared_ptr<const CopulaModel>;

namespace copula {

struct Independence {
    int n = 1;
};

struct Comonotone {
    int n = 1;
};

/// X_i = rho Z + sqrt(1 - rho^2) Z_i, U_i = Phi(X_i). `rho` is the mixing
/// coefficient; the pairwise correlation of the X_i is rho^2.
struct GaussEquicorr {
    int n = 1;
    double rho = 0.0;

    /// Construct from a target pairwise correlation c in [0, 1] (rho = sqrt(c)).
    static GaussEquicorr with_pairwise_correlation(int n, double correlation);
};

/// Equicorrelated normal vector with pairwise correlation `rho`, divided by
/// sqrt(chi2_df / df) and mapped through the Student-t CDF.
struct TEquicorr {
    int n = 1;
    double rho = 0.0;
    double df = 4.0;
};

/// Clayton(t) via the gamma-frailty construction
/// U_i = (1 + X_i / Y)^(-1/t), X_i ~ Exp(1), Y ~ Gamma(1/t, 1).
struct Clayton {
    int n = 1;
    double t = 1.0;
};

/// Symmetric n-variate Gumbel copula, sampled by Marshall-Olkin with a
/// positive-stable(1/theta) frailty.
struct Gumbel {
    int n = 1;
    double theta = 1.0;
};

/// U_j = U for j in J, 1 - U otherwise. Indices are 1-based; after validation
/// J is sorted and contains 1.
struct Extremal {
    int n = 1;
    std::vector<int> J;
};

struct ExtremalComponent {
    std::vector<int> J;
    double weight = 0.0;
};

/// Sparse mixture of extremal copulas.
struct ExtremalMixture {
    int n = 1;
    std::vector<ExtremalComponent> components;
};

/// U_i = 1{X <= beta} Z_i + 1{X > beta} Y with X ~ U(0,1), Z_i ~ U(0,beta),
/// Y ~ U(beta,1). Pairwise correlation 1 - beta^3.
struct BlockExampleA {
    int n = 1;
    double beta = 0.5;
};

/// U_i = 1{X_i <= beta} Z + 1{X_i > beta} Y_i. Pairwise correlation beta^4.
struct BlockExampleB {
    int n = 1;
    double beta = 0.5;
};

struct MixtureComponent {
    ModelPtr model;
    double weight = 0.0;
};

/// Convex combination of equal-dimension models.
struct Mixture {
    std::vector<MixtureComponent> components;
};

/// Independent concatenation of the factors' vectors.
struct Product {
    std::vector<ModelPtr> factors;
};

/// Coordinate k of `base` repeated sizes[k] times.
struct ComonotoneGroups {
    ModelPtr base;
    std::vector<int> sizes;
};

/// ceil(m v) / m applied coordinate-wise to a draw v of `base`.
struct Discretized {
    ModelPtr base;
    int m = 2;
};

} // namespace copula

/// Dependence model for n standard-uniform p-values.
class CopulaModel {
public:
    using Variant =
        std::variant<copula::Independence, copula::Comonotone, copula::GaussEquicorr,
                     copula::TEquicorr, copula::Clayton, copula::Gumbel, copula::Extremal,
                     copula::ExtremalMixture, copula::BlockExampleA, copula::BlockExampleB,
                     copula::Mixture, copula::Product, copula::ComonotoneGroups,
                     copula::Discretized>;

    template <typename T>
        requires(!std::is_same_v<std::decay_t<T>, CopulaModel> &&
                 std::is_constructible_v<Variant, T>)
    CopulaModel(T alternative) : variant_(std::move(alternative)) {}

    const Variant& variant() const noexcept { return variant_; }

    template <typename T>
    const T* get_if() const noexcept {
        return std::get_if<T>(&variant_);
    }

    std::size_t dimension() const;

    /// Short label, e.g. "clayton(n=5,t=1)".
    std::string describe() const;

private:
    Variant variant_;
};

template <typename T>
ModelPtr make_model(T alternative) {
    return std::make_shared<const CopulaModel>(std::move(alternative));
}

/// Checks every parameter and returns the canonical model: extremal index
/// sets contain 1 and are sorted, mixture weights within 1e-9 of summing to
/// 1 are rescaled onto the simplex. Throws DomainError or ShapeError.
CopulaModel validate(const CopulaModel& model);

/// Per-worker sampler compiled from a model. Owns scratch buffers, so one
/// instance must not be shared between threads; the model itself may be.
class Sampler {
public:
    explicit Sampler(const CopulaModel& model);
    ~Sampler();
    Sampler(Sampler&&) noexcept;
    Sampler& operator=(Sampler&&) noexcept;

    std::size_t dimension() const noexcept { return dimension_; }

    /// Writes one joint draw into out (size must equal dimension()).
    void draw(RandomStream& rng, std::span<double> out);

    struct Node;

private:
    std::unique_ptr<Node> root_;
    std::size_t dimension_;
};

/// One joint draw (convenience; builds a Sampler per call).
std::vector<double> sample(const CopulaModel& model, RandomStream& rng);

/// Kendall's tau-a of coordinates (i, j) (0-based) over `reps` draws,
/// computed with Knight's O(reps log reps) algorithm. Requires reps >= 1000.
double kendall_tau_empirical(const CopulaModel& model, std::pair<std::size_t, std::size_t> pair,
                             std::size_t reps, RandomStream& rng);

/// Kendall's tau-a of paired observations (ties count as neither concordant
/// nor discordant).
double kendall_tau(std::span<const double> x, std::span<const double> y);

} // namespace pmerge

#endif // PMERGE_COPULA_HPP
