#include "pmerge/copula.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pmerge/error.hpp"
#include "pmerge/merge.hpp"
#include "pmerge/random.hpp"
#include "pmerge/specfun.hpp"

namespace pmerge {

using namespace copula;

GaussEquicorr GaussEquicorr::with_pairwise_correlation(int n, double correlation) {
    if (!(correlation >= 0.0 && correlation <= 1.0)) {
        throw DomainError("gauss: pairwise correlation must lie in [0, 1]");
    }
    return {n, std::sqrt(correlation)};
}

// ---------------------------------------------------------------------------
// dimension / describe

std::size_t CopulaModel::dimension() const {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Mixture>) {
                return m.components.empty() ? 0 : m.components.front().model->dimension();
            } else if constexpr (std::is_same_v<T, Product>) {
                std::size_t total = 0;
                for (const auto& f : m.factors) total += f->dimension();
                return total;
            } else if constexpr (std::is_same_v<T, ComonotoneGroups>) {
                return std::accumulate(m.sizes.begin(), m.sizes.end(), std::size_t{0});
            } else if constexpr (std::is_same_v<T, Discretized>) {
                return m.base->dimension();
            } else {
                return static_cast<std::size_t>(m.n);
            }
        },
        variant_);
}

namespace {

std::string join_indices(const std::vector<int>& J) {
    std::string s;
    for (std::size_t i = 0; i < J.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(J[i]);
    }
    return s;
}

} // namespace

std::string CopulaModel::describe() const {
    std::ostringstream os;
    os.precision(12);
    std::visit(
        [&os](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Independence>) {
                os << "indep(n=" << m.n << ")";
            } else if constexpr (std::is_same_v<T, Comonotone>) {
                os << "comonotone(n=" << m.n << ")";
            } else if constexpr (std::is_same_v<T, GaussEquicorr>) {
                os << "gauss(n=" << m.n << ",rho=" << m.rho << ")";
            } else if constexpr (std::is_same_v<T, TEquicorr>) {
                os << "t(n=" << m.n << ",rho=" << m.rho << ",df=" << m.df << ")";
            } else if constexpr (std::is_same_v<T, Clayton>) {
                os << "clayton(n=" << m.n << ",t=" << m.t << ")";
            } else if constexpr (std::is_same_v<T, Gumbel>) {
                os << "gumbel(n=" << m.n << ",theta=" << m.theta << ")";
            } else if constexpr (std::is_same_v<T, Extremal>) {
                os << "extremal(n=" << m.n << ",J=" << join_indices(m.J) << ")";
            } else if constexpr (std::is_same_v<T, ExtremalMixture>) {
                os << "exmix(n=" << m.n << ",comp=";
                for (std::size_t i = 0; i < m.components.size(); ++i) {
                    if (i) os << "+";
                    os << "(" << join_indices(m.components[i].J) << ")@" << m.components[i].weight;
                }
                os << ")";
            } else if constexpr (std::is_same_v<T, BlockExampleA>) {
                os << "exA(n=" << m.n << ",beta=" << m.beta << ")";
            } else if constexpr (std::is_same_v<T, BlockExampleB>) {
                os << "exB(n=" << m.n << ",beta=" << m.beta << ")";
            } else if constexpr (std::is_same_v<T, Mixture>) {
                os << "mix(";
                for (std::size_t i = 0; i < m.components.size(); ++i) {
                    if (i) os << " + ";
                    os << m.components[i].weight << "*" << m.components[i].model->describe();
                }
                os << ")";
            } else if constexpr (std::is_same_v<T, Product>) {
                os << "prod(";
                for (std::size_t i = 0; i < m.factors.size(); ++i) {
                    if (i) os << " | ";
                    os << m.factors[i]->describe();
                }
                os << ")";
            } else if constexpr (std::is_same_v<T, ComonotoneGroups>) {
                os << "groups(" << m.base->describe() << "; sizes=";
                for (std::size_t i = 0; i < m.sizes.size(); ++i) os << (i ? "," : "") << m.sizes[i];
                os << ")";
            } else {
                os << "disc(m=" << m.m << "; " << m.base->describe() << ")";
            }
        },
        variant_);
    return os.str();
}

// ---------------------------------------------------------------------------
// validation

namespace {

constexpr double kMixtureWeightTolerance = 1e-9;

void check_n(int n, const char* name) {
    if (n < 1) throw DomainError(std::string(name) + ": n must be >= 1");
}

// Sorted, deduplicated J containing 1; J and its complement describe the
// same copula because U and 1 - U are both uniform.
std::vector<int> canonical_index_set(std::vector<int> J, int n, const char* name) {
    std::sort(J.begin(), J.end());
    if (std::adjacent_find(J.begin(), J.end()) != J.end()) {
        throw DomainError(std::string(name) + ": repeated index in J");
    }
    for (int j : J) {
        if (j < 1 || j > n) {
            throw DomainError(std::string(name) + ": index " + std::to_string(j) +
                              " outside 1.." + std::to_string(n));
        }
    }
    if (!J.empty() && J.front() == 1) return J;
    std::vector<int> complement;
    for (int j = 1; j <= n; ++j) {
        if (!std::binary_search(J.begin(), J.end(), j)) complement.push_back(j);
    }
    return complement;
}

ModelPtr validated(const ModelPtr& model, const char* context) {
    if (!model) throw DomainError(std::string(context) + ": missing component model");
    return std::make_shared<const CopulaModel>(validate(*model));
}

std::string number(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

CopulaModel validate(const CopulaModel& model) {
    return std::visit(
        [](const auto& raw) -> CopulaModel {
            using T = std::decay_t<decltype(raw)>;
            T m = raw;
            if constexpr (std::is_same_v<T, Independence>) {
                check_n(m.n, "indep");
            } else if constexpr (std::is_same_v<T, Comonotone>) {
                check_n(m.n, "comonotone");
            } else if constexpr (std::is_same_v<T, GaussEquicorr>) {
                check_n(m.n, "gauss");
                if (!(m.rho >= 0.0 && m.rho <= 1.0)) {
                    throw DomainError("gauss: rho = " + number(m.rho) + " outside [0, 1]");
                }
            } else if constexpr (std::is_same_v<T, TEquicorr>) {
                check_n(m.n, "t");
                if (!(m.rho >= 0.0 && m.rho <= 1.0)) {
                    throw DomainError("t: rho = " + number(m.rho) + " outside [0, 1]");
                }
                if (!(m.df > 0.0) || !std::isfinite(m.df)) {
                    throw DomainError("t: df = " + number(m.df) + " must be finite and > 0");
                }
            } else if constexpr (std::is_same_v<T, Clayton>) {
                check_n(m.n, "clayton");
                if (!(m.t > 0.0) || !std::isfinite(m.t)) {
                    throw DomainError("clayton: t = " + number(m.t) + " must be finite and > 0");
                }
            } else if constexpr (std::is_same_v<T, Gumbel>) {
                check_n(m.n, "gumbel");
                if (!(m.theta >= 1.0) || !std::isfinite(m.theta)) {
                    throw DomainError("gumbel: theta = " + number(m.theta) + " must be finite and >= 1");
                }
            } else if constexpr (std::is_same_v<T, Extremal>) {
                check_n(m.n, "extremal");
                m.J = canonical_index_set(m.J, m.n, "extremal");
            } else if constexpr (std::is_same_v<T, ExtremalMixture>) {
                check_n(m.n, "exmix");
                if (m.components.empty()) throw DomainError("exmix: no components");
                std::vector<double> w;
                for (auto& c : m.components) {
                    c.J = canonical_index_set(c.J, m.n, "exmix");
                    w.push_back(c.weight);
                }
                const Weights normalized = Weights::normalized(w, kMixtureWeightTolerance);
                for (std::size_t i = 0; i < w.size(); ++i) m.components[i].weight = normalized[i];
            } else if constexpr (std::is_same_v<T, BlockExampleA> || std::is_same_v<T, BlockExampleB>) {
                check_n(m.n, "block example");
                if (!(m.beta > 0.0 && m.beta < 1.0)) {
                    throw DomainError("block example: beta = " + number(m.beta) + " outside (0, 1)");
                }
            } else if constexpr (std::is_same_v<T, Mixture>) {
                if (m.components.empty()) throw DomainError("mix: no components");
                std::vector<double> w;
                for (auto& c : m.components) {
                    c.model = validated(c.model, "mix");
                    w.push_back(c.weight);
                }
                const std::size_t dim = m.components.front().model->dimension();
                for (const auto& c : m.components) {
                    if (c.model->dimension() != dim) {
                        throw ShapeError("mix: component dimensions " + std::to_string(dim) +
                                         " and " + std::to_string(c.model->dimension()) + " differ");
                    }
                }
                const Weights normalized = Weights::normalized(w, kMixtureWeightTolerance);
                for (std::size_t i = 0; i < w.size(); ++i) m.components[i].weight = normalized[i];
            } else if constexpr (std::is_same_v<T, Product>) {
                if (m.factors.empty()) throw DomainError("prod: no factors");
                for (auto& f : m.factors) f = validated(f, "prod");
            } else if constexpr (std::is_same_v<T, ComonotoneGroups>) {
                m.base = validated(m.base, "groups");
                if (m.base->dimension() != m.sizes.size()) {
                    throw ShapeError("groups: base has dimension " + std::to_string(m.base->dimension()) +
                                     " but " + std::to_string(m.sizes.size()) + " group sizes were given");
                }
                for (int s : m.sizes) {
                    if (s < 1) throw DomainError("groups: sizes must be >= 1");
                }
            } else {
                m.base = validated(m.base, "disc");
                if (m.m < 2) throw DomainError("disc: m = " + std::to_string(m.m) + " must be >= 2");
            }
            return CopulaModel(std::move(m));
        },
        model.variant());
}

// ---------------------------------------------------------------------------
// samplers

struct Sampler::Node {
    virtual ~Node() = default;
    virtual void draw(RandomStream& rng, std::span<double> out) = 0;
};

namespace {

using Node = Sampler::Node;
using NodePtr = std::unique_ptr<Node>;

constexpr double kPi = std::numbers::pi;

NodePtr build(const CopulaModel& model);

// log(1 + e^z) without overflow.
inline double softplus(double z) { return z > 35.0 ? z : std::log1p(std::exp(z)); }

struct IndependenceNode final : Node {
    void draw(RandomStream& rng, std::span<double> out) override {
        for (double& u : out) u = rng.uniform();
    }
};

struct ComonotoneNode final : Node {
    void draw(RandomStream& rng, std::span<double> out) override {
        std::fill(out.begin(), out.end(), rng.uniform());
    }
};

struct GaussNode final : Node {
    explicit GaussNode(const GaussEquicorr& m) : common(m.rho), own(std::sqrt(1.0 - m.rho * m.rho)) {}
    void draw(RandomStream& rng, std::span<double> out) override {
        const double z = rng.normal();
        for (double& u : out) u = specfun::normal_cdf(common * z + own * rng.normal());
    }
    double common, own;
};

struct TNode final : Node {
    explicit TNode(const TEquicorr& m)
        : common(std::sqrt(m.rho)), own(std::sqrt(1.0 - m.rho)), df(m.df) {}
    void draw(RandomStream& rng, std::span<double> out) override {
        const double z = rng.normal();
        const double chi2 = 2.0 * rng.gamma_variate(0.5 * df);
        const double inv_scale = 1.0 / std::sqrt(chi2 / df);
        for (double& u : out) {
            u = specfun::student_t_cdf((common * z + own * rng.normal()) * inv_scale, df);
        }
    }
    double common, own, df;
};

struct ClaytonNode final : Node {
    explicit ClaytonNode(const Clayton& m) : shape(1.0 / m.t), inv_t(1.0 / m.t) {}
    void draw(RandomStream& rng, std::span<double> out) override {
        const double log_frailty = rng.log_gamma_variate(shape);
        if (log_frailty > -600.0) {
            const double inv_frailty = std::exp(-log_frailty);
            for (double& u : out) u = std::exp(-inv_t * std::log1p(rng.exponential() * inv_frailty));
            return;
        }
        for (double& u : out) {
            const double log_ratio = std::log(rng.exponential()) - log_frailty;
            u = std::exp(-inv_t * softplus(log_ratio));
        }
    }
    double shape, inv_t;
};

struct GumbelNode final : Node {
    explicit GumbelNode(const Gumbel& m) : alpha(1.0 / m.theta) {}
    void draw(RandomStream& rng, std::span<double> out) override {
        // Kanter's representation of the positive stable law with Laplace
        // transform exp(-s^alpha).
        double log_frailty = 0.0;
        if (alpha < 1.0) {
            const double angle = kPi * rng.uniform();
            const double e = rng.exponential();
            log_frailty = std::log(std::sin(alpha * angle)) - std::log(std::sin(angle)) / alpha +
                          (1.0 - alpha) / alpha * (std::log(std::sin((1.0 - alpha) * angle)) - std::log(e));
        }
        for (double& u : out) {
            u = std::exp(-std::exp(alpha * (std::log(rng.exponential()) - log_frailty)));
        }
    }
    double alpha;
};

struct ExtremalNode final : Node {
    ExtremalNode(int n, const std::vector<int>& J) : in_set(static_cast<std::size_t>(n), false) {
        for (int j : J) in_set[static_cast<std::size_t>(j - 1)] = true;
    }
    void draw(RandomStream& rng, std::span<double> out) override { fill(rng.uniform(), out); }
    void fill(double u, std::span<double> out) const {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = in_set[j] ? u : 1.0 - u;
    }
    std::vector<bool> in_set;
};

// Picks index k with probability weights[k] from cumulative sums.
class Selector {
public:
    explicit Selector(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) cumulative_.push_back(total += w);
        cumulative_.back() = 1.0;
    }
    std::size_t pick(RandomStream& rng) const {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                     cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
};

struct ExtremalMixtureNode final : Node {
    explicit ExtremalMixtureNode(const ExtremalMixture& m) : selector(weights_of(m)) {
        for (const auto& c : m.components) members.emplace_back(m.n, c.J);
    }
    static std::vector<double> weights_of(const ExtremalMixture& m) {
        std::vector<double> w;
        for (const auto& c : m.components) w.push_back(c.weight);
        return w;
    }
    void draw(RandomStream& rng, std::span<double> out) override {
        members[selector.pick(rng)].fill(rng.uniform(), out);
    }
    Selector selector;
    std::vector<ExtremalNode> members;
};

struct BlockANode final : Node {
    explicit BlockANode(double b) : beta(b) {}
    void draw(RandomStream& rng, std::span<double> out) override {
        if (rng.uniform() <= beta) {
            for (double& u : out) u = beta * rng.uniform();
        } else {
            std::fill(out.begin(), out.end(), beta + (1.0 - beta) * rng.uniform());
        }
    }
    double beta;
};

struct BlockBNode final : Node {
    explicit BlockBNode(double b) : beta(b) {}
    void draw(RandomStream& rng, std::span<double> out) override {
        const double shared_low = beta * rng.uniform();
        for (double& u : out) {
            u = rng.uniform() <= beta ? shared_low : beta + (1.0 - beta) * rng.uniform();
        }
    }
    double beta;
};

struct MixtureNode final : Node {
    explicit MixtureNode(const Mixture& m) : selector(weights_of(m)) {
        for (const auto& c : m.components) members.push_back(build(*c.model));
    }
    static std::vector<double> weights_of(const Mixture& m) {
        std::vector<double> w;
        for (const auto& c : m.components) w.push_back(c.weight);
        return w;
    }
    void draw(RandomStream& rng, std::span<double> out) override {
        members[selector.pick(rng)]->draw(rng, out);
    }
    Selector selector;
    std::vector<NodePtr> members;
};

struct ProductNode final : Node {
    explicit ProductNode(const Product& m) {
        for (const auto& f : m.factors) {
            factors.push_back(build(*f));
            dims.push_back(f->dimension());
        }
    }
    void draw(RandomStream& rng, std::span<double> out) override {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < factors.size(); ++k) {
            factors[k]->draw(rng, out.subspan(offset, dims[k]));
            offset += dims[k];
        }
    }
    std::vector<NodePtr> factors;
    std::vector<std::size_t> dims;
};

struct GroupsNode final : Node {
    explicit GroupsNode(const ComonotoneGroups& m)
        : base(build(*m.base)), sizes(m.sizes), scratch(m.sizes.size()) {}
    void draw(RandomStream& rng, std::span<double> out) override {
        base->draw(rng, scratch);
        std::size_t offset = 0;
        for (std::size_t k = 0; k < sizes.size(); ++k) {
            std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(offset), sizes[k], scratch[k]);
            offset += static_cast<std::size_t>(sizes[k]);
        }
    }
    NodePtr base;
    std::vector<int> sizes;
    std::vector<double> scratch;
};

struct DiscretizedNode final : Node {
    DiscretizedNode(const Discretized& m) : base(build(*m.base)), cells(m.m) {}
    void draw(RandomStream& rng, std::span<double> out) override {
        base->draw(rng, out);
        for (double& v : out) v = std::max(1.0, std::ceil(cells * v)) / cells;
    }
    NodePtr base;
    double cells;
};

NodePtr build(const CopulaModel& model) {
    return std::visit(
        [](const auto& m) -> NodePtr {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Independence>) {
                return std::make_unique<IndependenceNode>();
            } else if constexpr (std::is_same_v<T, Comonotone>) {
                return std::make_unique<ComonotoneNode>();
            } else if constexpr (std::is_same_v<T, GaussEquicorr>) {
                return std::make_unique<GaussNode>(m);
            } else if constexpr (std::is_same_v<T, TEquicorr>) {
                return std::make_unique<TNode>(m);
            } else if constexpr (std::is_same_v<T, Clayton>) {
                return std::make_unique<ClaytonNode>(m);
            } else if constexpr (std::is_same_v<T, Gumbel>) {
                return std::make_unique<GumbelNode>(m);
            } else if constexpr (std::is_same_v<T, Extremal>) {
                return std::make_unique<ExtremalNode>(m.n, m.J);
            } else if constexpr (std::is_same_v<T, ExtremalMixture>) {
                return std::make_unique<ExtremalMixtureNode>(m);
            } else if constexpr (std::is_same_v<T, BlockExampleA>) {
                return std::make_unique<BlockANode>(m.beta);
            } else if constexpr (std::is_same_v<T, BlockExampleB>) {
                return std::make_unique<BlockBNode>(m.beta);
            } else if constexpr (std::is_same_v<T, Mixture>) {
                return std::make_unique<MixtureNode>(m);
            } else if constexpr (std::is_same_v<T, Product>) {
                return std::make_unique<ProductNode>(m);
            } else if constexpr (std::is_same_v<T, ComonotoneGroups>) {
                return std::make_unique<GroupsNode>(m);
            } else {
                return std::make_unique<DiscretizedNode>(m);
            }
        },
        model.variant());
}

} // namespace

Sampler::Sampler(const CopulaModel& model) {
    const CopulaModel checked = validate(model);
    root_ = build(checked);
    dimension_ = checked.dimension();
}

Sampler::~Sampler() = default;
Sampler::Sampler(Sampler&&) noexcept = default;
Sampler& Sampler::operator=(Sampler&&) noexcept = default;

void Sampler::draw(RandomStream& rng, std::span<double> out) {
    if (out.size() != dimension_) {
        throw ShapeError("sampler output has size " + std::to_string(out.size()) +
                         ", model dimension is " + std::to_string(dimension_));
    }
    root_->draw(rng, out);
}

std::vector<double> sample(const CopulaModel& model, RandomStream& rng) {
    Sampler sampler(model);
    std::vector<double> out(sampler.dimension());
    sampler.draw(rng, out);
    return out;
}

// ---------------------------------------------------------------------------
// Kendall's tau

namespace {

// Sorts v ascending while counting inversions (merge sort).
std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& buffer,
                              std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t swaps = count_inversions(v, buffer, lo, mid) + count_inversions(v, buffer, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += static_cast<std::int64_t>(mid - i);
            buffer[k++] = v[j++];
        } else {
            buffer[k++] = v[i++];
        }
    }
    while (i < mid) buffer[k++] = v[i++];
    while (j < hi) buffer[k++] = v[j++];
    std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(lo),
              buffer.begin() + static_cast<std::ptrdiff_t>(hi), v.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

// Sum over runs of equal values of run*(run-1)/2; `same` compares neighbours.
template <typename Same>
std::int64_t tied_pairs(std::size_t n, Same same) {
    std::int64_t total = 0;
    std::int64_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && same(i - 1, i)) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total;
}

} // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("kendall_tau: inputs differ in length");
    const std::size_t n = x.size();
    if (n < 2) throw ShapeError("kendall_tau: need at least two observations");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];

    const std::int64_t all = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const std::int64_t ties_x = tied_pairs(n, [&](std::size_t a, std::size_t b) {
        return x[order[a]] == x[order[b]];
    });
    const std::int64_t ties_xy = tied_pairs(n, [&](std::size_t a, std::size_t b) {
        return x[order[a]] == x[order[b]] && ys[a] == ys[b];
    });
    std::vector<double> buffer(n);
    const std::int64_t swaps = count_inversions(ys, buffer, 0, n);
    const std::int64_t ties_y = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });
    const std::int64_t concordant_minus_discordant = all - ties_x - ties_y + ties_xy - 2 * swaps;
    return static_cast<double>(concordant_minus_discordant) / static_cast<double>(all);
}

double kendall_tau_empirical(const CopulaModel& model, std::pair<std::size_t, std::size_t> pair,
                             std::size_t reps, RandomStream& rng) {
    if (reps < 1000) throw PreconditionError("kendall_tau_empirical: reps must be >= 1000");
    Sampler sampler(model);
    const std::size_t dim = sampler.dimension();
    if (pair.first == pair.second || pair.first >= dim || pair.second >= dim) {
        throw ShapeError("kendall_tau_empirical: invalid coordinate pair for dimension " +
                         std::to_string(dim));
    }
    std::vector<double> draw(dim), x(reps), y(reps);
    for (std::size_t k = 0; k < reps; ++k) {
        sampler.draw(rng, draw);
        x[k] = draw[pair.first];
        y[k] = draw[pair.second];
    }
    return kendall_tau(x, y);
}

} // namespace pmerge
