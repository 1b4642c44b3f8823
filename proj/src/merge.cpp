#include "pmerge/merge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pmerge/error.hpp"

namespace pmerge {

namespace {

// Neumaier's compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            compensation_ += (sum_ - t) + x;
        } else {
            compensation_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

void check_inputs(const std::optional<Weights>& weights, const PValues& p) {
    if (weights && weights->size() != p.size()) {
        throw ShapeError("weights have length " + std::to_string(weights->size()) +
                         " but there are " + std::to_string(p.size()) + " p-values");
    }
}

std::vector<double> resolve(const std::optional<Weights>& weights, std::size_t n) {
    if (weights) return {weights->values().begin(), weights->values().end()};
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

} // namespace

Weights::Weights(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ShapeError("weights must be non-empty");
    double total = 0.0;
    interior_ = true;
    for (double w : values_) {
        if (!(w >= 0.0 && w <= 1.0)) throw DomainError("weight outside [0, 1]");
        interior_ = interior_ && w > 0.0;
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "weights sum to " << total << ", not 1";
        throw DomainError(os.str());
    }
}

Weights Weights::normalized(std::vector<double> values, double tolerance) {
    double total = 0.0;
    for (double w : values) {
        if (!(w >= 0.0)) throw DomainError("negative or NaN weight");
        total += w;
    }
    if (!(std::abs(total - 1.0) <= tolerance)) {
        std::ostringstream os;
        os.precision(17);
        os << "weights sum to " << total << ", more than " << tolerance << " away from 1";
        throw DomainError(os.str());
    }
    for (double& w : values) w /= total;
    return Weights(std::move(values));
}

Weights Weights::equal(std::size_t n) {
    if (n == 0) throw ShapeError("weights must be non-empty");
    return Weights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

PValues::PValues(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ShapeError("at least one p-value is required");
    for (double u : values_) {
        if (!(u > 0.0 && u < 1.0)) {
            std::ostringstream os;
            os.precision(17);
            os << "p-value " << u << " is outside the open interval (0, 1)";
            throw DomainError(os.str());
        }
    }
}

namespace detail {

double power_mean(double r, std::span<const double> w, std::span<const double> u) {
    const std::size_t n = u.size();
    if (r == 0.0) {
        CompensatedSum log_sum;
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] > 0.0) log_sum.add(w[i] * std::log(u[i]));
        }
        return std::exp(log_sum.value());
    }
    // Factor out the extreme entry so every scaled power lies in (0, 1].
    double scale = r < 0.0 ? 2.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] > 0.0) scale = r < 0.0 ? std::min(scale, u[i]) : std::max(scale, u[i]);
    }
    CompensatedSum sum;
    if (r == -1.0) {
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] > 0.0) sum.add(w[i] * (scale / u[i]));
        }
        return scale / sum.value();
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] > 0.0) sum.add(w[i] * std::pow(u[i] / scale, r));
    }
    return scale * std::pow(sum.value(), 1.0 / r);
}

double harmonic_mean_equal(std::span<const double> u) {
    CompensatedSum sum;
    for (double x : u) sum.add(1.0 / x);
    return static_cast<double>(u.size()) / sum.value();
}

double simes_in_place(std::span<double> u) {
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double best = u.back();  // i = n term
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        best = std::min(best, n * u[i] / static_cast<double>(i + 1));
    }
    return best;
}

// tan(pi (u - 1/2)) written as -cot(pi u) / cot(pi (1 - u)) so that u near 0
// or 1 keeps its relative precision.
double cauchy_quantile(double u) {
    if (u < 0.5) return -1.0 / std::tan(std::numbers::pi * u);
    return 1.0 / std::tan(std::numbers::pi * (1.0 - u));
}

double cauchy_cdf(double x) {
    if (x < 0.0) return std::atan(-1.0 / x) / std::numbers::pi;
    return 0.5 + std::atan(x) / std::numbers::pi;
}

double cauchy_mean(std::span<const double> w, std::span<const double> u) {
    CompensatedSum sum;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(w[i] > 0.0)) continue;
        // u = 1 (possible for discretized input) sends the sum to +inf
        if (u[i] >= 1.0) return 1.0;
        sum.add(w[i] * cauchy_quantile(u[i]));
    }
    return cauchy_cdf(sum.value());
}

} // namespace detail

double r_mean(const RMean& stat, const PValues& p) {
    if (!std::isfinite(stat.r)) throw DomainError("r must be finite");
    check_inputs(stat.weights, p);
    auto w = resolve(stat.weights, p.size());
    if (stat.r > -1.0) return detail::power_mean(stat.r, w, p.values());
    // largest terms w_i u_i^r first
    std::vector<std::size_t> order(p.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto u = p.values();
    const double r = stat.r;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::log(w[a]) + r * std::log(u[a]) > std::log(w[b]) + r * std::log(u[b]);
    });
    std::vector<double> ws(order.size());
    std::vector<double> us(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        ws[i] = w[order[i]];
        us[i] = u[order[i]];
    }
    return detail::power_mean(r, ws, us);
}

double simes(const PValues& p) {
    std::vector<double> scratch(p.values().begin(), p.values().end());
    return detail::simes_in_place(scratch);
}

double cauchy_combine(const CauchyCombination& stat, const PValues& p) {
    check_inputs(stat.weights, p);
    const auto w = resolve(stat.weights, p.size());
    return detail::cauchy_mean(w, p.values());
}

double merge(const MergeStatistic& stat, const PValues& p) {
    return std::visit(
        [&p](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RMean>) {
                return r_mean(s, p);
            } else if constexpr (std::is_same_v<T, Simes>) {
                return simes(p);
            } else {
                return cauchy_combine(s, p);
            }
        },
        stat);
}

std::string describe(const MergeStatistic& stat) {
    std::ostringstream os;
    os.precision(12);
    if (const auto* m = std::get_if<RMean>(&stat)) {
        os << "rmean(r=" << m->r << (m->weights ? ",weighted" : "") << ")";
    } else if (std::holds_alternative<Simes>(stat)) {
        os << "simes";
    } else {
        os << "cauchy" << (std::get<CauchyCombination>(stat).weights ? "(weighted)" : "");
    }
    return os.str();
}

BoundStatistic::BoundStatistic(const MergeStatistic& stat, std::size_t n) : n_(n) {
    if (n == 0) throw ShapeError("statistic dimension must be positive");
    auto bind_weights = [&](const std::optional<Weights>& w) {
        if (w && w->size() != n) {
            throw ShapeError("statistic has " + std::to_string(w->size()) +
                             " weights but the model has dimension " + std::to_string(n));
        }
        weights_ = resolve(w, n);
        return !w.has_value();
    };
    if (const auto* m = std::get_if<RMean>(&stat)) {
        if (!std::isfinite(m->r)) throw DomainError("r must be finite");
        r_ = m->r;
        const bool symmetric = bind_weights(m->weights);
        if (r_ == 0.0) {
            kind_ = Kind::geometric;
        } else if (r_ == -1.0 && symmetric) {
            kind_ = Kind::harmonic_equal;
        } else {
            kind_ = Kind::power;
        }
    } else if (std::holds_alternative<Simes>(stat)) {
        kind_ = Kind::simes;
    } else {
        bind_weights(std::get<CauchyCombination>(stat).weights);
        kind_ = Kind::cauchy;
    }
}

double BoundStatistic::evaluate(std::span<double> u) const {
    switch (kind_) {
    case Kind::harmonic_equal:
        return detail::harmonic_mean_equal(u);
    case Kind::geometric:
    case Kind::power:
        return detail::power_mean(r_, weights_, u);
    case Kind::simes:
        return detail::simes_in_place(u);
    case Kind::cauchy:
        return detail::cauchy_mean(weights_, u);
    }
    return 0.0;
}

} // namespace pmerge
