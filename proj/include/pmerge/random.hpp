#ifndef PMERGE_RANDOM_HPP
#define PMERGE_RANDOM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace pmerge {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream. The key is the 64-bit seed; the upper half
/// of the 128-bit counter is the stream index and the lower half counts
/// blocks. Distinct stream indices therefore address disjoint counter ranges
/// of one bijection, so substreams never overlap and need no jump-ahead.
///
/// All variates are generated by code in this header (no std::*_distribution)
/// so draw sequences are identical across standard libraries.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_index)
        : seed_(seed), stream_(stream_index) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_index() const noexcept { return stream_; }

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buffer_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform()); }

    /// Standard normal by Box-Muller; the second variate of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// log of a Gamma(shape, 1) draw (Marsaglia-Tsang; shape < 1 boosted by
    /// U^(1/shape)). Returned in log space so tiny shapes cannot underflow.
    double log_gamma_variate(double shape) {
        double log_boost = 0.0;
        if (shape < 1.0) {
            log_boost = std::log(uniform()) / shape;
            shape += 1.0;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = 0.0;
            double v = 0.0;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * (x * x) * (x * x) ||
                std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
                return std::log(d * v) + log_boost;
            }
        }
    }

    double gamma_variate(double shape) { return std::exp(log_gamma_variate(shape)); }

private:
    void refill() {
        const std::array<std::uint32_t, 4> counter = {
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        buffer_ = philox4x32(counter, {static_cast<std::uint32_t>(seed_),
                                       static_cast<std::uint32_t>(seed_ >> 32)});
        ++block_;
        pos_ = 0;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace pmerge

#endif // PMERGE_RANDOM_HPP
