#ifndef PMERGE_MONTECARLO_HPP
#define PMERGE_MONTECARLO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pmerge/copula.hpp"
#include "pmerge/merge.hpp"

namespace pmerge::mc {

inline constexpr std::uint64_t default_chunks = 64;
inline constexpr double default_level = 0.99;

/// Everything that determines a simulation's output. The number of worker
/// threads is deliberately not part of it.
struct SimulationPlan {
    CopulaModel model;
    MergeStatistic stat;
    std::vector<double> p_grid;  // strictly increasing, in (0, 1)
    std::uint64_t reps = 1'000'000;
    std::uint64_t seed = 0;
    std::uint64_t chunks = default_chunks;
    double level = default_level;
};

struct Execution {
    /// Threads to use; <= 0 means resolve_workers(0).
    int workers = 0;
};

/// Worker count: `requested` if positive, else the PMERGE_WORKERS environment
/// variable if set, else the OpenMP default.
int resolve_workers(int requested);

struct Estimate {
    double point = 0.0;
    double std_error = 0.0;  // sqrt(point (1 - point) / reps)
    double ci_low = 0.0;     // Wilson interval at `level`
    double ci_high = 1.0;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    double level = default_level;
};

struct GridEstimate {
    double p = 0.0;
    Estimate estimate;
};

/// P(stat(U) <= p) for each p of the grid from one sampling pass. Reps are
/// split into `chunks` blocks of nearly equal size; block k draws from
/// RandomStream(seed, k), so the output depends on (seed, chunks) only.
std::vector<GridEstimate> estimate_rn(const SimulationPlan& plan, const Execution& exec = {});

struct QuantileEstimate {
    double p = 0.0;
    double point = 0.0;  // order statistic X_(ceil(reps p))
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    double level = default_level;
};

/// Empirical left p-quantile of the merged statistic with an exact
/// order-statistic confidence interval. Requires reps >= 10 / p.
QuantileEstimate estimate_threshold(const CopulaModel& model, const MergeStatistic& stat, double p,
                                    std::uint64_t reps, std::uint64_t seed,
                                    std::uint64_t chunks = default_chunks, double level = default_level,
                                    const Execution& exec = {});

/// estimate_threshold for several p from one sample; `ps` strictly
/// increasing, reps >= 10 / ps.front().
std::vector<QuantileEstimate> estimate_thresholds(const CopulaModel& model, const MergeStatistic& stat,
                                                 const std::vector<double>& ps, std::uint64_t reps,
                                                 std::uint64_t seed, std::uint64_t chunks = default_chunks,
                                                 double level = default_level, const Execution& exec = {});

enum class Verdict { sub_uniform, super_uniform, inconclusive };

std::string to_string(Verdict v);

/// sub-uniform when the interval lies strictly above p, super-uniform when
/// strictly below, inconclusive otherwise.
Verdict classify(const Estimate& e, double p);

struct ScanPoint {
    double p = 0.0;
    Estimate estimate;
    Verdict verdict = Verdict::inconclusive;
};

struct SubuniformityReport {
    std::vector<ScanPoint> points;
    /// super-uniform if any point is, sub-uniform if all points are,
    /// inconclusive otherwise.
    Verdict overall = Verdict::inconclusive;
};

SubuniformityReport scan_subuniformity(const SimulationPlan& plan, const Execution& exec = {});

/// Fills an Estimate from a success count.
Estimate make_estimate(std::uint64_t successes, std::uint64_t reps, std::uint64_t seed, double level);

/// Number of reps assigned to chunk k.
std::uint64_t chunk_size(std::uint64_t reps, std::uint64_t chunks, std::uint64_t k);

namespace reference {

/// Single-threaded, unoptimized estimate_rn with the same stream layout;
/// kept to check the parallel kernel.
std::vector<GridEstimate> estimate_rn_serial(const SimulationPlan& plan);

} // namespace reference

} // namespace pmerge::mc

#endif // PMERGE_MONTECARLO_HPP
