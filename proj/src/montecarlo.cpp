#include "pmerge/montecarlo.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "pmerge/error.hpp"
#include "pmerge/random.hpp"
#include "pmerge/stats.hpp"

namespace pmerge::mc {

namespace {

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw DomainError("p grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0 && grid[i] < 1.0)) throw DomainError("p grid values must lie in (0, 1)");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("p grid must be strictly increasing");
    }
}

void check_run(std::uint64_t reps, std::uint64_t chunks, double level) {
    if (reps == 0) throw DomainError("reps must be >= 1");
    if (chunks == 0) throw DomainError("chunks must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
}

std::uint64_t effective_chunks(std::uint64_t reps, std::uint64_t chunks) { return std::min(reps, chunks); }

// Counts, per grid cell, the merged values falling in (p_{j-1}, p_j]; the
// extra last cell collects values above the grid.
void run_chunk(const CopulaModel& model, const BoundStatistic& stat, const std::vector<double>& grid,
               std::uint64_t seed, std::uint64_t chunk, std::uint64_t reps, std::vector<std::uint64_t>& cells) {
    Sampler sampler(model);
    RandomStream rng(seed, chunk);
    std::vector<double> u(sampler.dimension());
    for (std::uint64_t k = 0; k < reps; ++k) {
        sampler.draw(rng, u);
        const double v = stat.evaluate(u);
        const auto idx = std::lower_bound(grid.begin(), grid.end(), v) - grid.begin();
        ++cells[static_cast<std::size_t>(idx)];
    }
}

std::vector<GridEstimate> summarize(const SimulationPlan& plan, const std::vector<std::uint64_t>& cells) {
    std::vector<GridEstimate> out;
    out.reserve(plan.p_grid.size());
    std::uint64_t cumulative = 0;
    for (std::size_t j = 0; j < plan.p_grid.size(); ++j) {
        cumulative += cells[j];
        out.push_back({plan.p_grid[j], make_estimate(cumulative, plan.reps, plan.seed, plan.level)});
        assert(j == 0 || out[j].estimate.point >= out[j - 1].estimate.point);
    }
    return out;
}

} // namespace

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PMERGE_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v < 4096) return static_cast<int>(v);
    }
    return std::max(1, omp_get_max_threads());
}

std::uint64_t chunk_size(std::uint64_t reps, std::uint64_t chunks, std::uint64_t k) {
    return reps / chunks + (k < reps % chunks ? 1 : 0);
}

Estimate make_estimate(std::uint64_t successes, std::uint64_t reps, std::uint64_t seed, double level) {
    Estimate e;
    e.reps = reps;
    e.seed = seed;
    e.level = level;
    e.point = static_cast<double>(successes) / static_cast<double>(reps);
    e.std_error = std::sqrt(e.point * (1.0 - e.point) / static_cast<double>(reps));
    const auto ci = stats::wilson_interval(successes, reps, level);
    e.ci_low = ci.low;
    e.ci_high = ci.high;
    return e;
}

std::vector<GridEstimate> estimate_rn(const SimulationPlan& plan, const Execution& exec) {
    check_grid(plan.p_grid);
    check_run(plan.reps, plan.chunks, plan.level);
    const CopulaModel model = validate(plan.model);
    const BoundStatistic stat(plan.stat, model.dimension());
    const std::uint64_t chunks = effective_chunks(plan.reps, plan.chunks);
    const std::size_t ncells = plan.p_grid.size() + 1;

    std::vector<std::vector<std::uint64_t>> per_chunk(chunks, std::vector<std::uint64_t>(ncells, 0));
    const int workers = resolve_workers(exec.workers);
    std::string failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(chunks); ++k) {
        try {
            const auto ck = static_cast<std::uint64_t>(k);
            run_chunk(model, stat, plan.p_grid, plan.seed, ck, chunk_size(plan.reps, chunks, ck),
                      per_chunk[ck]);
        } catch (const std::exception& e) {
#pragma omp critical(pmerge_mc_failure)
            failure = e.what();
        }
    }
    if (!failure.empty()) throw Error("simulation failed: " + failure);

    std::vector<std::uint64_t> cells(ncells, 0);
    for (const auto& c : per_chunk) {
        for (std::size_t j = 0; j < ncells; ++j) cells[j] += c[j];
    }
    return summarize(plan, cells);
}

std::vector<QuantileEstimate> estimate_thresholds(const CopulaModel& model_in, const MergeStatistic& stat_in,
                                                 const std::vector<double>& ps, std::uint64_t reps,
                                                 std::uint64_t seed, std::uint64_t chunks_in, double level,
                                                 const Execution& exec) {
    check_grid(ps);
    check_run(reps, chunks_in, level);
    const auto required = static_cast<std::uint64_t>(std::ceil(10.0 / ps.front()));
    if (reps < required) {
        throw PreconditionError("estimate_threshold: p = " + std::to_string(ps.front()) + " needs at least " +
                                std::to_string(required) + " replications, got " + std::to_string(reps));
    }
    const CopulaModel model = validate(model_in);
    const BoundStatistic stat(stat_in, model.dimension());
    const std::uint64_t chunks = effective_chunks(reps, chunks_in);

    std::vector<std::uint64_t> offset(chunks + 1, 0);
    for (std::uint64_t k = 0; k < chunks; ++k) offset[k + 1] = offset[k] + chunk_size(reps, chunks, k);
    std::vector<double> values(reps);
    const int workers = resolve_workers(exec.workers);
    std::string failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(chunks); ++k) {
        try {
            const auto ck = static_cast<std::uint64_t>(k);
            Sampler sampler(model);
            RandomStream rng(seed, ck);
            std::vector<double> u(sampler.dimension());
            for (std::uint64_t i = offset[ck]; i < offset[ck + 1]; ++i) {
                sampler.draw(rng, u);
                values[i] = stat.evaluate(u);
            }
        } catch (const std::exception& e) {
#pragma omp critical(pmerge_mc_failure)
            failure = e.what();
        }
    }
    if (!failure.empty()) throw Error("simulation failed: " + failure);

    // the sample is sorted once; order statistics are then plain lookups
    std::sort(values.begin(), values.end());
    auto order_statistic = [&values](std::uint64_t r) { return values[static_cast<std::size_t>(r - 1)]; };
    std::vector<QuantileEstimate> out;
    for (double p : ps) {
        const auto rank = static_cast<std::uint64_t>(std::ceil(static_cast<double>(reps) * p));
        const auto ranks = stats::quantile_rank_interval(reps, p, level);
        QuantileEstimate q;
        q.p = p;
        q.reps = reps;
        q.seed = seed;
        q.level = level;
        q.point = order_statistic(std::clamp<std::uint64_t>(rank, 1, reps));
        q.ci_low = order_statistic(ranks.lo);
        q.ci_high = order_statistic(ranks.hi);
        out.push_back(q);
    }
    return out;
}

QuantileEstimate estimate_threshold(const CopulaModel& model, const MergeStatistic& stat, double p,
                                    std::uint64_t reps, std::uint64_t seed, std::uint64_t chunks, double level,
                                    const Execution& exec) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("estimate_threshold: p must lie in (0, 1)");
    return estimate_thresholds(model, stat, {p}, reps, seed, chunks, level, exec).front();
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::sub_uniform:
        return "sub-uniform";
    case Verdict::super_uniform:
        return "super-uniform";
    case Verdict::inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

Verdict classify(const Estimate& e, double p) {
    if (e.ci_low > p) return Verdict::sub_uniform;
    if (e.ci_high < p) return Verdict::super_uniform;
    return Verdict::inconclusive;
}

SubuniformityReport scan_subuniformity(const SimulationPlan& plan, const Execution& exec) {
    SubuniformityReport report;
    bool all_sub = true;
    bool any_super = false;
    for (const auto& g : estimate_rn(plan, exec)) {
        const Verdict v = classify(g.estimate, g.p);
        all_sub = all_sub && v == Verdict::sub_uniform;
        any_super = any_super || v == Verdict::super_uniform;
        report.points.push_back({g.p, g.estimate, v});
    }
    report.overall = any_super ? Verdict::super_uniform : all_sub ? Verdict::sub_uniform : Verdict::inconclusive;
    return report;
}

namespace reference {

std::vector<GridEstimate> estimate_rn_serial(const SimulationPlan& plan) {
    check_grid(plan.p_grid);
    check_run(plan.reps, plan.chunks, plan.level);
    const CopulaModel model = validate(plan.model);
    const BoundStatistic stat(plan.stat, model.dimension());
    const std::uint64_t chunks = effective_chunks(plan.reps, plan.chunks);

    std::vector<std::uint64_t> hits(plan.p_grid.size(), 0);
    for (std::uint64_t k = 0; k < chunks; ++k) {
        Sampler sampler(model);
        RandomStream rng(plan.seed, k);
        std::vector<double> u(sampler.dimension());
        for (std::uint64_t i = 0; i < chunk_size(plan.reps, chunks, k); ++i) {
            sampler.draw(rng, u);
            const double v = stat.evaluate(u);
            for (std::size_t j = 0; j < plan.p_grid.size(); ++j) {
                if (v <= plan.p_grid[j]) ++hits[j];
            }
        }
    }
    std::vector<GridEstimate> out;
    for (std::size_t j = 0; j < plan.p_grid.size(); ++j) {
        out.push_back({plan.p_grid[j], make_estimate(hits[j], plan.reps, plan.seed, plan.level)});
    }
    return out;
}

} // namespace reference

} // namespace pmerge::mc
