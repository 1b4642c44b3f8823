// pmerge: command-line front end for p-value merging, dependence-model
// simulation and the closed-form Clayton / threshold analytics.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmerge/analytics.hpp"
#include "pmerge/error.hpp"
#include "pmerge/figures.hpp"
#include "pmerge/merge.hpp"
#include "pmerge/montecarlo.hpp"
#include "pmerge/spec_parser.hpp"

namespace {

using pmerge::figures::format_number;

constexpr int kExitUsage = 2;
constexpr int kExitAccuracy = 3;
constexpr int kExitIo = 4;

struct RunFlags {
    std::uint64_t reps = 1'000'000;
    std::uint64_t seed = 1;
    std::uint64_t chunks = pmerge::mc::default_chunks;
    int workers = 0;
    double level = pmerge::mc::default_level;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--reps", f.reps, "Monte Carlo replications")->capture_default_str();
    cmd->add_option("--seed", f.seed, "64-bit seed")->capture_default_str();
    cmd->add_option("--chunks", f.chunks, "Independent random streams (affects results)")->capture_default_str();
    cmd->add_option("--workers", f.workers,
                    "Threads (does not affect results; default $PMERGE_WORKERS or all cores)");
    cmd->add_option("--level", f.level, "Confidence level")->capture_default_str();
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw pmerge::IoError("cannot open '" + path + "' for writing");
    file << text;
    if (!file.flush()) throw pmerge::IoError("failed writing '" + path + "'");
}

void print_value(double x) { std::printf("%s\n", format_number(x).c_str()); }

// ---------------------------------------------------------------------------

struct MergeArgs {
    std::string method;
    std::optional<double> r;
    std::vector<double> weights;
    std::vector<double> pvalues;
};

void run_merge(const MergeArgs& a) {
    const pmerge::PValues p(a.pvalues);
    std::optional<pmerge::Weights> w;
    if (!a.weights.empty()) w = pmerge::Weights(a.weights);
    pmerge::MergeStatistic stat = pmerge::Simes{};
    if (a.method == "rmean") {
        if (!a.r) throw pmerge::DomainError("--method rmean requires --r");
        stat = pmerge::RMean{*a.r, w};
    } else if (a.method == "cauchy") {
        stat = pmerge::CauchyCombination{w};
    } else if (w) {
        throw pmerge::DomainError("simes takes no weights");
    }
    print_value(pmerge::merge(stat, p));
}

struct EstimateArgs {
    std::string copula;
    std::string stat = "rmean:r=-1";
    std::vector<double> p;
    std::string out;
    RunFlags run;
};

void run_estimate(const EstimateArgs& a) {
    pmerge::mc::SimulationPlan plan{pmerge::parse_copula_spec(a.copula), pmerge::parse_stat_spec(a.stat), a.p,
                                    a.run.reps, a.run.seed, a.run.chunks, a.run.level};
    const auto report = pmerge::mc::scan_subuniformity(plan, {a.run.workers});
    std::string csv = "p,estimate,stderr,ci_low,ci_high,reps,seed,verdict\n";
    for (const auto& pt : report.points) {
        const auto& e = pt.estimate;
        csv += format_number(pt.p) + "," + format_number(e.point) + "," + format_number(e.std_error) + "," +
               format_number(e.ci_low) + "," + format_number(e.ci_high) + "," + std::to_string(e.reps) + "," +
               std::to_string(e.seed) + "," + pmerge::mc::to_string(pt.verdict) + "\n";
    }
    write_output(csv, a.out);
    std::fprintf(stderr, "overall verdict: %s\n", pmerge::mc::to_string(report.overall).c_str());
}

void run_threshold(const EstimateArgs& a) {
    const auto qs = pmerge::mc::estimate_thresholds(pmerge::parse_copula_spec(a.copula),
                                                    pmerge::parse_stat_spec(a.stat), a.p, a.run.reps, a.run.seed,
                                                    a.run.chunks, a.run.level, {a.run.workers});
    std::string csv = "p,threshold,ci_low,ci_high,reps,seed\n";
    for (const auto& q : qs) {
        csv += format_number(q.p) + "," + format_number(q.point) + "," + format_number(q.ci_low) + "," +
               format_number(q.ci_high) + "," + std::to_string(q.reps) + "," + std::to_string(q.seed) + "\n";
    }
    write_output(csv, a.out);
}

struct AnalyticsArgs {
    int n = 0;
    double r = 0.0;
    double t = 0.0;
    double p = 0.0;
    int m = 0;
    std::vector<double> ps;
    int workers = 0;
};

struct FigureArgs {
    std::string name;
    std::string out_dir = ".";
    bool svg = false;
    RunFlags run;
};

void run_figure(const FigureArgs& a) {
    std::vector<std::string> names;
    if (a.name == "all") {
        names = pmerge::figures::recipe_names();
    } else {
        names.push_back(a.name);
    }
    std::error_code ec;
    std::filesystem::create_directories(a.out_dir, ec);
    if (ec) throw pmerge::IoError("cannot create directory '" + a.out_dir + "': " + ec.message());
    pmerge::figures::FigureOptions options{a.run.reps, a.run.seed, a.run.chunks, a.run.level, {a.run.workers}};
    for (const auto& name : names) {
        const auto figure = pmerge::figures::make_figure(name, options);
        const auto base = std::filesystem::path(a.out_dir) / name;
        write_output(pmerge::figures::to_csv(figure), base.string() + ".csv");
        if (a.svg) write_output(pmerge::figures::to_svg(figure), base.string() + ".svg");
        std::printf("%s.csv\n", base.string().c_str());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-value merging under dependence: merge, simulate, analyse"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "pmerge 1.0.0");

    MergeArgs merge_args;
    auto* merge_cmd = app.add_subcommand("merge", "Merge p-values");
    merge_cmd->add_option("--method", merge_args.method, "rmean, simes or cauchy")
        ->required()
        ->check(CLI::IsMember({"rmean", "simes", "cauchy"}));
    merge_cmd->add_option("--r", merge_args.r, "Exponent of the r-mean");
    merge_cmd->add_option("--weights", merge_args.weights, "Comma-separated weights summing to 1")
        ->delimiter(',');
    merge_cmd->add_option("--pvalues", merge_args.pvalues, "Comma-separated p-values in (0,1)")
        ->required()
        ->delimiter(',');

    EstimateArgs est_args;
    auto* est_cmd = app.add_subcommand("estimate", "Monte Carlo P(stat <= p) with sub-uniformity verdicts");
    est_cmd->add_option("--copula", est_args.copula, "Copula spec, e.g. clayton:n=5,t=1")->required();
    est_cmd->add_option("--stat", est_args.stat, "Statistic spec, e.g. rmean:r=-1")->capture_default_str();
    est_cmd->add_option("--p", est_args.p, "Comma-separated increasing p grid")->required()->delimiter(',');
    est_cmd->add_option("--out", est_args.out, "Output CSV path (default stdout)");
    add_run_flags(est_cmd, est_args.run);

    EstimateArgs thr_args;
    auto* thr_cmd = app.add_subcommand("threshold", "Monte Carlo p-quantiles of the merged statistic");
    thr_cmd->add_option("--copula", thr_args.copula, "Copula spec")->required();
    thr_cmd->add_option("--stat", thr_args.stat, "Statistic spec")->capture_default_str();
    thr_cmd->add_option("--p", thr_args.p, "Comma-separated increasing levels")->required()->delimiter(',');
    thr_cmd->add_option("--out", thr_args.out, "Output CSV path (default stdout)");
    add_run_flags(thr_cmd, thr_args.run);

    AnalyticsArgs an;
    auto* an_cmd = app.add_subcommand("analytics", "Closed-form quantities");
    an_cmd->require_subcommand(1);
    auto* exact_cmd = an_cmd->add_subcommand("clayton-exact", "P(M_{-r} <= p) under Clayton(r)");
    exact_cmd->add_option("--n", an.n)->required();
    exact_cmd->add_option("--r", an.r)->required();
    exact_cmd->add_option("--p", an.p)->required();
    auto* bound_cmd = an_cmd->add_subcommand("clayton-bound", "Gamma bound; sup over t when --t is omitted");
    auto* bound_t = bound_cmd->add_option("--t", an.t);
    bound_cmd->add_option("--p", an.p)->required();
    auto* kappa_cmd = an_cmd->add_subcommand("kappa", "Uniform multiplier and its argmax");
    kappa_cmd->add_option("--workers", an.workers, "Threads for the grid search");
    auto* asym_cmd = an_cmd->add_subcommand("threshold-asymptotic", "Large-n harmonic-mean threshold");
    asym_cmd->add_option("--n", an.n)->required();
    asym_cmd->add_option("--p", an.p)->required();
    auto* pm_cmd = an_cmd->add_subcommand("pm", "Discrete-grid lower bound p_m");
    pm_cmd->add_option("--n", an.n)->required();
    pm_cmd->add_option("--r", an.r)->required();
    pm_cmd->add_option("--p", an.p)->required();
    pm_cmd->add_option("--m", an.m)->required();
    auto* ct_cmd = an_cmd->add_subcommand("clayton-thresholds", "p/(1+p) and p/1.131 thresholds");
    ct_cmd->add_option("--p", an.ps, "Comma-separated levels")->required()->delimiter(',');

    FigureArgs fig_args;
    auto* fig_cmd = app.add_subcommand("figure", "Reproduce a figure as CSV");
    fig_cmd->add_option("--name", fig_args.name, "gauss, clayton, tcopula, gumbel, discrete, threshold or all")
        ->required();
    fig_cmd->add_option("--out-dir", fig_args.out_dir, "Output directory")->capture_default_str();
    fig_cmd->add_flag("--svg", fig_args.svg, "Also write an SVG line plot");
    add_run_flags(fig_cmd, fig_args.run);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (merge_cmd->parsed()) {
            run_merge(merge_args);
        } else if (est_cmd->parsed()) {
            run_estimate(est_args);
        } else if (thr_cmd->parsed()) {
            run_threshold(thr_args);
        } else if (fig_cmd->parsed()) {
            run_figure(fig_args);
        } else if (exact_cmd->parsed()) {
            print_value(pmerge::analytics::clayton_exact_cdf(an.n, an.r, an.p));
        } else if (bound_cmd->parsed()) {
            if (bound_t->count() > 0) {
                print_value(pmerge::analytics::clayton_gamma_bound(an.t, an.p));
            } else {
                const auto s = pmerge::analytics::clayton_sup_bound_search(an.p);
                std::printf("bound,b\n%s,%s\n", format_number(s.value).c_str(), format_number(s.b).c_str());
            }
        } else if (kappa_cmd->parsed()) {
            pmerge::analytics::KappaOptions options;
            options.workers = an.workers;
            const auto k = pmerge::analytics::kappa_constant(options);
            std::printf("kappa,p_star,b_star\n%s,%s,%s\n", format_number(k.kappa).c_str(),
                        format_number(k.p_star).c_str(), format_number(k.b_star).c_str());
        } else if (asym_cmd->parsed()) {
            print_value(pmerge::analytics::asymptotic_threshold(an.n, an.p));
        } else if (pm_cmd->parsed()) {
            print_value(pmerge::analytics::discrete_pm(an.n, an.m, an.r, an.p));
        } else if (ct_cmd->parsed()) {
            std::printf("p,t_p,u_p\n");
            for (double p : an.ps) {
                const double t = pmerge::analytics::clayton_threshold(p);
                const std::string u = p <= 0.1 ? format_number(pmerge::analytics::clayton_threshold_kappa(p)) : "";
                std::printf("%s,%s,%s\n", format_number(p).c_str(), format_number(t).c_str(), u.c_str());
            }
        }
    } catch (const pmerge::AccuracyError& e) {
        std::fprintf(stderr, "pmerge: accuracy failure: %s\n", e.what());
        return kExitAccuracy;
    } catch (const pmerge::IoError& e) {
        std::fprintf(stderr, "pmerge: I/O error: %s\n", e.what());
        return kExitIo;
    } catch (const pmerge::Error& e) {
        std::fprintf(stderr, "pmerge: %s\n", e.what());
        return kExitUsage;
    }
    return 0;
}
