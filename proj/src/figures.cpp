#include "pmerge/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "pmerge/analytics.hpp"
#include "pmerge/error.hpp"

namespace pmerge::figures {

namespace {

const MergeStatistic harmonic = RMean{-1.0, std::nullopt};
constexpr double kLevelP = 0.1;
const std::vector<int> kDimensions = {5, 10, 15, 20};

std::vector<double> steps(double first, double last, double step) {
    std::vector<double> out;
    const int count = static_cast<int>(std::lround((last - first) / step));
    for (int i = 0; i <= count; ++i) out.push_back(first + step * i);
    return out;
}

Row single_point(const std::string& series, double x, const CopulaModel& model, const FigureOptions& o) {
    mc::SimulationPlan plan{model, harmonic, {kLevelP}, o.reps, o.seed, o.chunks, o.level};
    const auto e = mc::estimate_rn(plan, o.exec).front().estimate;
    return {series, x, e.point, e.ci_low, e.ci_high};
}

// R_n(0.1) against a dependence parameter, one series per n.
template <typename MakeModel>
Figure parameter_sweep(const std::string& name, const std::string& x_label, const std::vector<double>& xs,
                       MakeModel make, const FigureOptions& o) {
    Figure f{name, x_label, "R_n(0.1)", {}};
    for (int n : kDimensions) {
        const std::string series = "n=" + std::to_string(n);
        for (double x : xs) f.rows.push_back(single_point(series, x, make(n, x), o));
    }
    return f;
}

Figure gauss(const FigureOptions& o) {
    return parameter_sweep("gauss", "rho", steps(0.0, 1.0, 0.1),
                           [](int n, double rho) { return CopulaModel(copula::GaussEquicorr{n, rho}); }, o);
}

Figure tcopula(const FigureOptions& o) {
    return parameter_sweep("tcopula", "rho", steps(0.0, 1.0, 0.1),
                           [](int n, double rho) { return CopulaModel(copula::TEquicorr{n, rho, 4.0}); }, o);
}

Figure clayton(const FigureOptions& o) {
    // t = 0 is the independence limit
    return parameter_sweep("clayton", "t", steps(0.0, 1.5, 0.1), [](int n, double t) {
        return t == 0.0 ? CopulaModel(copula::Independence{n}) : CopulaModel(copula::Clayton{n, t});
    }, o);
}

Figure gumbel(const FigureOptions& o) {
    const std::vector<double> thetas = {1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
    return parameter_sweep("gumbel", "theta", thetas,
                           [](int n, double theta) { return CopulaModel(copula::Gumbel{n, theta}); }, o);
}

Figure discrete(const FigureOptions& o) {
    Figure f{"discrete", "p", "R_10(p)", {}};
    const auto grid = steps(0.01, 0.99, 0.01);
    const ModelPtr base = make_model(copula::Independence{10});
    std::vector<std::pair<std::string, CopulaModel>> series;
    for (int m : {5, 20, 50}) series.emplace_back("m=" + std::to_string(m), copula::Discretized{base, m});
    series.emplace_back("continuous", *base);
    for (const auto& [label, model] : series) {
        mc::SimulationPlan plan{model, harmonic, grid, o.reps, o.seed, o.chunks, o.level};
        for (const auto& g : mc::estimate_rn(plan, o.exec)) {
            f.rows.push_back({label, g.p, g.estimate.point, g.estimate.ci_low, g.estimate.ci_high});
        }
    }
    return f;
}

Figure threshold(const FigureOptions& o) {
    Figure f{"threshold", "n", "threshold", {}};
    const std::vector<double> ps = {0.01, 0.05, 0.1};
    const std::vector<int> ns = {10, 20, 50, 100, 200, 500, 1000, 2000, 5000};
    std::vector<std::vector<mc::QuantileEstimate>> empirical;
    for (int n : ns) {
        empirical.push_back(
            mc::estimate_thresholds(copula::Independence{n}, harmonic, ps, o.reps, o.seed, o.chunks, o.level, o.exec));
    }
    for (std::size_t k = 0; k < ps.size(); ++k) {
        const std::string suffix = " p=" + format_number(ps[k]);
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const auto& q = empirical[i][k];
            f.rows.push_back({"empirical" + suffix, static_cast<double>(ns[i]), q.point, q.ci_low, q.ci_high});
        }
        for (int n : ns) {
            try {
                const double a = analytics::asymptotic_threshold(n, ps[k]);
                f.rows.push_back({"asymptotic" + suffix, static_cast<double>(n), a, a, a});
            } catch (const DomainError&) {
                // the large-n form is undefined here; leave the point out
            }
        }
    }
    return f;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::vector<Row> Figure::series(const std::string& label) const {
    std::vector<Row> out;
    for (const auto& r : rows) {
        if (r.series == label) out.push_back(r);
    }
    return out;
}

std::vector<std::string> Figure::series_labels() const {
    std::vector<std::string> out;
    for (const auto& r : rows) {
        if (std::find(out.begin(), out.end(), r.series) == out.end()) out.push_back(r.series);
    }
    return out;
}

const std::vector<std::string>& recipe_names() {
    static const std::vector<std::string> names = {"gauss", "clayton", "tcopula", "gumbel", "discrete", "threshold"};
    return names;
}

Figure make_figure(const std::string& name, const FigureOptions& options) {
    if (name == "gauss") return gauss(options);
    if (name == "clayton") return clayton(options);
    if (name == "tcopula") return tcopula(options);
    if (name == "gumbel") return gumbel(options);
    if (name == "discrete") return discrete(options);
    if (name == "threshold") return threshold(options);
    throw DomainError("unknown figure '" + name + "' (expected gauss, clayton, tcopula, gumbel, discrete or threshold)");
}

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string to_csv(const Figure& figure) {
    std::string out = "series,x,estimate,ci_low,ci_high\n";
    for (const auto& r : figure.rows) {
        out += r.series + "," + format_number(r.x) + "," + format_number(r.estimate) + "," +
               format_number(r.ci_low) + "," + format_number(r.ci_high) + "\n";
    }
    return out;
}

std::string to_svg(const Figure& figure) {
    constexpr double width = 640, height = 400, left = 60, right = 160, top = 30, bottom = 50;
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& r : figure.rows) {
        x_min = std::min(x_min, r.x);
        x_max = std::max(x_max, r.x);
        y_min = std::min(y_min, r.estimate);
        y_max = std::max(y_max, r.estimate);
    }
    if (figure.rows.empty()) x_min = y_min = 0, x_max = y_max = 1;
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;
    const bool log_x = figure.name == "threshold";
    auto tx = [&](double x) {
        const double t = log_x ? (std::log(x) - std::log(x_min)) / (std::log(x_max) - std::log(x_min))
                               : (x - x_min) / (x_max - x_min);
        return left + t * (width - left - right);
    };
    auto ty = [&](double y) { return top + (1.0 - (y - y_min) / (y_max - y_min)) * (height - top - bottom); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << xml_escape(figure.name) << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
       << height - bottom << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (width - right + left) / 2 << "\" y=\"" << height - 10 << "\" font-size=\"12\">"
       << xml_escape(figure.x_label) << (log_x ? " (log scale)" : "") << "</text>\n";
    for (double y : {y_min, y_max}) {
        os << "<text x=\"4\" y=\"" << ty(y) + 4 << "\" font-size=\"10\">" << format_number(y) << "</text>\n";
    }
    for (double x : {x_min, x_max}) {
        os << "<text x=\"" << tx(x) - 10 << "\" y=\"" << height - bottom + 14 << "\" font-size=\"10\">"
           << format_number(x) << "</text>\n";
    }
    const auto labels = figure.series_labels();
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const char* color = colors[k % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (const auto& r : figure.series(labels[k])) os << tx(r.x) << "," << ty(r.estimate) << " ";
        os << "\"/>\n";
        const double ly = top + 16.0 * static_cast<double>(k);
        os << "<text x=\"" << width - right + 10 << "\" y=\"" << ly + 4 << "\" font-size=\"11\" fill=\"" << color
           << "\">" << xml_escape(labels[k]) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace pmerge::figures
