#ifndef PMERGE_FIGURES_HPP
#define PMERGE_FIGURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pmerge/montecarlo.hpp"

namespace pmerge::figures {

struct Row {
    std::string series;
    double x = 0.0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct Figure {
    std::string name;
    std::string x_label;
    std::string y_label;
    std::vector<Row> rows;

    /// Rows of one series, in emission order.
    std::vector<Row> series(const std::string& label) const;
    std::vector<std::string> series_labels() const;
};

struct FigureOptions {
    std::uint64_t reps = 1'000'000;
    std::uint64_t seed = 1;
    std::uint64_t chunks = mc::default_chunks;
    double level = mc::default_level;
    mc::Execution exec;
};

/// gauss, clayton, tcopula, gumbel, discrete, threshold.
const std::vector<std::string>& recipe_names();

/// Runs a recipe. Throws DomainError for an unknown name.
Figure make_figure(const std::string& name, const FigureOptions& options = {});

/// `%.12g`.
std::string format_number(double x);

/// Header `series,x,estimate,ci_low,ci_high`, LF line endings.
std::string to_csv(const Figure& figure);

/// Minimal standalone SVG line plot, one polyline per series.
std::string to_svg(const Figure& figure);

} // namespace pmerge::figures

#endif // PMERGE_FIGURES_HPP
