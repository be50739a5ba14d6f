#pragma once

#include "tzinf/inference.hpp"
#include "tzinf/simulation.hpp"

#include <string>
#include <vector>

namespace tzinf {

// One row per selected variable with a horizontal interval and point estimate
// per method. Infinite sides run to the plot edge and end in an arrow.
std::string interval_plot_svg(const std::vector<InferenceResult>& results, const std::string& title);

// Boxplots of interval lengths per method. Infinite lengths are drawn at the
// largest finite length; coverage and the infinite proportion label each box.
std::string length_boxplot_svg(const StudyReport& report, const std::string& title);

} // namespace tzinf
