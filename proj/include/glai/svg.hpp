#pragma once

#include <string>
#include <vector>

namespace glai {

struct ChartSeries {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
};

// Static line chart with axes, ticks and a legend. Output depends only on
// the inputs, so emitted figures are byte-stable across runs.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series,
                           int width = 720, int height = 440);

}  // namespace glai
