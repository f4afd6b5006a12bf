#pragma once

#include <string>

#include "iorisk/report.hpp"

namespace iorisk {

enum class ColorScale { Linear, Log };

/// Minimal SVG heat map: one rect per cell, axis labels and a legend. Both
/// the linear and the log normalisation are recorded in the metadata block;
/// `scale` picks the one used for cell colours.
std::string render_heatmap_svg(const Heatmap& heatmap,
                               ColorScale scale = ColorScale::Log);

/// Stacked area chart of risk_oss: top jobs then "other".
std::string render_daily_svg(const DailySeries& series);

}  // namespace iorisk
